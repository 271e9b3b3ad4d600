#pragma once

#include <string>

#include "pollisim/image.hpp"

namespace pollisim {

struct EllipseFit {
    double center_u = 0.0;
    double center_v = 0.0;
    double semi_major = 0.0;  // a >= b > 0
    double semi_minor = 0.0;
    double angle_rad = 0.0;   // major-axis direction
    long pixel_count = 0;
    PixelBox bounding_box;
};

/// HSV band selecting flower-center (stigma) tissue in microscope frames.
struct CenterBands {
    Hsv8 lo{20, 215, 100};
    Hsv8 hi{30, 255, 245};
    int min_component_px = 10;
};

/// Largest connected component of in-band pixels, summarized by its image
/// moments: centroid plus axes/orientation from the covariance
/// eigendecomposition. Throws CenterNotFoundError when nothing passes or
/// the component is too small.
EllipseFit find_flower_center(const Image& img, const CenterBands& bands = {});

/// Two-stage pollen filter. Stage 1 selects saturated flower tissue for
/// REMOVAL; stage 2 counts pollen among the survivors. The alternative
/// reading of stage 1 (bounds select pixels to keep) is representable via
/// stage1_selects_removed = false, but then stage 2 can never fire: the two
/// bands are disjoint in saturation, which is why removal is the default.
struct PollenBands {
    Hsv8 remove_lo{0, 170, 0};
    Hsv8 remove_hi{45, 255, 255};
    Hsv8 pollen_lo{0, 0, 154};
    Hsv8 pollen_hi{62, 168, 255};
    bool stage1_selects_removed = true;
};

long count_pollen(const Image& img, const PollenBands& bands = {});

/// Per-capture inspection record.
struct InspectionResult {
    long pollen_pixels = 0;
    double focus_score_at_capture = 0.0;
    std::string image_ref;  // dump path when image dumping is on, else empty
};

}  // namespace pollisim
