#pragma once

#include <string>
#include <vector>

#include "pollisim/camera.hpp"
#include "pollisim/image.hpp"
#include "pollisim/pose.hpp"

namespace pollisim {

struct Detection {
    PixelBox box;
    double confidence = 0.0;  // filled-area ratio of the component in its box
    std::string camera = "realsense";
};

/// Classical HSV blob detector standing in for a learned model. Two bands:
/// a warm band for stigma/anther tissue and a low-saturation bright band for
/// white petals. p_miss drops detections at random (seeded) to emulate an
/// imperfect detector in batch experiments.
struct DetectorParams {
    Hsv8 warm_lo{0, 80, 80};
    Hsv8 warm_hi{45, 255, 255};
    Hsv8 white_lo{0, 0, 180};
    Hsv8 white_hi{179, 60, 255};
    int min_area_px = 30;
    double p_miss = 0.0;
    std::uint64_t seed = 0;
};

std::vector<Detection> detect_flowers(const Image& img, const DetectorParams& params);

struct FlowerHypothesis {
    Vec3 position = Vec3::Zero();  // base frame, mm
    Detection source;
    Vec3 segment_start = Vec3::Zero();  // camera position, base frame
    Vec3 segment_end = Vec3::Zero();    // flower position, base frame
};

/// Median finite range inside the detection box, cast along the box-center
/// pixel ray, then taken into the base frame through cam_pose. Throws
/// LocalizationError when the box holds no depth return.
FlowerHypothesis localize_flower(const Detection& det, const DepthMap& depth,
                                 const CameraModel& cam, const Pose& cam_pose);

/// Waypoint on the camera-to-flower segment at `fraction` of the way. The
/// returned pose's +z (endoscope forward) axis points along the segment;
/// roll keeps the tool's up vector (-y) as close as possible to world up.
Pose plan_waypoint(const Vec3& cam_position, const Vec3& flower_position, double fraction = 0.6,
                   const Vec3& world_up = Vec3::UnitY() * -1.0);

}  // namespace pollisim
