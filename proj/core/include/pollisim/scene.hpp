#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pollisim/color.hpp"
#include "pollisim/pose.hpp"

namespace pollisim {

/// Canonical blossom shape: a stack of flat disks. Five unequal petal disks
/// around the center (the irregular extents break rotational symmetry, which
/// point-cloud registration needs), an anther annulus lifted above the petal
/// plane, and a stigma disk on top.
struct FlowerShapeParams {
    double petal_radius_mm = 14.0;   // overall blossom extent
    double stigma_radius_mm = 3.0;
    double anther_radius_mm = 5.0;   // annulus outer radius; inner = stigma radius
    double anther_lift_mm = 1.0;     // height of the anther plane above the petals
    double stigma_lift_mm = 2.0;     // height of the stigma plane above the petals
};

inline constexpr int kPetalCount = 5;
/// Per-petal extent as a fraction of petal_radius_mm.
extern const double kPetalExtentFraction[kPetalCount];
/// Angular offsets (degrees) from the regular 72-degree fan.
extern const double kPetalAngleJitterDeg[kPetalCount];
/// Upward tilt of each petal disk about its tangent axis (degrees). The
/// unequal extents and tilts give the blossom a unique alignment, which the
/// template registration relies on; tilts stay below ~11 degrees so petal
/// rims never rise above the anther plane inside the microscope view.
extern const double kPetalTiltDeg[kPetalCount];

/// One petal disk of the canonical blossom (canonical frame: centered at the
/// blossom center, normal +z, spin 0).
struct PetalDisk {
    Vec3 center = Vec3::Zero();
    Vec3 normal = Vec3::UnitZ();
    double radius_mm = 0.0;
};

std::vector<PetalDisk> petal_layout(const FlowerShapeParams& shape);

struct FlowerColors {
    Rgb8 petal{245, 245, 240};
    Rgb8 stigma{220, 172, 0};
    Rgb8 anther{200, 120, 20};
    Rgb8 pollen{235, 232, 210};
};

struct FlowerInstance {
    int id = 0;
    Vec3 center = Vec3::Zero();        // base frame, mm
    Vec3 normal = Vec3::UnitZ();       // unit, outward (stigma side)
    double spin_rad = 0.0;             // petal pattern rotation about the normal
    double petal_radius_mm = 14.0;
    double stigma_radius_mm = 3.0;
    double anther_radius_mm = 5.0;
    Vec3 stem_root = Vec3::Zero();     // lower stem endpoint; upper endpoint is `center`
    double stem_radius_mm = 1.5;

    std::int64_t pollen_on_anthers = 200000;
    std::int64_t pollen_on_stigma = 1000;
    std::int64_t pollen_lost = 0;

    /// Fraction of stigma pollen that renders (emulation knob for
    /// light-deposition inspection failures; 1 = everything visible).
    double pollen_visibility = 1.0;

    FlowerColors colors;

    std::int64_t pollen_budget() const {
        return pollen_on_anthers + pollen_on_stigma + pollen_lost;
    }
    FlowerShapeParams shape() const {
        FlowerShapeParams s;
        s.petal_radius_mm = petal_radius_mm;
        s.stigma_radius_mm = stigma_radius_mm;
        s.anther_radius_mm = anther_radius_mm;
        return s;
    }
};

struct LeafOccluder {
    Vec3 center = Vec3::Zero();
    Vec3 normal = Vec3::UnitZ();
    double radius_mm = 25.0;
    Rgb8 color{30, 110, 40};
};

struct PlantScene {
    std::vector<FlowerInstance> flowers;
    std::vector<LeafOccluder> leaves;
    Rgb8 background{40, 60, 45};
    std::uint64_t rng_seed = 0;

    const FlowerInstance* find_flower(int id) const;
    FlowerInstance* find_flower(int id);
};

/// 2-DOF microscope subassembly: linear slide (distance of the lens from the
/// tool cup plane) and a zoom dial mapping affinely to the focal distance.
struct MicroscopeState {
    static constexpr double kSlideMinMm = 0.0;
    static constexpr double kSlideMaxMm = 45.0;

    double slide_mm = kSlideMaxMm;
    double zoom = 0.0;  // [0,1]
    double focal_min_mm = 3.0;
    double focal_max_mm = 50.0;

    void set_slide(double mm);
    void set_zoom(double z);
    double focal_distance_mm() const {
        return focal_min_mm + zoom * (focal_max_mm - focal_min_mm);
    }
};

struct SceneConfig {
    int flower_count = 5;
    double petal_radius_min_mm = 11.0;
    double petal_radius_max_mm = 17.0;
    double stigma_radius_min_mm = 2.6;
    double stigma_radius_max_mm = 3.4;
    double anther_radius_min_mm = 4.6;
    double anther_radius_max_mm = 5.4;

    // Placement: flowers live in a box centered `center_distance_mm` along
    // the view axis from `camera_position`, facing back toward the camera.
    Vec3 camera_position = Vec3::Zero();
    Vec3 view_axis = Vec3::UnitZ();
    double center_distance_mm = 1000.0;
    double lateral_spread_mm = 180.0;
    double depth_spread_mm = 80.0;
    double min_spacing_mm = 60.0;
    double normal_cone_deg = 20.0;
    double stem_tilt_deg = 20.0;      // must stay below 45
    double stem_length_mm = 80.0;

    int leaf_count = 2;
    double leaf_radius_mm = 25.0;

    std::int64_t anther_pollen_initial = 200000;
    std::int64_t stigma_pollen_initial = 1000;

    // Emulation knobs (all off by default).
    double occlusion_prob = 0.0;         // plant a leaf that blocks the approach
    double light_deposition_prob = 0.0;  // drop pollen_visibility to `light_visibility`
    double light_visibility = 0.15;

    FlowerColors colors;
    Rgb8 background{40, 60, 45};

    void validate() const;
};

/// Deterministic for a fixed seed. Throws GenerationError when placement
/// constraints cannot be met within bounded retries.
PlantScene generate_scene(const SceneConfig& config, std::uint64_t seed);

struct BuzzParams {
    double transfer_rate_per_s = 0.23;  // decay constant of anther depletion
    double capture_ratio = 0.9;         // captured by the stigma; rest is lost
};

struct PollenCounts {
    std::int64_t on_anthers = 0;
    std::int64_t on_stigma = 0;
    std::int64_t lost = 0;
};

/// Moves floor((1-exp(-rate*duration)) * anthers) grains off the anthers;
/// floor(capture_ratio * moved) lands on the stigma and the fractional
/// remainder is lost. Integer bookkeeping keeps the budget exactly conserved.
PollenCounts apply_buzz(PlantScene& scene, int flower_id, double duration_s,
                        const BuzzParams& params = {});

}  // namespace pollisim
