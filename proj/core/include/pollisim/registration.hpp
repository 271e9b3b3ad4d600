#pragma once

#include <cstdint>

#include "pollisim/point_cloud.hpp"
#include "pollisim/scene.hpp"

namespace pollisim {

/// Point cloud sampled from the canonical flower disk stack, centered at the
/// blossom center with the canonical normal along +z.
struct FlowerTemplate {
    PointCloud cloud;
    Vec3 canonical_normal = Vec3::UnitZ();
};

/// Grid-samples the petal disks, anther annulus and stigma disk of the
/// canonical shape at the given spacing.
FlowerTemplate make_flower_template(const FlowerShapeParams& shape = {},
                                    double sample_spacing_mm = 1.0);

struct RegParams {
    double voxel_mm = 1.0;          // downsampling before matching
    double inlier_mm = 1.5;         // RANSAC inlier distance / consistency tolerance
    int ransac_hypotheses = 2000;   // scored hypotheses (after the consistency prefilter)
    int icp_max_iterations = 50;
    double icp_convergence = 1e-4;  // translation (mm) + rotation (rad) pose delta
    double correspondence_cutoff_mm = 5.0;
    double mse_threshold_mm2 = 4.0;
    std::uint64_t seed = 0;
};

struct RegistrationResult {
    Pose pose;                    // template -> observed cloud frame
    double mse_mm2 = 0.0;         // mean squared nearest-neighbor distance, post-ICP
    double inlier_fraction = 0.0;
    bool converged = false;
    int icp_iterations = 0;
};

/// RANSAC over seeded random 3-point correspondences (pairwise-distance
/// consistency prefilter), then point-to-point ICP. Deterministic for a
/// fixed seed. Throws RegistrationError for clouds with fewer than 3 points.
RegistrationResult register_template(const PointCloud& cloud, const FlowerTemplate& tmpl,
                                     const RegParams& params = {});

/// Outward flower normal: the registered rotation applied to the template's
/// canonical +z. Requires a converged registration.
Vec3 flower_normal(const RegistrationResult& reg);

/// Least-squares rigid transform mapping src onto dst (Kabsch/SVD).
Pose rigid_from_correspondences(const std::vector<Vec3>& src, const std::vector<Vec3>& dst);

}  // namespace pollisim
