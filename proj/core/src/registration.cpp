#include "pollisim/registration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pollisim/errors.hpp"
#include "pollisim/rng.hpp"

namespace pollisim {

FlowerTemplate make_flower_template(const FlowerShapeParams& shape, double sample_spacing_mm) {
    if (sample_spacing_mm <= 0.0) throw DomainError("make_flower_template: spacing must be positive");
    FlowerTemplate tmpl;
    tmpl.cloud.frame = "flower_template";

    auto sample_annulus = [&](const Vec3& center, double r_in, double r_out) {
        const int steps = static_cast<int>(std::ceil(2.0 * r_out / sample_spacing_mm));
        for (int iy = 0; iy <= steps; ++iy) {
            for (int ix = 0; ix <= steps; ++ix) {
                const double x = -r_out + ix * sample_spacing_mm;
                const double y = -r_out + iy * sample_spacing_mm;
                const double rad = std::hypot(x, y);
                if (rad < r_in || rad > r_out) continue;
                tmpl.cloud.points.push_back(center + Vec3(x, y, 0.0));
            }
        }
    };

    for (int k = 0; k < kPetalCount; ++k) {
        const double extent = shape.petal_radius_mm * kPetalExtentFraction[k];
        const double disk_r = 0.45 * extent;
        const double ang = (72.0 * k + kPetalAngleJitterDeg[k]) * std::numbers::pi / 180.0;
        const Vec3 c(std::cos(ang) * (extent - disk_r), std::sin(ang) * (extent - disk_r), 0.0);
        sample_annulus(c, 0.0, disk_r);
    }
    sample_annulus(Vec3(0, 0, shape.anther_lift_mm), shape.stigma_radius_mm, shape.anther_radius_mm);
    sample_annulus(Vec3(0, 0, shape.stigma_lift_mm), 0.0, shape.stigma_radius_mm);
    return tmpl;
}

Pose rigid_from_correspondences(const std::vector<Vec3>& src, const std::vector<Vec3>& dst) {
    if (src.size() != dst.size() || src.size() < 3) {
        throw RegistrationError("rigid_from_correspondences: need >= 3 paired points");
    }
    Vec3 c_src = Vec3::Zero(), c_dst = Vec3::Zero();
    for (std::size_t i = 0; i < src.size(); ++i) {
        c_src += src[i];
        c_dst += dst[i];
    }
    c_src /= static_cast<double>(src.size());
    c_dst /= static_cast<double>(dst.size());

    Mat3 h = Mat3::Zero();
    for (std::size_t i = 0; i < src.size(); ++i) {
        h += (dst[i] - c_dst) * (src[i] - c_src).transpose();
    }
    Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 r = svd.matrixU() * svd.matrixV().transpose();
    if (r.determinant() < 0.0) {
        Mat3 flip = Mat3::Identity();
        flip(2, 2) = -1.0;
        r = svd.matrixU() * flip * svd.matrixV().transpose();
    }
    return make_pose(r, c_dst - r * c_src);
}

namespace {

struct Correspondences {
    std::vector<Vec3> src;
    std::vector<Vec3> dst;
};

// NN pairs of the transformed template against the cloud, within cutoff.
Correspondences match(const std::vector<Vec3>& tmpl_pts, const Pose& pose,
                      const std::vector<Vec3>& cloud_pts, const NeighborGrid& grid,
                      double cutoff_mm) {
    Correspondences c;
    c.src.reserve(tmpl_pts.size());
    c.dst.reserve(tmpl_pts.size());
    for (const auto& p : tmpl_pts) {
        const Vec3 q = pose.apply(p);
        const int j = grid.nearest(q, cutoff_mm);
        if (j < 0) continue;
        c.src.push_back(p);
        c.dst.push_back(cloud_pts[static_cast<std::size_t>(j)]);
    }
    return c;
}

}  // namespace

RegistrationResult register_template(const PointCloud& cloud, const FlowerTemplate& tmpl,
                                     const RegParams& params) {
    if (cloud.size() < 3) throw RegistrationError("register_template: cloud has fewer than 3 points");
    if (tmpl.cloud.empty()) throw RegistrationError("register_template: empty template");

    const PointCloud tmpl_ds = voxel_downsample(tmpl.cloud, params.voxel_mm);
    const PointCloud cloud_ds = voxel_downsample(cloud, params.voxel_mm);
    const auto& tp = tmpl_ds.points;
    const auto& cp = cloud_ds.points;

    const NeighborGrid inlier_grid(cp, params.inlier_mm);
    const NeighborGrid icp_grid(cp, params.correspondence_cutoff_mm);

    auto inlier_count = [&](const Pose& pose) {
        int count = 0;
        for (const auto& p : tp) {
            if (inlier_grid.nearest(pose.apply(p), params.inlier_mm) >= 0) ++count;
        }
        return count;
    };

    // Hypothesis 0: centroid shift with identity rotation. The pipeline's
    // clouds start roughly axis-aligned, and self-registration should not
    // depend on sampling luck.
    Pose best_pose = make_pose(Mat3::Identity(), cloud_ds.centroid() - tmpl_ds.centroid());
    int best_score = inlier_count(best_pose);

    Rng rng(hash_combine(params.seed, 0x4a45acULL));
    const int want = params.ransac_hypotheses;
    const long max_draws = 100L * std::max(1, want);
    int scored = 0;
    std::vector<Vec3> s3(3), d3(3);
    if (tp.size() >= 3 && cp.size() >= 3) {
        for (long draw = 0; draw < max_draws && scored < want; ++draw) {
            std::size_t si[3], di[3];
            for (int k = 0; k < 3; ++k) {
                si[k] = rng.uniform_index(tp.size());
                di[k] = rng.uniform_index(cp.size());
            }
            if (si[0] == si[1] || si[1] == si[2] || si[0] == si[2]) continue;
            if (di[0] == di[1] || di[1] == di[2] || di[0] == di[2]) continue;

            // pairwise-distance consistency prefilter
            bool consistent = true;
            for (int a = 0; a < 3 && consistent; ++a) {
                const int b = (a + 1) % 3;
                const double ds = (tp[si[a]] - tp[si[b]]).norm();
                const double dd = (cp[di[a]] - cp[di[b]]).norm();
                if (std::abs(ds - dd) > params.inlier_mm) consistent = false;
                if (ds < 2.0 * params.voxel_mm) consistent = false;  // degenerate triangle
            }
            if (!consistent) continue;

            for (int k = 0; k < 3; ++k) {
                s3[static_cast<std::size_t>(k)] = tp[si[k]];
                d3[static_cast<std::size_t>(k)] = cp[di[k]];
            }
            const Pose cand = rigid_from_correspondences(s3, d3);
            ++scored;
            const int score = inlier_count(cand);
            if (score > best_score) {  // ties keep the earlier hypothesis
                best_score = score;
                best_pose = cand;
            }
        }
    }

    // ICP refinement
    RegistrationResult result;
    Pose pose = best_pose;
    int iterations = 0;
    for (; iterations < params.icp_max_iterations; ++iterations) {
        const Correspondences c = match(tp, pose, cp, icp_grid, params.correspondence_cutoff_mm);
        if (c.src.size() < 3) break;
        const Pose next = rigid_from_correspondences(c.src, c.dst);
        const double delta = (next.translation - pose.translation).norm() +
                             rotation_angle_between(next.rotation, pose.rotation);
        pose = next;
        if (delta < params.icp_convergence) {
            ++iterations;
            break;
        }
    }

    const Correspondences final_pairs =
        match(tp, pose, cp, icp_grid, params.correspondence_cutoff_mm);
    double mse = std::numeric_limits<double>::infinity();
    if (!final_pairs.src.empty()) {
        double acc = 0.0;
        for (std::size_t i = 0; i < final_pairs.src.size(); ++i) {
            acc += (pose.apply(final_pairs.src[i]) - final_pairs.dst[i]).squaredNorm();
        }
        mse = acc / static_cast<double>(final_pairs.src.size());
    }

    result.pose = make_pose(pose.rotation, pose.translation, cloud.frame, "flower_template");
    result.mse_mm2 = mse;
    result.inlier_fraction =
        static_cast<double>(inlier_count(pose)) / static_cast<double>(tp.size());
    result.converged = mse < params.mse_threshold_mm2;
    result.icp_iterations = iterations;
    return result;
}

Vec3 flower_normal(const RegistrationResult& reg) {
    if (!reg.converged) {
        throw DomainError("flower_normal: registration did not converge");
    }
    return (reg.pose.rotation * Vec3::UnitZ()).normalized();
}

}  // namespace pollisim
