#include "pollisim/local_scope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pollisim/errors.hpp"

namespace pollisim {

double estimate_range_from_bbox(const Detection& det, const CameraModel& cam,
                                double assumed_diagonal_mm) {
    const double du = det.box.u_max - det.box.u_min;
    const double dv = det.box.v_max - det.box.v_min;
    const double diag = std::sqrt(du * du + dv * dv);
    if (diag <= 0.0) throw DomainError("estimate_range_from_bbox: zero-size box");
    return 0.5 * (cam.fx + cam.fy) * assumed_diagonal_mm / diag;
}

ServoCommand servo_step(const std::vector<Detection>& detections, const CameraModel& cam,
                        const PdGains& gains, ServoState& state, double dt_s) {
    if (dt_s <= 0.0) throw DomainError("servo_step: dt must be positive");
    if (detections.empty()) throw TargetLostError("servo_step: no detection to track");

    // servo on the flower closest to the image center
    const Detection* best = &detections.front();
    double best_d2 = std::numeric_limits<double>::infinity();
    for (const auto& det : detections) {
        const double du = det.box.center_u() - cam.cx;
        const double dv = det.box.center_v() - cam.cy;
        const double d2 = du * du + dv * dv;
        if (d2 < best_d2) {
            best_d2 = d2;
            best = &det;
        }
    }

    const double range = estimate_range_from_bbox(*best, cam, gains.assumed_diagonal_mm);
    Vec3 error;
    error.x() = (best->box.center_u() - cam.cx) * range / cam.fx;
    error.y() = (best->box.center_v() - cam.cy) * range / cam.fy;
    error.z() = range - gains.target_range_mm;

    Vec3 cmd = gains.kp * error;
    if (state.has_prev) cmd += gains.kd * (error - state.prev_error) / dt_s;
    state.prev_error = error;
    state.has_prev = true;

    const double speed = cmd.norm();
    if (speed > gains.max_speed_mm_s) cmd *= gains.max_speed_mm_s / speed;
    return {cmd};
}

namespace {

int luma(const Image& img, int x, int y) {
    const Rgb8 c = img.at(x, y);
    return (299 * c.r + 587 * c.g + 114 * c.b) / 1000;
}

struct BlockStats {
    double mean = 0.0;
    double var = 0.0;  // sum of squared deviations (not normalized)
};

BlockStats block_stats(const std::vector<int>& lum, int w, int x, int y, int r) {
    double sum = 0.0, sum2 = 0.0;
    const int n = (2 * r + 1) * (2 * r + 1);
    for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
            const double v = lum[static_cast<std::size_t>(y + dy) * w + (x + dx)];
            sum += v;
            sum2 += v * v;
        }
    }
    BlockStats s;
    s.mean = sum / n;
    s.var = sum2 - sum * sum / n;
    return s;
}

}  // namespace

DepthMap two_view_depth(const Image& img_a, const Image& img_b, double baseline_mm,
                        const CameraModel& cam, const MatchParams& params) {
    if (img_a.width() != img_b.width() || img_a.height() != img_b.height()) {
        throw DomainError("two_view_depth: image sizes differ");
    }
    if (baseline_mm <= 0.0) throw DomainError("two_view_depth: baseline must be positive");

    const int w = img_a.width();
    const int h = img_a.height();
    const int r = params.block_radius;
    const int n = (2 * r + 1) * (2 * r + 1);
    const double f = 0.5 * (cam.fx + cam.fy);

    std::vector<int> lum_a(static_cast<std::size_t>(w) * h), lum_b(lum_a.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            lum_a[static_cast<std::size_t>(y) * w + x] = luma(img_a, x, y);
            lum_b[static_cast<std::size_t>(y) * w + x] = luma(img_b, x, y);
        }
    }

    DepthMap depth(w, h);
    std::vector<double> scores(static_cast<std::size_t>(params.search_range_px) + 1);

    for (int y = r; y < h - r; ++y) {
        for (int x = r; x < w - r; ++x) {
            const BlockStats sa = block_stats(lum_a, w, x, y, r);
            if (sa.var < params.min_texture_var * n) continue;  // textureless

            const int d_max = std::min(params.search_range_px, x - r);
            if (d_max < 1) continue;

            int best_d = -1;
            double best_ncc = params.min_ncc;
            for (int d = 0; d <= d_max; ++d) {
                const int xb = x - d;
                const BlockStats sb = block_stats(lum_b, w, xb, y, r);
                if (sb.var <= 0.0) {
                    scores[static_cast<std::size_t>(d)] = -1.0;
                    continue;
                }
                double cross = 0.0;
                for (int dy = -r; dy <= r; ++dy) {
                    for (int dx = -r; dx <= r; ++dx) {
                        cross += static_cast<double>(
                                     lum_a[static_cast<std::size_t>(y + dy) * w + (x + dx)]) *
                                 lum_b[static_cast<std::size_t>(y + dy) * w + (xb + dx)];
                    }
                }
                const double ncc = (cross - n * sa.mean * sb.mean) / std::sqrt(sa.var * sb.var);
                scores[static_cast<std::size_t>(d)] = ncc;
                if (ncc > best_ncc) {
                    best_ncc = ncc;
                    best_d = d;
                }
            }
            if (best_d < 0) continue;

            // uniqueness: a rival peak away from the winner means the pattern
            // repeats, so the match is low-confidence
            bool ambiguous = false;
            for (int d = 0; d <= d_max && !ambiguous; ++d) {
                if (std::abs(d - best_d) <= 2) continue;
                if (scores[static_cast<std::size_t>(d)] > best_ncc - params.uniqueness_margin) {
                    ambiguous = true;
                }
            }
            if (ambiguous) continue;

            // sub-pixel parabola through the best score and its neighbors
            double disparity = best_d;
            if (best_d >= 1 && best_d < d_max) {
                const double s0 = scores[static_cast<std::size_t>(best_d - 1)];
                const double s1 = scores[static_cast<std::size_t>(best_d)];
                const double s2 = scores[static_cast<std::size_t>(best_d + 1)];
                const double denom = s0 - 2.0 * s1 + s2;
                if (std::abs(denom) > 1e-12) {
                    const double offset = 0.5 * (s0 - s2) / denom;
                    if (std::abs(offset) <= 1.0) disparity += offset;
                }
            }
            if (disparity < 0.25) continue;  // at or beyond the horizon

            const double z = f * baseline_mm / disparity;
            const Vec3 p = backproject(cam, {static_cast<double>(x), static_cast<double>(y)}, z);
            const double range = p.norm();
            if (range > cam.far_clip) continue;
            depth.set(x, y, static_cast<float>(range));
        }
    }
    return depth;
}

PointCloud extract_flower_cloud(const DepthMap& depth, const Detection& det,
                                const CameraModel& cam) {
    const PixelBox box = det.box.clipped(depth.width(), depth.height());
    if (!box.valid()) throw EmptyCloudError("extract_flower_cloud: box outside depth map");
    PointCloud cloud;
    cloud.frame = "endoscope";
    for (int y = box.v_min; y <= box.v_max; ++y) {
        for (int x = box.u_min; x <= box.u_max; ++x) {
            const float range = depth.at(x, y);
            if (!DepthMap::is_return(range)) continue;
            cloud.points.push_back(
                range_to_point(cam, {static_cast<double>(x), static_cast<double>(y)}, range));
        }
    }
    if (cloud.empty()) throw EmptyCloudError("extract_flower_cloud: no depth returns inside box");
    return cloud;
}

}  // namespace pollisim
