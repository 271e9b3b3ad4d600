#include "pollisim/global_scope.hpp"

#include <algorithm>
#include <cmath>

#include "pollisim/errors.hpp"
#include "pollisim/rng.hpp"

namespace pollisim {

std::vector<Detection> detect_flowers(const Image& img, const DetectorParams& params) {
    if (img.empty()) throw DomainError("detect_flowers: empty image");
    const int w = img.width();
    const int h = img.height();

    std::vector<std::uint8_t> mask(static_cast<std::size_t>(w) * h, 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const Hsv8 hsv = rgb_to_hsv(img.at(x, y));
            if (hsv_in_band(hsv, params.warm_lo, params.warm_hi) ||
                hsv_in_band(hsv, params.white_lo, params.white_hi)) {
                mask[static_cast<std::size_t>(y) * w + x] = 1;
            }
        }
    }

    // 8-connected components, raster-scan seeding (deterministic order)
    std::vector<Detection> detections;
    std::vector<int> stack;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i0 = static_cast<std::size_t>(y) * w + x;
            if (mask[i0] != 1) continue;
            mask[i0] = 2;
            stack.assign(1, static_cast<int>(i0));
            long area = 0;
            PixelBox box{x, y, x, y};
            while (!stack.empty()) {
                const int i = stack.back();
                stack.pop_back();
                const int px = i % w;
                const int py = i / w;
                ++area;
                box.u_min = std::min(box.u_min, px);
                box.u_max = std::max(box.u_max, px);
                box.v_min = std::min(box.v_min, py);
                box.v_max = std::max(box.v_max, py);
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = px + dx;
                        const int ny = py + dy;
                        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                        const std::size_t ni = static_cast<std::size_t>(ny) * w + nx;
                        if (mask[ni] == 1) {
                            mask[ni] = 2;
                            stack.push_back(static_cast<int>(ni));
                        }
                    }
                }
            }
            if (area < params.min_area_px) continue;
            Detection det;
            det.box = box;
            det.confidence = static_cast<double>(area) / static_cast<double>(box.area());
            detections.push_back(det);
        }
    }

    if (params.p_miss > 0.0) {
        Rng rng(hash_combine(params.seed, 0xde7ec7ULL));
        std::vector<Detection> kept;
        kept.reserve(detections.size());
        for (const auto& det : detections) {
            if (rng.uniform() >= params.p_miss) kept.push_back(det);
        }
        detections.swap(kept);
    }
    return detections;
}

FlowerHypothesis localize_flower(const Detection& det, const DepthMap& depth,
                                 const CameraModel& cam, const Pose& cam_pose) {
    const PixelBox box = det.box.clipped(depth.width(), depth.height());
    if (!box.valid()) throw LocalizationError("localize_flower: box outside depth map");

    std::vector<float> ranges;
    ranges.reserve(static_cast<std::size_t>(box.area()));
    for (int y = box.v_min; y <= box.v_max; ++y) {
        for (int x = box.u_min; x <= box.u_max; ++x) {
            const float r = depth.at(x, y);
            if (DepthMap::is_return(r)) ranges.push_back(r);
        }
    }
    if (ranges.empty()) throw LocalizationError("localize_flower: no depth return inside box");

    auto mid = ranges.begin() + static_cast<std::ptrdiff_t>(ranges.size() / 2);
    std::nth_element(ranges.begin(), mid, ranges.end());
    const double median_range = static_cast<double>(*mid);

    const Vec3 p_cam = range_to_point(cam, {box.center_u(), box.center_v()}, median_range);

    FlowerHypothesis hyp;
    hyp.position = cam_pose.apply(p_cam);
    hyp.source = det;
    hyp.segment_start = cam_pose.translation;
    hyp.segment_end = hyp.position;
    return hyp;
}

Pose plan_waypoint(const Vec3& cam_position, const Vec3& flower_position, double fraction,
                   const Vec3& world_up) {
    const Vec3 seg = flower_position - cam_position;
    const double len = seg.norm();
    if (len < 1e-9) throw DomainError("plan_waypoint: camera and flower positions coincide");
    if (fraction <= 0.0 || fraction >= 1.0) {
        throw DomainError("plan_waypoint: fraction must be in (0,1)");
    }

    const Vec3 forward = seg / len;

    // Tool up is camera -y. Pick roll so -y lands as close to world up as
    // the forward constraint allows.
    Vec3 up = world_up - forward * world_up.dot(forward);
    if (up.norm() < 1e-9) {
        const Vec3 fallback = std::abs(forward.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitZ();
        up = fallback - forward * fallback.dot(forward);
    }
    up.normalize();

    Mat3 r;
    const Vec3 y_axis = -up;
    const Vec3 x_axis = y_axis.cross(forward).normalized();
    r.col(0) = x_axis;
    r.col(1) = y_axis;
    r.col(2) = forward;

    return make_pose(r, cam_position + seg * fraction, "base", "endoscope");
}

}  // namespace pollisim
