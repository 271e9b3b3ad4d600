#pragma once

#include <vector>

#include "pollisim/camera.hpp"
#include "pollisim/global_scope.hpp"
#include "pollisim/image.hpp"
#include "pollisim/point_cloud.hpp"

namespace pollisim {

/// Translation-only velocity command in the end-effector (endoscope camera)
/// frame; the rotational part is fixed at zero by design.
struct ServoCommand {
    Vec3 velocity_mm_s = Vec3::Zero();
};

struct PdGains {
    double kp = 1.0;             // 1/s
    double kd = 0.1;
    double max_speed_mm_s = 20.0;
    double target_range_mm = 100.0;
    double assumed_diagonal_mm = 33.0;  // bounding-box diagonal of an average blossom
};

/// Monocular range heuristic: the box diagonal is assumed to span
/// `assumed_diagonal_mm` (33 mm for an average blossom), so
/// range = f_avg * 33 / diagonal_px.
double estimate_range_from_bbox(const Detection& det, const CameraModel& cam,
                                double assumed_diagonal_mm = 33.0);

struct ServoState {
    Vec3 prev_error = Vec3::Zero();
    bool has_prev = false;
};

/// One PD step toward (centered, target_range). Picks the detection closest
/// to the image center when several are present; throws TargetLostError on
/// an empty list.
ServoCommand servo_step(const std::vector<Detection>& detections, const CameraModel& cam,
                        const PdGains& gains, ServoState& state, double dt_s);

struct MatchParams {
    int block_radius = 3;        // 7x7 blocks
    int search_range_px = 64;
    double min_ncc = 0.7;
    double min_texture_var = 4.0;     // skip blocks flatter than this
    double uniqueness_margin = 0.05;  // reject matches with a rival NCC peak this close
};

/// Depth from a laterally shifted image pair (camera moved +x by
/// `baseline_mm` between img_a and img_b). 1-D NCC block matching with
/// sub-pixel parabola refinement; low-confidence and textureless pixels get
/// the no-return sentinel. The returned map stores ray range like every
/// other DepthMap.
DepthMap two_view_depth(const Image& img_a, const Image& img_b, double baseline_mm,
                        const CameraModel& cam, const MatchParams& params = {});

/// Back-projects every finite-range pixel inside the (clipped) detection
/// box; the cloud lives in the endoscope camera frame.
PointCloud extract_flower_cloud(const DepthMap& depth, const Detection& det,
                                const CameraModel& cam);

}  // namespace pollisim
