#include "pollisim/contact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pollisim/errors.hpp"

namespace pollisim {

ContactPlan plan_contact(const Vec3& flower_normal_unit, const PointCloud& cloud,
                         const ToolParams& tool) {
    if (cloud.empty()) throw PlanningError("plan_contact: empty flower cloud");
    if (std::abs(flower_normal_unit.norm() - 1.0) > 1e-6) {
        throw PlanningError("plan_contact: normal must be a unit vector");
    }

    const Vec3 n = flower_normal_unit;
    const Vec3 stem_dir = -n;
    const Vec3 tool_up(0.0, -1.0, 0.0);  // pre-rotation tool plane normal (ee frame)

    ContactPlan plan;
    plan.slide_preset_mm = tool.slide_approach_mm;

    // 1) rotate the tool plane perpendicular to the flower normal
    Vec3 axis = tool_up.cross(n);
    const double sin_a = axis.norm();
    const double cos_a = std::clamp(tool_up.dot(n), -1.0, 1.0);
    const double angle = std::atan2(sin_a, cos_a);
    if (sin_a < 1e-12) {
        axis = Vec3::UnitX();  // already aligned (or exactly opposed)
    } else {
        axis /= sin_a;
    }
    plan.primitives[0] = {MotionPrimitive::Kind::RotateToPerpendicular, axis, angle};

    // Rotation happens about the cup center, so the cup stays put and the
    // tool up axis becomes n.
    const Vec3 cup = tool.cup_offset_ee;
    const Vec3 tine_top = cup + n * tool.upper_surface_mm;

    double cloud_min_h = std::numeric_limits<double>::infinity();
    for (const auto& p : cloud.points) cloud_min_h = std::min(cloud_min_h, p.dot(n));

    // 2) descend along the stem until the tine tops clear the lowest cloud
    //    point by the clearance
    const double descend = std::max(0.0, tine_top.dot(n) - cloud_min_h + tool.clearance_mm);
    plan.primitives[1] = {MotionPrimitive::Kind::Descend, stem_dir, descend};

    // 3) advance until the cup center sits under the cloud centroid
    const Vec3 cup_after = cup + stem_dir * descend;
    const Vec3 delta = cloud.centroid() - cup_after;
    Vec3 lateral = delta - n * delta.dot(n);
    const double dist = lateral.norm();
    Vec3 dir = dist > 1e-12 ? Vec3(lateral / dist) : Vec3::UnitZ();
    plan.primitives[2] = {MotionPrimitive::Kind::Advance, dir, dist};

    return plan;
}

CenteringCommand centering_step(const EllipseFit& ellipse, int image_width, int image_height,
                                const CenteringParams& params, double current_focus_score) {
    CenteringCommand cmd;
    const double du = ellipse.center_u - 0.5 * image_width;
    const double dv = ellipse.center_v - 0.5 * image_height;
    const bool in_focus = current_focus_score >= params.focus_threshold;
    cmd.centered = std::hypot(du, dv) <= params.center_tol_px;
    cmd.done = cmd.centered && in_focus;
    if (cmd.done) return cmd;

    // Move the tool so the flower walks toward the image center: the
    // microscope looks down its own -z, so a +u offset is corrected by a
    // +x camera-frame translation of the tool.
    if (!cmd.centered) {
        cmd.lateral_cam_mm.x() = params.gain * du / params.px_per_mm;
        cmd.lateral_cam_mm.y() = params.gain * dv / params.px_per_mm;
    }
    if (!in_focus) cmd.creep_mm = params.creep_mm;
    return cmd;
}

MicroscopeState final_approach(const MicroscopeState& state, const ToolParams& tool) {
    MicroscopeState next = state;
    next.set_slide(tool.slide_contact_mm);
    return next;
}

bool cup_contains(const Vec3& flower_center, const Vec3& cup_center, const Vec3& cup_axis_unit,
                  double cup_radius_mm) {
    const Vec3 d = flower_center - cup_center;
    const Vec3 lateral = d - cup_axis_unit * d.dot(cup_axis_unit);
    return lateral.norm() <= cup_radius_mm;
}

PollinationOutcome pollination_loop(PlantScene& scene, int flower_id,
                                    const std::function<InspectionResult()>& inspect,
                                    const PollinationParams& params) {
    if (scene.find_flower(flower_id) == nullptr) {
        throw DomainError("pollination_loop: unknown flower id");
    }
    PollinationOutcome out;
    out.history.push_back(inspect());
    while (out.history.back().pollen_pixels <= params.count_threshold_px &&
           out.buzz_count < params.max_buzzes) {
        apply_buzz(scene, flower_id, params.buzz_duration_s, params.buzz);
        ++out.buzz_count;
        out.history.push_back(inspect());
    }
    out.pollinated = out.history.back().pollen_pixels > params.count_threshold_px;
    return out;
}

}  // namespace pollisim
