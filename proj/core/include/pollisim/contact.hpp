#pragma once

#include <array>
#include <functional>
#include <vector>

#include "pollisim/inspection.hpp"
#include "pollisim/point_cloud.hpp"
#include "pollisim/scene.hpp"

namespace pollisim {

/// Pollination fork geometry, expressed in the end-effector (endoscope
/// camera) frame: +z forward, +y down. The tool hangs below the camera and
/// reaches forward; its up axis starts at -y.
struct ToolParams {
    double cup_radius_mm = 8.0;
    Vec3 cup_offset_ee{0.0, 40.0, 60.0};   // cup center
    double upper_surface_mm = 3.0;         // tine tops above the cup plane
    double clearance_mm = 5.0;             // extra descent below the cloud
    double slide_approach_mm = 45.0;       // microscope slide during approach
    double slide_contact_mm = 6.0;         // final approach slide position
};

struct MotionPrimitive {
    enum class Kind { RotateToPerpendicular, Descend, Advance };
    Kind kind = Kind::RotateToPerpendicular;
    Vec3 axis_or_direction = Vec3::UnitX();  // rotation axis, or unit travel direction
    double magnitude = 0.0;                  // radians, or millimeters
};

/// Exactly three primitives, always in this order: rotate the tool plane
/// perpendicular to the flower normal, descend along the stem direction
/// until the tine tops clear the lowest cloud point, then advance until the
/// cup center sits under the cloud centroid.
struct ContactPlan {
    std::array<MotionPrimitive, 3> primitives;
    double slide_preset_mm = 45.0;
};

/// Normal and cloud are both in the end-effector frame. Throws PlanningError
/// on an empty cloud or non-unit normal.
ContactPlan plan_contact(const Vec3& flower_normal_unit, const PointCloud& cloud,
                         const ToolParams& tool = {});

struct CenteringParams {
    double gain = 0.4;           // fraction of the pixel offset corrected per step
    double creep_mm = 0.5;       // upward travel along the stem per step
    double focus_threshold = 50.0;
    double center_tol_px = 10.0;
    int max_steps = 150;
    double px_per_mm = 10.0;     // microscope image scale used for the lateral map
};

struct CenteringCommand {
    Vec3 lateral_cam_mm = Vec3::Zero();  // microscope-camera-frame x/y translation
    double creep_mm = 0.0;               // travel along the tool up axis
    bool centered = false;
    bool done = false;                   // centered and in focus
};

/// Proportional centering: lateral command from the ellipse-center offset,
/// constant upward creep until the focus score clears the threshold.
CenteringCommand centering_step(const EllipseFit& ellipse, int image_width, int image_height,
                                const CenteringParams& params, double current_focus_score);

/// Drops the slide to the contact distance. Capture is decided separately
/// via cup_contains.
MicroscopeState final_approach(const MicroscopeState& state, const ToolParams& tool = {});

/// True when the flower center lies within cup_radius of the cup axis.
bool cup_contains(const Vec3& flower_center, const Vec3& cup_center, const Vec3& cup_axis_unit,
                  double cup_radius_mm);

struct PollinationParams {
    long count_threshold_px = 50000;
    int max_buzzes = 5;
    double buzz_duration_s = 10.0;
    BuzzParams buzz;
};

struct PollinationOutcome {
    std::vector<InspectionResult> history;  // one entry per inspection
    int buzz_count = 0;
    bool pollinated = false;  // final classification by the count threshold
};

/// Alternates inspection and buzzing until the pollen pixel count clears the
/// threshold or max_buzzes is exhausted. `inspect` captures and counts; the
/// loop never runs more than max_buzzes + 1 inspections.
PollinationOutcome pollination_loop(PlantScene& scene, int flower_id,
                                    const std::function<InspectionResult()>& inspect,
                                    const PollinationParams& params);

}  // namespace pollisim
