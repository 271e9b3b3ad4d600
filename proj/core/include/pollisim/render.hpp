#pragma once

#include "pollisim/camera.hpp"
#include "pollisim/image.hpp"
#include "pollisim/scene.hpp"

namespace pollisim {

struct RenderParams {
    double blur_px_per_mm = 0.5;  // defocus disk radius per mm of focus error
    double max_blur_px = 30.0;
};

/// Z-buffered ray-cast rasterization of flower disk stacks, stems (capsules)
/// and leaves. Nearest surface wins per pixel. `cam_pose` maps camera-frame
/// coordinates into scene (base) coordinates. Deterministic.
Image render_color(const PlantScene& scene, const CameraModel& cam, const Pose& cam_pose);

/// Per-pixel ray range (mm) to the nearest surface, plus zero-mean Gaussian
/// noise of the given sigma on returns. Background gets the no-return
/// sentinel. Noise is a pure function of (scene seed, camera pose, pixel),
/// so identical inputs give byte-identical maps.
DepthMap render_depth(const PlantScene& scene, const CameraModel& cam, const Pose& cam_pose,
                      double noise_sigma_mm);

/// Color render (stigma pollen grains included as 1-3 px speckles) followed
/// by a defocus disk blur of radius
///   r = blur_px_per_mm * |subject distance - focal distance(zoom)|,
/// where the subject distance is the median axial depth of foreground
/// pixels. Radii below 0.5 px render sharp.
Image render_microscope(const PlantScene& scene, const CameraModel& cam, const Pose& cam_pose,
                        const MicroscopeState& state, const RenderParams& params = {});

double defocus_blur_radius_px(double subject_mm, double focal_mm, double blur_px_per_mm);

/// Normalized disk-average blur; radius < 0.5 px returns the input unchanged.
Image disk_blur(const Image& img, double radius_px);

/// Median axial (z) depth of foreground pixels seen from `cam_pose`, or 0
/// when nothing is visible. This is the subject distance the defocus model
/// uses.
double subject_distance_mm(const PlantScene& scene, const CameraModel& cam, const Pose& cam_pose);

}  // namespace pollisim
