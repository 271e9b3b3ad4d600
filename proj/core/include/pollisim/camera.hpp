#pragma once

#include "pollisim/pose.hpp"

namespace pollisim {

struct PixelCoord {
    double u = 0.0;
    double v = 0.0;
};

/// Ideal pinhole intrinsics. No distortion model; depth noise lives in the
/// scene renderer.
struct CameraModel {
    double fx = 500.0;   // px
    double fy = 500.0;   // px
    double cx = 320.0;   // px
    double cy = 240.0;   // px
    int width = 640;     // px
    int height = 480;    // px
    double near_clip = 1.0;     // mm
    double far_clip = 5000.0;   // mm

    void validate() const;
};

/// u = fx*x/z + cx, v = fy*y/z + cy. Throws DomainError for z <= 0.
PixelCoord project(const CameraModel& cam, const Vec3& point_cam);

/// Inverse of project at a given axial depth z (mm), z > 0.
Vec3 backproject(const CameraModel& cam, const PixelCoord& px, double depth_mm);

/// Unit direction of the pixel ray in the camera frame (+z forward).
Vec3 pixel_ray_direction(const CameraModel& cam, const PixelCoord& px);

/// Point on the pixel ray at the given ray range (distance from the camera
/// origin, mm). Depth maps in this project store ray range, not axial z.
Vec3 range_to_point(const CameraModel& cam, const PixelCoord& px, double range_mm);

/// Ray range of a camera-frame point (plain Euclidean norm).
double point_range(const Vec3& point_cam);

}  // namespace pollisim
