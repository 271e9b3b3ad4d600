#include "pollisim/camera.hpp"

#include "pollisim/errors.hpp"

namespace pollisim {

void CameraModel::validate() const {
    if (fx <= 0.0 || fy <= 0.0) throw DomainError("camera: focal lengths must be positive");
    if (width <= 0 || height <= 0) throw DomainError("camera: image size must be positive");
    if (cx < 0.0 || cx >= width || cy < 0.0 || cy >= height) {
        throw DomainError("camera: principal point outside image");
    }
    if (!(near_clip < far_clip)) throw DomainError("camera: near clip must be below far clip");
}

PixelCoord project(const CameraModel& cam, const Vec3& p) {
    if (p.z() <= 0.0) throw DomainError("project: point behind camera (z <= 0)");
    return {cam.fx * p.x() / p.z() + cam.cx, cam.fy * p.y() / p.z() + cam.cy};
}

Vec3 backproject(const CameraModel& cam, const PixelCoord& px, double depth_mm) {
    if (depth_mm <= 0.0) throw DomainError("backproject: depth must be positive");
    return {(px.u - cam.cx) / cam.fx * depth_mm, (px.v - cam.cy) / cam.fy * depth_mm, depth_mm};
}

Vec3 pixel_ray_direction(const CameraModel& cam, const PixelCoord& px) {
    const Vec3 d((px.u - cam.cx) / cam.fx, (px.v - cam.cy) / cam.fy, 1.0);
    return d.normalized();
}

Vec3 range_to_point(const CameraModel& cam, const PixelCoord& px, double range_mm) {
    if (range_mm <= 0.0) throw DomainError("range_to_point: range must be positive");
    return pixel_ray_direction(cam, px) * range_mm;
}

double point_range(const Vec3& p) { return p.norm(); }

}  // namespace pollisim
