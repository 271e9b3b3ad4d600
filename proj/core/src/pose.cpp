#include "pollisim/pose.hpp"

#include <cmath>

#include "pollisim/errors.hpp"

namespace pollisim {

Pose identity_pose(const std::string& frame) {
    Pose p;
    p.parent = frame;
    p.child = frame;
    return p;
}

Pose make_pose(const Mat3& rotation, const Vec3& translation,
               const std::string& parent, const std::string& child) {
    Pose p;
    p.rotation = rotation;
    p.translation = translation;
    p.parent = parent;
    p.child = child;
    return p;
}

Pose translate(const Vec3& t, const std::string& parent, const std::string& child) {
    return make_pose(Mat3::Identity(), t, parent, child);
}

Mat3 rot_x(double radians) {
    return Eigen::AngleAxisd(radians, Vec3::UnitX()).toRotationMatrix();
}

Mat3 rot_y(double radians) {
    return Eigen::AngleAxisd(radians, Vec3::UnitY()).toRotationMatrix();
}

Mat3 rot_z(double radians) {
    return Eigen::AngleAxisd(radians, Vec3::UnitZ()).toRotationMatrix();
}

Mat3 rot_axis_angle(const Vec3& axis, double radians) {
    return Eigen::AngleAxisd(radians, axis.normalized()).toRotationMatrix();
}

double orthonormality_defect(const Mat3& r) {
    const Mat3 g = r * r.transpose() - Mat3::Identity();
    return std::max(g.cwiseAbs().maxCoeff(), std::abs(r.determinant() - 1.0));
}

Mat3 nearest_rotation(const Mat3& m) {
    Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 r = svd.matrixU() * svd.matrixV().transpose();
    if (r.determinant() < 0.0) {
        Mat3 flip = Mat3::Identity();
        flip(2, 2) = -1.0;
        r = svd.matrixU() * flip * svd.matrixV().transpose();
    }
    return r;
}

bool is_rotation(const Mat3& r, double tol) { return orthonormality_defect(r) <= tol; }

Pose compose(const Pose& a, const Pose& b) {
    if (a.child != b.parent) {
        throw FrameError("compose: frame mismatch, '" + a.child + "' vs '" + b.parent + "'");
    }
    Pose out;
    out.rotation = a.rotation * b.rotation;
    out.translation = a.rotation * b.translation + a.translation;
    out.parent = a.parent;
    out.child = b.child;
    if (orthonormality_defect(out.rotation) > 1e-9) {
        out.rotation = nearest_rotation(out.rotation);
    }
    return out;
}

Pose invert(const Pose& p) {
    Pose out;
    out.rotation = p.rotation.transpose();
    out.translation = -(out.rotation * p.translation);
    out.parent = p.child;
    out.child = p.parent;
    return out;
}

Vec3 transform_point(const Pose& p, const Vec3& x) { return p.apply(x); }

double rotation_angle_between(const Mat3& a, const Mat3& b) {
    const double c = ((a.transpose() * b).trace() - 1.0) * 0.5;
    return std::acos(std::clamp(c, -1.0, 1.0));
}

}  // namespace pollisim
