#pragma once

#include <Eigen/Dense>
#include <string>

namespace pollisim {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Rigid transform mapping child-frame coordinates into the parent frame.
/// Translations are millimeters. Frame labels are carried along so that
/// composition across the base / camera / tool / flower chains is checked.
struct Pose {
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();
    std::string parent = "world";
    std::string child = "world";

    Vec3 apply(const Vec3& x) const { return rotation * x + translation; }
};

Pose identity_pose(const std::string& frame = "world");

/// parent->child from rotation + translation.
Pose make_pose(const Mat3& rotation, const Vec3& translation,
               const std::string& parent = "world", const std::string& child = "world");

Pose translate(const Vec3& t, const std::string& parent = "world",
               const std::string& child = "world");

Mat3 rot_x(double radians);
Mat3 rot_y(double radians);
Mat3 rot_z(double radians);

/// Rotation about an arbitrary unit axis.
Mat3 rot_axis_angle(const Vec3& axis, double radians);

/// a.child must equal b.parent; the result maps b.child into a.parent.
/// Orthonormality is re-established by SVD projection when composition
/// drift exceeds 1e-9.
Pose compose(const Pose& a, const Pose& b);

/// Inverse transform; frame labels swap.
Pose invert(const Pose& p);

Vec3 transform_point(const Pose& p, const Vec3& x);

/// Max abs entry of R*R^T - I combined with |det - 1|.
double orthonormality_defect(const Mat3& r);

/// Nearest rotation matrix in the Frobenius sense.
Mat3 nearest_rotation(const Mat3& m);

/// Geodesic distance between rotations, radians.
double rotation_angle_between(const Mat3& a, const Mat3& b);

/// true when within tol of a proper rotation.
bool is_rotation(const Mat3& r, double tol = 1e-9);

}  // namespace pollisim
