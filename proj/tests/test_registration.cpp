#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "pollisim/errors.hpp"
#include "pollisim/registration.hpp"
#include "pollisim/rng.hpp"

using namespace pollisim;

namespace {
constexpr double kDeg = std::numbers::pi / 180.0;

PointCloud apply_transform(const PointCloud& cloud, const Mat3& r, const Vec3& t) {
    PointCloud out;
    out.frame = cloud.frame;
    out.points.reserve(cloud.size());
    for (const auto& p : cloud.points) out.points.push_back(r * p + t);
    return out;
}

PointCloud add_noise(const PointCloud& cloud, double sigma_mm, Rng& rng) {
    PointCloud out = cloud;
    for (auto& p : out.points) {
        p += Vec3(rng.normal(0, sigma_mm), rng.normal(0, sigma_mm), rng.normal(0, sigma_mm));
    }
    return out;
}

// Drop `fraction` of the points on one side of a random plane (contiguous
// chunk, like a leaf covering part of the blossom).
PointCloud occlude(const PointCloud& cloud, double fraction, Rng& rng) {
    const Vec3 dir =
        Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)).normalized();
    std::vector<double> keys(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) keys[i] = cloud.points[i].dot(dir);
    std::vector<double> sorted = keys;
    const auto cut_at = static_cast<std::size_t>((1.0 - fraction) * sorted.size());
    std::nth_element(sorted.begin(), sorted.begin() + cut_at, sorted.end());
    const double cut = sorted[cut_at];
    PointCloud out;
    out.frame = cloud.frame;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (keys[i] < cut) out.points.push_back(cloud.points[i]);
    }
    return out;
}
}  // namespace

TEST_CASE("flower template is non-empty and centered") {
    const FlowerTemplate tmpl = make_flower_template();
    CHECK(tmpl.cloud.size() > 300);
    CHECK(tmpl.cloud.centroid().norm() < 2.0);
    CHECK(tmpl.canonical_normal == Vec3::UnitZ());
}

TEST_CASE("self-registration is exact to 1e-6") {
    const FlowerTemplate tmpl = make_flower_template();
    const RegistrationResult reg = register_template(tmpl.cloud, tmpl, {});
    CHECK(reg.converged);
    CHECK(reg.mse_mm2 < 1e-10);
    CHECK((reg.pose.rotation - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(reg.pose.translation.norm() < 1e-6);
    CHECK(reg.inlier_fraction == doctest::Approx(1.0));
}

TEST_CASE("known transform with noise is recovered within 2 deg / 2 mm") {
    const FlowerTemplate tmpl = make_flower_template();
    Rng rng(404);
    const Mat3 r_true = rot_z(10 * kDeg);
    const Vec3 t_true(3, -2, 5);
    const PointCloud observed = add_noise(apply_transform(tmpl.cloud, r_true, t_true), 0.5, rng);

    RegParams params;
    params.seed = 7;
    const RegistrationResult reg = register_template(observed, tmpl, params);
    CHECK(reg.converged);
    CHECK(reg.mse_mm2 < 1.0);
    CHECK(rotation_angle_between(reg.pose.rotation, r_true) < 2 * kDeg);
    CHECK((reg.pose.translation - t_true).norm() < 2.0);
}

TEST_CASE("30% occlusion before transform still recovers within 3 deg / 3 mm") {
    const FlowerTemplate tmpl = make_flower_template();
    Rng rng(911);
    const Mat3 r_true = rot_axis_angle(Vec3(0.3, -0.4, 0.85), 18 * kDeg);
    const Vec3 t_true(-6, 4, 9);
    const PointCloud occluded = occlude(tmpl.cloud, 0.30, rng);
    const PointCloud observed = add_noise(apply_transform(occluded, r_true, t_true), 0.5, rng);

    RegParams params;
    params.seed = 11;
    const RegistrationResult reg = register_template(observed, tmpl, params);
    CHECK(rotation_angle_between(reg.pose.rotation, r_true) < 3 * kDeg);
    CHECK((reg.pose.translation - t_true).norm() < 3.0);
}

TEST_CASE("registration is seed-deterministic, bit for bit") {
    const FlowerTemplate tmpl = make_flower_template();
    Rng rng(5);
    const PointCloud observed =
        add_noise(apply_transform(tmpl.cloud, rot_z(15 * kDeg), Vec3(5, 5, -3)), 0.5, rng);
    RegParams params;
    params.seed = 99;
    const RegistrationResult a = register_template(observed, tmpl, params);
    const RegistrationResult b = register_template(observed, tmpl, params);
    CHECK(a.mse_mm2 == b.mse_mm2);
    CHECK(a.inlier_fraction == b.inlier_fraction);
    CHECK((a.pose.rotation - b.pose.rotation).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.pose.translation - b.pose.translation).norm() == 0.0);
}

TEST_CASE("registration equivariance under a pre-rotation") {
    const FlowerTemplate tmpl = make_flower_template();
    Rng rng(12);
    const Mat3 r_true = rot_z(8 * kDeg);
    const Vec3 t_true(2, 1, -4);
    const PointCloud observed = add_noise(apply_transform(tmpl.cloud, r_true, t_true), 0.3, rng);

    RegParams params;
    params.seed = 3;
    const RegistrationResult base = register_template(observed, tmpl, params);
    REQUIRE(base.converged);

    const Mat3 q = rot_axis_angle(Vec3(0.2, 0.9, 0.4), 12 * kDeg);
    const Vec3 q_t(4, -7, 2);
    const PointCloud rotated = apply_transform(observed, q, q_t);
    const RegistrationResult moved = register_template(rotated, tmpl, params);
    REQUIRE(moved.converged);

    const Mat3 expect_r = q * base.pose.rotation;
    const Vec3 expect_t = q * base.pose.translation + q_t;
    CHECK(rotation_angle_between(moved.pose.rotation, expect_r) < 2 * kDeg);
    CHECK((moved.pose.translation - expect_t).norm() < 2.0);
}

TEST_CASE("degenerate clouds raise") {
    const FlowerTemplate tmpl = make_flower_template();
    PointCloud tiny;
    tiny.points = {Vec3(0, 0, 0), Vec3(1, 0, 0)};
    CHECK_THROWS_AS(register_template(tiny, tmpl, {}), RegistrationError);
}

TEST_CASE("flower_normal: identity, z-rotation invariance, x-rotation") {
    RegistrationResult reg;
    reg.converged = true;
    reg.pose = make_pose(Mat3::Identity(), Vec3::Zero());
    CHECK((flower_normal(reg) - Vec3(0, 0, 1)).norm() < 1e-12);

    reg.pose.rotation = rot_z(123 * kDeg);
    CHECK((flower_normal(reg) - Vec3(0, 0, 1)).norm() < 1e-9);

    reg.pose.rotation = rot_x(90 * kDeg);
    CHECK((flower_normal(reg) - Vec3(0, -1, 0)).norm() < 1e-9);

    reg.converged = false;
    CHECK_THROWS_AS(flower_normal(reg), DomainError);
}
