#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "pollisim/camera.hpp"
#include "pollisim/color.hpp"
#include "pollisim/errors.hpp"
#include "pollisim/image.hpp"
#include "pollisim/image_io.hpp"
#include "pollisim/pose.hpp"
#include "pollisim/rng.hpp"

using namespace pollisim;

namespace {
constexpr double kDeg = std::numbers::pi / 180.0;

Pose random_pose(Rng& rng, const std::string& parent = "a", const std::string& child = "b") {
    const Vec3 axis = Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)).normalized();
    const Mat3 r = rot_axis_angle(axis, rng.uniform(0.0, std::numbers::pi));
    const Vec3 t(rng.uniform(-500, 500), rng.uniform(-500, 500), rng.uniform(-500, 500));
    return make_pose(r, t, parent, child);
}
}  // namespace

TEST_CASE("compose: identity, inverse rotations, translations add") {
    const Pose p = make_pose(rot_z(30 * kDeg), Vec3(1, 2, 3), "w", "w");
    const Pose id = identity_pose("w");
    const Pose c = compose(id, p);
    CHECK((c.rotation - p.rotation).norm() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK((c.translation - p.translation).norm() == doctest::Approx(0.0).epsilon(1e-12));

    const Pose a = make_pose(rot_z(90 * kDeg), Vec3::Zero(), "w", "w");
    const Pose b = make_pose(rot_z(-90 * kDeg), Vec3::Zero(), "w", "w");
    const Pose ab = compose(a, b);
    CHECK(orthonormality_defect(ab.rotation) < 1e-12);
    CHECK((ab.rotation - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);

    const Pose t1 = translate(Vec3(1, 2, 3), "w", "w");
    const Pose t2 = translate(Vec3(4, 5, 6), "w", "w");
    CHECK((compose(t1, t2).translation - Vec3(5, 7, 9)).norm() < 1e-12);
}

TEST_CASE("compose rejects frame mismatch") {
    const Pose a = make_pose(Mat3::Identity(), Vec3::Zero(), "base", "cam");
    const Pose b = make_pose(Mat3::Identity(), Vec3::Zero(), "tool", "flower");
    CHECK_THROWS_AS(compose(a, b), FrameError);
}

TEST_CASE("invert: trivial cases and compose-to-identity oracle") {
    CHECK((invert(identity_pose()).translation).norm() == 0.0);
    CHECK((invert(translate(Vec3(1, 0, 0))).translation - Vec3(-1, 0, 0)).norm() < 1e-15);

    // Rz(30)*translate(t), checked via the compose oracle
    const Pose p = make_pose(rot_z(30 * kDeg), Vec3(10, -4, 2), "a", "b");
    const Pose ident = compose(p, invert(p));
    CHECK((ident.rotation - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(ident.translation.norm() < 1e-9);
    CHECK(ident.parent == "a");
    CHECK(ident.child == "a");

    Rng rng(7);
    for (int i = 0; i < 100; ++i) {
        const Pose q = random_pose(rng);
        const Pose ii = compose(q, invert(q));
        CHECK((ii.rotation - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-9);
        CHECK(ii.translation.norm() < 1e-9);
    }
}

TEST_CASE("rigidity: transform_point preserves pairwise distances") {
    Rng rng(99);
    for (int i = 0; i < 200; ++i) {
        const Pose p = random_pose(rng);
        const Vec3 x(rng.uniform(-100, 100), rng.uniform(-100, 100), rng.uniform(-100, 100));
        const Vec3 y(rng.uniform(-100, 100), rng.uniform(-100, 100), rng.uniform(-100, 100));
        const double before = (x - y).norm();
        const double after = (transform_point(p, x) - transform_point(p, y)).norm();
        CHECK(std::abs(before - after) < 1e-9);
    }
}

TEST_CASE("orthonormality maintained over long composition chains") {
    Rng rng(3);
    Pose acc = identity_pose("w");
    for (int i = 0; i < 2000; ++i) {
        acc = compose(acc, random_pose(rng, "w", "w"));
    }
    CHECK(orthonormality_defect(acc.rotation) < 1e-9);
}

TEST_CASE("project: principal point, hand pinhole evaluation, behind camera") {
    CameraModel cam;
    cam.fx = 500;
    cam.fy = 500;
    cam.cx = 320;
    cam.cy = 240;

    for (double d : {1.0, 57.0, 4000.0}) {
        const PixelCoord px = project(cam, Vec3(0, 0, d));
        CHECK(px.u == doctest::Approx(320.0));
        CHECK(px.v == doctest::Approx(240.0));
    }
    // fx=500, cx=320: (10,0,100) -> u = 500*10/100 + 320 = 370
    const PixelCoord px = project(cam, Vec3(10, 0, 100));
    CHECK(px.u == doctest::Approx(370.0));
    CHECK_THROWS_AS(project(cam, Vec3(1, 1, 0.0)), DomainError);
    CHECK_THROWS_AS(project(cam, Vec3(1, 1, -5.0)), DomainError);
}

TEST_CASE("backproject: optical axis, round trip property, bad depth") {
    CameraModel cam;
    const Vec3 p = backproject(cam, {cam.cx, cam.cy}, 100.0);
    CHECK((p - Vec3(0, 0, 100)).norm() < 1e-12);
    CHECK_THROWS_AS(backproject(cam, {10, 10}, 0.0), DomainError);

    // project(backproject(px, d)) == px within 1e-6 px, 1000 random samples
    Rng rng(2024);
    for (int i = 0; i < 1000; ++i) {
        const PixelCoord px{rng.uniform(0, cam.width - 1), rng.uniform(0, cam.height - 1)};
        const double depth = rng.uniform(10.0, 3000.0);
        const PixelCoord back = project(cam, backproject(cam, px, depth));
        CHECK(std::abs(back.u - px.u) < 1e-6);
        CHECK(std::abs(back.v - px.v) < 1e-6);
    }
}

TEST_CASE("range_to_point is consistent with ray range") {
    CameraModel cam;
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        const PixelCoord px{rng.uniform(0, cam.width - 1), rng.uniform(0, cam.height - 1)};
        const double range = rng.uniform(10.0, 2000.0);
        const Vec3 p = range_to_point(cam, px, range);
        CHECK(p.norm() == doctest::Approx(range).epsilon(1e-12));
        const PixelCoord back = project(cam, p);
        CHECK(std::abs(back.u - px.u) < 1e-6);
        CHECK(std::abs(back.v - px.v) < 1e-6);
    }
}

TEST_CASE("rgb_to_hsv: black, pure red, gray") {
    CHECK(rgb_to_hsv({0, 0, 0}) == Hsv8{0, 0, 0});
    CHECK(rgb_to_hsv({255, 0, 0}) == Hsv8{0, 255, 255});
    CHECK(rgb_to_hsv({128, 128, 128}) == Hsv8{0, 0, 128});
}

TEST_CASE("rgb_to_hsv: S=0 iff gray, V = max channel, H below 180") {
    Rng rng(11);
    for (int i = 0; i < 5000; ++i) {
        const Rgb8 c{static_cast<std::uint8_t>(rng.uniform_index(256)),
                     static_cast<std::uint8_t>(rng.uniform_index(256)),
                     static_cast<std::uint8_t>(rng.uniform_index(256))};
        const Hsv8 hsv = rgb_to_hsv(c);
        CHECK(hsv.v == std::max({c.r, c.g, c.b}));
        CHECK(hsv.h < 180);
        if (c.r == c.g && c.g == c.b) CHECK(hsv.s == 0);
    }
    const Hsv8 g = rgb_to_hsv({77, 77, 77});
    CHECK(g.s == 0);
    CHECK(g.v == 77);
}

TEST_CASE("image io round trips") {
    const auto dir = std::filesystem::temp_directory_path();
    Image img(17, 9);
    Rng rng(1);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            img.set(x, y, {static_cast<std::uint8_t>(rng.uniform_index(256)),
                           static_cast<std::uint8_t>(rng.uniform_index(256)),
                           static_cast<std::uint8_t>(rng.uniform_index(256))});
        }
    }
    const std::string ppm = (dir / "pollisim_test.ppm").string();
    write_ppm(img, ppm);
    CHECK(read_ppm(ppm) == img);

    DepthMap depth(13, 7);
    depth.set(3, 2, 1234.0f);
    depth.set(0, 0, 42.0f);
    const std::string pgm = (dir / "pollisim_test.pgm").string();
    write_pgm16(depth, pgm);
    const DepthMap back = read_pgm16(pgm);
    CHECK(back.at(3, 2) == 1234.0f);
    CHECK(back.at(0, 0) == 42.0f);
    CHECK_FALSE(DepthMap::is_return(back.at(5, 5)));
    std::remove(ppm.c_str());
    std::remove(pgm.c_str());
}
