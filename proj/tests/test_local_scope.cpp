#include <doctest.h>

#include <cmath>
#include <vector>

#include "pollisim/errors.hpp"
#include "pollisim/local_scope.hpp"
#include "pollisim/render.hpp"
#include "pollisim/rng.hpp"

using namespace pollisim;

namespace {

CameraModel endoscope() {
    CameraModel cam;
    cam.fx = cam.fy = 500.0;
    cam.cx = 320.0;
    cam.cy = 240.0;
    cam.near_clip = 5.0;
    return cam;
}

PlantScene facing_flower(const Vec3& pos, std::uint64_t seed = 33) {
    PlantScene scene;
    scene.rng_seed = seed;
    FlowerInstance fl;
    fl.id = 0;
    fl.center = pos;
    fl.normal = -pos.normalized();
    fl.stem_root = fl.center + Vec3(0.15, 0.9, 0.1).normalized() * 80.0;
    scene.flowers.push_back(fl);
    return scene;
}

Detection box_detection(int u_min, int v_min, int u_max, int v_max) {
    Detection det;
    det.box = {u_min, v_min, u_max, v_max};
    det.confidence = 1.0;
    return det;
}

}  // namespace

TEST_CASE("estimate_range_from_bbox: similar-triangles evaluation") {
    const CameraModel cam = endoscope();
    // diagonal sqrt(132^2 + 99^2) = 165 px -> range = 500*33/165 = 100 mm
    const Detection det = box_detection(100, 100, 232, 199);
    CHECK(estimate_range_from_bbox(det, cam) == doctest::Approx(100.0));

    // doubled diagonal halves the range
    const Detection det2 = box_detection(100, 100, 364, 298);
    CHECK(estimate_range_from_bbox(det2, cam) == doctest::Approx(50.0));

    CHECK_THROWS_AS(estimate_range_from_bbox(box_detection(5, 5, 5, 5), cam), DomainError);
}

TEST_CASE("servo_step: setpoint gives (nearly) zero command") {
    const CameraModel cam = endoscope();
    // diagonal 165 px centered on the principal point -> range estimate 100 mm
    const Detection det = box_detection(254, 191, 386, 290);
    ServoState state;
    const ServoCommand cmd = servo_step({det}, cam, {}, state, 0.2);
    CHECK(cmd.velocity_mm_s.norm() < 0.5);
}

TEST_CASE("servo_step: lateral error scaling and sign") {
    const CameraModel cam = endoscope();
    // diagonal ~82.5 px -> range ~200 mm; center 50 px right of principal point
    const Detection det = box_detection(337, 215, 403, 264);
    ServoState state;
    const ServoCommand cmd = servo_step({det}, cam, {}, state, 0.2);
    const double range = estimate_range_from_bbox(det, cam);
    CHECK(range == doctest::Approx(200.0).epsilon(0.01));
    // lateral error = 50 px * range / f = ~20 mm; kp = 1 -> ~20 mm/s before clamping
    CHECK(cmd.velocity_mm_s.x() > 0.0);
    const double expect_x = 50.0 * range / cam.fx;  // before the speed clamp
    const Vec3 raw(expect_x, (239.5 - cam.cy) * range / cam.fy, range - 100.0);
    const Vec3 clamped = raw * std::min(1.0, 20.0 / raw.norm());
    CHECK(cmd.velocity_mm_s.x() == doctest::Approx(clamped.x()).epsilon(0.02));
}

TEST_CASE("servo_step: picks the detection closest to the image center") {
    const CameraModel cam = endoscope();
    const Detection center_det = box_detection(290, 210, 350, 270);
    const Detection side_det = box_detection(30, 30, 90, 90);
    ServoState s1, s2;
    const ServoCommand only_center = servo_step({center_det}, cam, {}, s1, 0.2);
    const ServoCommand both = servo_step({side_det, center_det}, cam, {}, s2, 0.2);
    CHECK((only_center.velocity_mm_s - both.velocity_mm_s).norm() < 1e-12);
}

TEST_CASE("servo_step: empty detections raise target-lost") {
    ServoState state;
    CHECK_THROWS_AS(servo_step({}, endoscope(), {}, state, 0.2), TargetLostError);
    CHECK_THROWS_AS(servo_step({box_detection(0, 0, 5, 5)}, endoscope(), {}, state, 0.0),
                    DomainError);
}

TEST_CASE("servo closed loop converges from 300 mm in under 200 steps") {
    const CameraModel cam = endoscope();
    const PlantScene scene = facing_flower(Vec3(30, -20, 320));
    Pose ee = identity_pose("base");
    ee.child = "endoscope";

    PdGains gains;
    ServoState state;
    const double dt = 0.2;
    int converged_at = -1;
    std::vector<double> error_norms;
    for (int step = 0; step < 200; ++step) {
        const Image img = render_color(scene, cam, ee);
        const auto dets = detect_flowers(img, {});
        REQUIRE_FALSE(dets.empty());
        const double est = estimate_range_from_bbox(dets[0], cam);
        const Vec3 flower_cam = invert(ee).apply(scene.flowers[0].center);
        const double lateral = std::hypot(flower_cam.x(), flower_cam.y());
        error_norms.push_back(std::hypot(lateral, est - gains.target_range_mm));
        if (std::abs(est - gains.target_range_mm) < 5.0 && lateral < 5.0) {
            converged_at = step;
            break;
        }
        const ServoCommand cmd = servo_step(dets, cam, gains, state, dt);
        ee.translation += ee.rotation * cmd.velocity_mm_s * dt;
    }
    REQUIRE(converged_at > 0);
    CHECK(converged_at < 200);
    // no limit cycles: error norm decreases monotonically after the transient
    for (std::size_t i = 12; i < error_norms.size(); ++i) {
        CHECK(error_norms[i] <= error_norms[i - 1] + 1e-6);
    }
}

TEST_CASE("two_view_depth: triangulation against the rendered depth oracle") {
    const CameraModel cam = endoscope();
    const PlantScene scene = facing_flower(Vec3(0, 0, 100));
    const double baseline = 5.0;
    const Pose pose_a = identity_pose("base");
    const Pose pose_b = translate(Vec3(baseline, 0, 0), "base", "world");

    const Image img_a = render_color(scene, cam, pose_a);
    const Image img_b = render_color(scene, cam, pose_b);
    const DepthMap truth = render_depth(scene, cam, pose_a, 0.0);
    const DepthMap rec = two_view_depth(img_a, img_b, baseline, cam, {});

    std::vector<double> rel_errors;
    for (int y = 0; y < rec.height(); ++y) {
        for (int x = 0; x < rec.width(); ++x) {
            if (!DepthMap::is_return(rec.at(x, y)) || !DepthMap::is_return(truth.at(x, y))) continue;
            rel_errors.push_back(std::abs(rec.at(x, y) - truth.at(x, y)) / truth.at(x, y));
        }
    }
    REQUIRE(rel_errors.size() > 500);
    std::nth_element(rel_errors.begin(), rel_errors.begin() + rel_errors.size() / 2,
                     rel_errors.end());
    const double median = rel_errors[rel_errors.size() / 2];
    MESSAGE("matched=", rel_errors.size(), " median_rel_err=", median);
    CHECK(median <= 0.02);
}

TEST_CASE("two_view_depth: identical frames give all no-return") {
    const CameraModel cam = endoscope();
    const PlantScene scene = facing_flower(Vec3(0, 0, 120));
    const Image img = render_color(scene, cam, identity_pose("base"));
    const DepthMap rec = two_view_depth(img, img, 5.0, cam, {});
    for (int y = 0; y < rec.height(); y += 7) {
        for (int x = 0; x < rec.width(); x += 7) {
            CHECK_FALSE(DepthMap::is_return(rec.at(x, y)));
        }
    }
}

TEST_CASE("two_view_depth: doubling the baseline keeps recovered depth fixed") {
    const CameraModel cam = endoscope();
    const PlantScene scene = facing_flower(Vec3(0, 0, 110));
    const Image img_a = render_color(scene, cam, identity_pose("base"));
    const Image img_b5 = render_color(scene, cam, translate(Vec3(5, 0, 0), "base", "w"));
    const Image img_b10 = render_color(scene, cam, translate(Vec3(10, 0, 0), "base", "w"));
    const DepthMap d5 = two_view_depth(img_a, img_b5, 5.0, cam, {});
    const DepthMap d10 = two_view_depth(img_a, img_b10, 10.0, cam, {});
    // disparity doubles with the baseline; with the baseline passed in, the
    // recovered depth stays put (within quantization)
    int compared = 0;
    for (int y = 200; y < 280; y += 4) {
        for (int x = 280; x < 360; x += 4) {
            if (!DepthMap::is_return(d5.at(x, y)) || !DepthMap::is_return(d10.at(x, y))) continue;
            CHECK(d5.at(x, y) == doctest::Approx(d10.at(x, y)).epsilon(0.04));
            ++compared;
        }
    }
    CHECK(compared > 50);
}

TEST_CASE("two_view_depth input validation") {
    const Image a(10, 10), b(12, 10);
    CHECK_THROWS_AS(two_view_depth(a, b, 5.0, endoscope(), {}), DomainError);
    const Image c(10, 10);
    CHECK_THROWS_AS(two_view_depth(a, c, 0.0, endoscope(), {}), DomainError);
}

TEST_CASE("extract_flower_cloud: cloud size and centroid near the true center") {
    const CameraModel cam = endoscope();
    const PlantScene scene = facing_flower(Vec3(0, 0, 100));
    const Image img_a = render_color(scene, cam, identity_pose("base"));
    const Image img_b = render_color(scene, cam, translate(Vec3(5, 0, 0), "base", "w"));
    const DepthMap depth = two_view_depth(img_a, img_b, 5.0, cam, {});
    const auto dets = detect_flowers(img_a, {});
    REQUIRE(dets.size() == 1);
    const PointCloud cloud = extract_flower_cloud(depth, dets[0], cam);
    CHECK(cloud.size() >= 100);
    CHECK((cloud.centroid() - scene.flowers[0].center).norm() < 3.0);
    CHECK(cloud.frame == "endoscope");
}

TEST_CASE("extract_flower_cloud: empty box raises") {
    DepthMap depth(64, 64);
    Detection det = box_detection(5, 5, 20, 20);
    CHECK_THROWS_AS(extract_flower_cloud(depth, det, endoscope()), EmptyCloudError);
    // boxes are clipped to the map bounds before extraction
    DepthMap with_return(64, 64);
    with_return.set(63, 63, 50.0f);
    Detection big = box_detection(30, 30, 500, 500);
    const PointCloud cloud = extract_flower_cloud(with_return, big, endoscope());
    CHECK(cloud.size() == 1);
}
