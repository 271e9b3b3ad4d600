#include <doctest.h>

#include <cmath>

#include "pollisim/errors.hpp"
#include "pollisim/scene.hpp"

using namespace pollisim;

namespace {
SceneConfig small_config(int flowers) {
    SceneConfig cfg;
    cfg.flower_count = flowers;
    cfg.leaf_count = 1;
    return cfg;
}

bool scenes_equal(const PlantScene& a, const PlantScene& b) {
    if (a.flowers.size() != b.flowers.size() || a.leaves.size() != b.leaves.size()) return false;
    for (std::size_t i = 0; i < a.flowers.size(); ++i) {
        const auto& fa = a.flowers[i];
        const auto& fb = b.flowers[i];
        if (fa.center != fb.center || fa.normal != fb.normal || fa.spin_rad != fb.spin_rad ||
            fa.petal_radius_mm != fb.petal_radius_mm || fa.stem_root != fb.stem_root ||
            fa.pollen_on_anthers != fb.pollen_on_anthers) {
            return false;
        }
    }
    for (std::size_t i = 0; i < a.leaves.size(); ++i) {
        if (a.leaves[i].center != b.leaves[i].center) return false;
    }
    return true;
}
}  // namespace

TEST_CASE("generate_scene is deterministic per seed") {
    const SceneConfig cfg = small_config(6);
    const PlantScene s1 = generate_scene(cfg, 42);
    const PlantScene s2 = generate_scene(cfg, 42);
    CHECK(scenes_equal(s1, s2));
    const PlantScene s3 = generate_scene(cfg, 43);
    CHECK_FALSE(scenes_equal(s1, s3));
}

TEST_CASE("generate_scene: zero flowers gives empty list") {
    const PlantScene s = generate_scene(small_config(0), 1);
    CHECK(s.flowers.empty());
}

TEST_CASE("generate_scene: 8 flowers, spacing and invariants hold") {
    SceneConfig cfg = small_config(8);
    const PlantScene s = generate_scene(cfg, 7);
    REQUIRE(s.flowers.size() == 8);
    for (std::size_t i = 0; i < s.flowers.size(); ++i) {
        const auto& f = s.flowers[i];
        // petal radius respects the configured default range
        CHECK(f.petal_radius_mm >= 11.0);
        CHECK(f.petal_radius_mm <= 17.0);
        // stem top coincides with the flower center by construction; the
        // root must sit within 45 degrees of -normal
        const Vec3 stem_dir = (f.stem_root - f.center).normalized();
        CHECK(stem_dir.dot(-f.normal) > std::cos(45.0 * std::numbers::pi / 180.0));
        // distance from the generator camera is about 1000 mm
        CHECK(f.center.norm() > 700.0);
        CHECK(f.center.norm() < 1300.0);
        for (std::size_t j = i + 1; j < s.flowers.size(); ++j) {
            CHECK((f.center - s.flowers[j].center).norm() >= 20.0);
        }
    }
}

TEST_CASE("generate_scene: infeasible packing raises") {
    SceneConfig cfg = small_config(40);
    cfg.lateral_spread_mm = 10.0;
    cfg.depth_spread_mm = 5.0;
    cfg.min_spacing_mm = 100.0;
    CHECK_THROWS_AS(generate_scene(cfg, 3), GenerationError);
}

TEST_CASE("apply_buzz matches the closed-form transfer") {
    PlantScene scene = generate_scene(small_config(1), 5);
    auto& fl = scene.flowers[0];
    fl.pollen_on_anthers = 200000;
    fl.pollen_on_stigma = 1000;
    fl.pollen_lost = 0;

    const BuzzParams params;  // lambda = 0.23 1/s, capture 0.9
    const PollenCounts counts = apply_buzz(scene, fl.id, 10.0, params);

    // moved = floor((1 - e^{-2.3}) * 200000); captured = floor(0.9 * moved)
    const double fraction = 1.0 - std::exp(-2.3);
    const auto moved = static_cast<std::int64_t>(std::floor(fraction * 200000.0));
    const auto captured = static_cast<std::int64_t>(std::floor(0.9 * moved));
    CHECK(counts.on_stigma == 1000 + captured);
    CHECK(counts.on_anthers == 200000 - moved);
    CHECK(counts.lost == moved - captured);
    // order-of-magnitude jump: ~1e3 to >1e5
    CHECK(counts.on_stigma > 100000);
    CHECK(scene.flowers[0].pollen_budget() == 201000);
}

TEST_CASE("apply_buzz: vanishing duration moves nothing") {
    PlantScene scene = generate_scene(small_config(1), 5);
    const auto before = scene.flowers[0].pollen_on_stigma;
    const PollenCounts counts = apply_buzz(scene, 0, 1e-12);
    CHECK(counts.on_stigma == before);
    CHECK_THROWS_AS(apply_buzz(scene, 0, 0.0), DomainError);
    CHECK_THROWS_AS(apply_buzz(scene, 0, -1.0), DomainError);
}

TEST_CASE("apply_buzz: repeated buzzes are monotone and conserve pollen") {
    PlantScene scene = generate_scene(small_config(1), 9);
    const auto budget = scene.flowers[0].pollen_budget();
    auto prev_stigma = scene.flowers[0].pollen_on_stigma;
    for (int i = 0; i < 6; ++i) {
        const PollenCounts counts = apply_buzz(scene, 0, 10.0);
        CHECK(counts.on_stigma >= prev_stigma);
        if (i == 0) CHECK(counts.on_stigma > prev_stigma);
        CHECK(counts.on_anthers + counts.on_stigma + counts.lost == budget);
        CHECK(counts.on_anthers >= 0);
        prev_stigma = counts.on_stigma;
    }
}

TEST_CASE("apply_buzz: unknown flower id") {
    PlantScene scene = generate_scene(small_config(1), 5);
    CHECK_THROWS_AS(apply_buzz(scene, 123, 10.0), DomainError);
}

TEST_CASE("pollen conservation under random buzz sequences") {
    PlantScene scene = generate_scene(small_config(2), 17);
    const auto b0 = scene.flowers[0].pollen_budget();
    const auto b1 = scene.flowers[1].pollen_budget();
    for (double d : {0.5, 3.0, 10.0, 0.1, 20.0}) {
        apply_buzz(scene, 0, d);
        apply_buzz(scene, 1, d * 0.5);
        CHECK(scene.flowers[0].pollen_budget() == b0);
        CHECK(scene.flowers[1].pollen_budget() == b1);
    }
}

TEST_CASE("microscope state clamps slide and zoom") {
    MicroscopeState st;
    st.set_slide(100.0);
    CHECK(st.slide_mm == 45.0);
    st.set_slide(-3.0);
    CHECK(st.slide_mm == 0.0);
    st.set_zoom(2.0);
    CHECK(st.zoom == 1.0);
    st.set_zoom(0.25);
    CHECK(st.focal_distance_mm() ==
          doctest::Approx(st.focal_min_mm + 0.25 * (st.focal_max_mm - st.focal_min_mm)));
}
