#include "pollisim/scene.hpp"

#include <algorithm>
#include <cmath>

#include "pollisim/errors.hpp"
#include "pollisim/rng.hpp"

namespace pollisim {

const double kPetalExtentFraction[kPetalCount] = {1.00, 0.86, 0.95, 0.79, 0.91};
const double kPetalAngleJitterDeg[kPetalCount] = {0.0, 4.0, -3.0, 5.0, -2.0};

const FlowerInstance* PlantScene::find_flower(int id) const {
    for (const auto& f : flowers) {
        if (f.id == id) return &f;
    }
    return nullptr;
}

FlowerInstance* PlantScene::find_flower(int id) {
    for (auto& f : flowers) {
        if (f.id == id) return &f;
    }
    return nullptr;
}

void MicroscopeState::set_slide(double mm) {
    slide_mm = std::clamp(mm, kSlideMinMm, kSlideMaxMm);
}

void MicroscopeState::set_zoom(double z) { zoom = std::clamp(z, 0.0, 1.0); }

void SceneConfig::validate() const {
    if (flower_count < 0) throw ConfigError("scene: flower_count must be >= 0");
    if (petal_radius_min_mm > petal_radius_max_mm || petal_radius_min_mm <= 0.0) {
        throw ConfigError("scene: bad petal radius range");
    }
    if (stigma_radius_min_mm > stigma_radius_max_mm || stigma_radius_min_mm <= 0.0) {
        throw ConfigError("scene: bad stigma radius range");
    }
    if (anther_radius_min_mm > anther_radius_max_mm ||
        anther_radius_min_mm <= stigma_radius_max_mm) {
        throw ConfigError("scene: anther radius range must sit above the stigma range");
    }
    if (stem_tilt_deg < 0.0 || stem_tilt_deg >= 45.0) {
        throw ConfigError("scene: stem_tilt_deg must be in [0, 45)");
    }
    if (min_spacing_mm < 0.0) throw ConfigError("scene: min_spacing_mm must be >= 0");
    if (anther_pollen_initial < 0 || stigma_pollen_initial < 0) {
        throw ConfigError("scene: pollen budgets must be >= 0");
    }
    if (occlusion_prob < 0.0 || occlusion_prob > 1.0 || light_deposition_prob < 0.0 ||
        light_deposition_prob > 1.0) {
        throw ConfigError("scene: probabilities must be in [0,1]");
    }
}

namespace {

// Orthonormal basis completion: two unit vectors spanning the plane
// perpendicular to `axis`.
void plane_basis(const Vec3& axis, Vec3& u, Vec3& v) {
    const Vec3 seed = std::abs(axis.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
    u = axis.cross(seed).normalized();
    v = axis.cross(u).normalized();
}

// Unit vector within `cone_deg` of `axis`, uniform in solid angle.
Vec3 sample_cone(Rng& rng, const Vec3& axis, double cone_deg) {
    const double cos_max = std::cos(cone_deg * std::numbers::pi / 180.0);
    const double c = 1.0 - rng.uniform() * (1.0 - cos_max);
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
    Vec3 u, v;
    plane_basis(axis, u, v);
    return (axis * c + u * (s * std::cos(phi)) + v * (s * std::sin(phi))).normalized();
}

}  // namespace

PlantScene generate_scene(const SceneConfig& config, std::uint64_t seed) {
    config.validate();
    Rng rng(hash_combine(seed, 0x5ce9e5eedULL));

    PlantScene scene;
    scene.rng_seed = seed;
    scene.background = config.background;

    const Vec3 axis = config.view_axis.normalized();
    Vec3 lat_u, lat_v;
    plane_basis(axis, lat_u, lat_v);
    const Vec3 box_center = config.camera_position + axis * config.center_distance_mm;

    const int max_attempts = 1000 * std::max(1, config.flower_count);
    int attempts = 0;
    while (static_cast<int>(scene.flowers.size()) < config.flower_count) {
        if (++attempts > max_attempts) {
            throw GenerationError("generate_scene: could not place flowers with the requested spacing");
        }
        const Vec3 pos = box_center + lat_u * rng.uniform(-config.lateral_spread_mm, config.lateral_spread_mm) +
                         lat_v * rng.uniform(-config.lateral_spread_mm, config.lateral_spread_mm) +
                         axis * rng.uniform(-config.depth_spread_mm, config.depth_spread_mm);
        bool ok = true;
        for (const auto& f : scene.flowers) {
            const Vec3 d = f.center - pos;
            const Vec3 d_lat = d - axis * d.dot(axis);
            if (d.norm() < config.min_spacing_mm || d_lat.norm() < 0.8 * config.min_spacing_mm) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;

        FlowerInstance fl;
        fl.id = static_cast<int>(scene.flowers.size());
        fl.center = pos;
        // face back toward the camera, within the configured cone
        fl.normal = sample_cone(rng, (config.camera_position - pos).normalized(), config.normal_cone_deg);
        fl.spin_rad = rng.uniform(0.0, 2.0 * std::numbers::pi);
        fl.petal_radius_mm = rng.uniform(config.petal_radius_min_mm, config.petal_radius_max_mm);
        fl.stigma_radius_mm = rng.uniform(config.stigma_radius_min_mm, config.stigma_radius_max_mm);
        fl.anther_radius_mm = rng.uniform(config.anther_radius_min_mm, config.anther_radius_max_mm);
        const Vec3 stem_dir = sample_cone(rng, -fl.normal, config.stem_tilt_deg);
        fl.stem_root = fl.center + stem_dir * config.stem_length_mm;
        fl.pollen_on_anthers = config.anther_pollen_initial;
        fl.pollen_on_stigma = config.stigma_pollen_initial;
        fl.pollen_lost = 0;
        if (config.light_deposition_prob > 0.0 && rng.uniform() < config.light_deposition_prob) {
            fl.pollen_visibility = config.light_visibility;
        }
        fl.colors = config.colors;
        scene.flowers.push_back(fl);
    }

    // Backdrop foliage: leaves tucked behind the flowers, clear of every
    // camera-to-flower sightline.
    for (int i = 0; i < config.leaf_count; ++i) {
        LeafOccluder leaf;
        const Vec3 pos = box_center + lat_u * rng.uniform(-config.lateral_spread_mm, config.lateral_spread_mm) +
                         lat_v * rng.uniform(-config.lateral_spread_mm, config.lateral_spread_mm) +
                         axis * (config.depth_spread_mm + rng.uniform(60.0, 120.0));
        leaf.center = pos;
        leaf.normal = sample_cone(rng, -axis, 30.0);
        leaf.radius_mm = config.leaf_radius_mm;
        scene.leaves.push_back(leaf);
    }

    // Occlusion injection: a leaf sitting just off the camera-to-flower
    // segment, placed so the flower stays visible from the RealSense vantage
    // but is blocked from the 60% waypoint.
    if (config.occlusion_prob > 0.0) {
        for (auto& fl : scene.flowers) {
            if (rng.uniform() >= config.occlusion_prob) continue;
            const Vec3 cam = config.camera_position;
            const Vec3 seg = fl.center - cam;
            const double seg_len = seg.norm();
            const Vec3 dir = seg / seg_len;
            Vec3 u, v;
            plane_basis(dir, u, v);
            const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
            const Vec3 side = u * std::cos(phi) + v * std::sin(phi);
            LeafOccluder leaf;
            leaf.radius_mm = 30.0;
            // offset tuned against both visibility constraints (see tests)
            leaf.center = cam + dir * (0.72 * seg_len) + side * (leaf.radius_mm - 8.0);
            leaf.normal = -dir;
            scene.leaves.push_back(leaf);
        }
    }

    return scene;
}

PollenCounts apply_buzz(PlantScene& scene, int flower_id, double duration_s,
                        const BuzzParams& params) {
    FlowerInstance* fl = scene.find_flower(flower_id);
    if (fl == nullptr) throw DomainError("apply_buzz: unknown flower id");
    if (duration_s <= 0.0) throw DomainError("apply_buzz: duration must be positive");

    const double fraction = 1.0 - std::exp(-params.transfer_rate_per_s * duration_s);
    const auto moved = static_cast<std::int64_t>(
        std::floor(fraction * static_cast<double>(fl->pollen_on_anthers)));
    const auto captured = static_cast<std::int64_t>(
        std::floor(params.capture_ratio * static_cast<double>(moved)));

    fl->pollen_on_anthers -= moved;
    fl->pollen_on_stigma += captured;
    fl->pollen_lost += moved - captured;

    return {fl->pollen_on_anthers, fl->pollen_on_stigma, fl->pollen_lost};
}

}  // namespace pollisim
