#include "pollisim/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "pollisim/errors.hpp"
#include "pollisim/rng.hpp"

namespace pollisim {

namespace {

constexpr double kTextureCellMm = 0.5;
constexpr double kRayEps = 1e-9;

// Brightness jitter amplitude per surface kind; gives the block matcher and
// the focus score something to bite on without leaving any HSV band.
enum class Surface : std::uint8_t { Petal = 1, Anther = 2, Stigma = 3, Stem = 4, Leaf = 5 };

int texture_amplitude(Surface s) {
    switch (s) {
        case Surface::Petal: return 6;
        case Surface::Anther: return 8;
        case Surface::Stigma: return 9;
        case Surface::Stem: return 4;
        case Surface::Leaf: return 5;
    }
    return 0;
}

struct DiskPrim {
    Vec3 center_cam;
    Vec3 normal_cam;
    double r_inner = 0.0;
    double r_outer = 0.0;
    Rgb8 color;
    Surface kind = Surface::Petal;
};

struct CapsulePrim {
    Vec3 a_cam;
    Vec3 b_cam;
    double radius = 0.0;
    Rgb8 color;
    Surface kind = Surface::Stem;
};

struct Speckle {
    Vec3 pos_cam;
    double radius_mm = 0.0;
    Rgb8 color;
    int pixel_area = 0;  // 0: size from projection; 1-3: fixed speckle footprint
};

// In-plane basis of a flower, spin included, so petal layout and grain
// placement stay welded to the blossom.
void flower_basis(const FlowerInstance& fl, Vec3& u, Vec3& v) {
    const Vec3 seed = std::abs(fl.normal.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
    Vec3 u0 = fl.normal.cross(seed).normalized();
    Vec3 v0 = fl.normal.cross(u0).normalized();
    const double c = std::cos(fl.spin_rad);
    const double s = std::sin(fl.spin_rad);
    u = u0 * c + v0 * s;
    v = -u0 * s + v0 * c;
}

struct FramePrims {
    std::vector<DiskPrim> disks;
    std::vector<CapsulePrim> capsules;
    std::vector<Speckle> speckles;
};

void append_flower_prims(const FlowerInstance& fl, const Pose& base_to_cam, FramePrims& out) {
    Vec3 u, v;
    flower_basis(fl, u, v);
    const FlowerShapeParams shape = fl.shape();

    auto to_cam_point = [&](const Vec3& p) { return base_to_cam.apply(p); };
    const Vec3 n_cam = base_to_cam.rotation * fl.normal;

    for (int k = 0; k < kPetalCount; ++k) {
        const double extent = fl.petal_radius_mm * kPetalExtentFraction[k];
        const double disk_r = 0.45 * extent;
        const double ang = (72.0 * k + kPetalAngleJitterDeg[k]) * std::numbers::pi / 180.0;
        const Vec3 dir = u * std::cos(ang) + v * std::sin(ang);
        DiskPrim d;
        d.center_cam = to_cam_point(fl.center + dir * (extent - disk_r));
        d.normal_cam = n_cam;
        d.r_inner = 0.0;
        d.r_outer = disk_r;
        d.color = fl.colors.petal;
        d.kind = Surface::Petal;
        out.disks.push_back(d);
    }
    {
        DiskPrim d;  // anther annulus
        d.center_cam = to_cam_point(fl.center + fl.normal * shape.anther_lift_mm);
        d.normal_cam = n_cam;
        d.r_inner = fl.stigma_radius_mm;
        d.r_outer = fl.anther_radius_mm;
        d.color = fl.colors.anther;
        d.kind = Surface::Anther;
        out.disks.push_back(d);
    }
    {
        DiskPrim d;  // stigma disk
        d.center_cam = to_cam_point(fl.center + fl.normal * shape.stigma_lift_mm);
        d.normal_cam = n_cam;
        d.r_inner = 0.0;
        d.r_outer = fl.stigma_radius_mm;
        d.color = fl.colors.stigma;
        d.kind = Surface::Stigma;
        out.disks.push_back(d);
    }
    {
        CapsulePrim c;
        c.a_cam = to_cam_point(fl.center);
        c.b_cam = to_cam_point(fl.stem_root);
        c.radius = fl.stem_radius_mm;
        c.color = Rgb8{40, 120, 50};
        c.kind = Surface::Stem;
        out.capsules.push_back(c);
    }
}

// Stigma surface detail (papillae) plus deposited pollen grains. Both are
// physically sized, so they only resolve at microscope working distances.
void append_flower_speckles(const FlowerInstance& fl, std::uint64_t scene_seed,
                            const Pose& base_to_cam, FramePrims& out) {
    Vec3 u, v;
    flower_basis(fl, u, v);
    const FlowerShapeParams shape = fl.shape();
    const Vec3 top = fl.center + fl.normal * shape.stigma_lift_mm;

    auto sample_on_stigma = [&](std::uint64_t salt, std::uint64_t index, double lift) {
        const std::uint64_t k = hash_combine(hash_combine(scene_seed, salt),
                                             hash_combine(static_cast<std::uint64_t>(fl.id), index));
        const double r = fl.stigma_radius_mm * std::sqrt(hashed_uniform(k));
        const double th = 2.0 * std::numbers::pi * hashed_uniform(splitmix64(k));
        return top + u * (r * std::cos(th)) + v * (r * std::sin(th)) + fl.normal * lift;
    };

    const Rgb8 papilla{160, 125, 0};
    const double area = std::numbers::pi * fl.stigma_radius_mm * fl.stigma_radius_mm;
    const auto papilla_count = static_cast<std::uint64_t>(100.0 * area);
    for (std::uint64_t i = 0; i < papilla_count; ++i) {
        Speckle s;
        s.pos_cam = base_to_cam.apply(sample_on_stigma(0x9a9111a5ULL, i, 0.02));
        s.radius_mm = 0.0;  // filled below
        const std::uint64_t k = hash_combine(hash_combine(scene_seed, 0x9a11ULL), i);
        s.radius_mm = 0.010 + 0.008 * hashed_uniform(k);
        s.color = papilla;
        out.speckles.push_back(s);
    }

    const auto visible = static_cast<std::uint64_t>(
        std::max(0.0, fl.pollen_visibility) * static_cast<double>(fl.pollen_on_stigma));
    for (std::uint64_t i = 0; i < visible; ++i) {
        Speckle s;
        s.pos_cam = base_to_cam.apply(sample_on_stigma(0x9011e4ULL, i, 0.05));
        const std::uint64_t k = hash_combine(hash_combine(scene_seed, 0x512eULL), i);
        const double t = hashed_uniform(k);
        s.radius_mm = 0.008;
        s.pixel_area = t < 0.7 ? 1 : (t < 0.9 ? 2 : 3);
        s.color = fl.colors.pollen;
        out.speckles.push_back(s);
    }
}

double ray_disk(const Vec3& dir, const DiskPrim& d) {
    const double denom = d.normal_cam.dot(dir);
    if (std::abs(denom) < kRayEps) return -1.0;
    const double t = d.normal_cam.dot(d.center_cam) / denom;
    if (t <= 0.0) return -1.0;
    const Vec3 p = dir * t;
    const double rad = (p - d.center_cam).norm();
    if (rad < d.r_inner || rad > d.r_outer) return -1.0;
    return t;
}

double ray_sphere(const Vec3& dir, const Vec3& c, double r) {
    const double b = dir.dot(c);
    const double disc = b * b - c.squaredNorm() + r * r;
    if (disc < 0.0) return -1.0;
    const double s = std::sqrt(disc);
    const double t0 = b - s;
    if (t0 > 0.0) return t0;
    const double t1 = b + s;
    return t1 > 0.0 ? t1 : -1.0;
}

double ray_capsule(const Vec3& dir, const CapsulePrim& cap) {
    const Vec3 ab = cap.b_cam - cap.a_cam;
    const double len = ab.norm();
    if (len < kRayEps) return ray_sphere(dir, cap.a_cam, cap.radius);
    const Vec3 axis = ab / len;

    // infinite cylinder
    const Vec3 d_perp = dir - axis * dir.dot(axis);
    const Vec3 m = -cap.a_cam;
    const Vec3 m_perp = m - axis * m.dot(axis);
    const double a = d_perp.squaredNorm();
    double best = std::numeric_limits<double>::infinity();
    if (a > kRayEps) {
        const double b = m_perp.dot(d_perp);
        const double c = m_perp.squaredNorm() - cap.radius * cap.radius;
        const double disc = b * b - a * c;
        if (disc >= 0.0) {
            const double s = std::sqrt(disc);
            for (double t : {(-b - s) / a, (-b + s) / a}) {
                if (t <= 0.0) continue;
                const double axial = (dir * t - cap.a_cam).dot(axis);
                if (axial >= 0.0 && axial <= len && t < best) best = t;
            }
        }
    }
    for (const Vec3& end : {cap.a_cam, cap.b_cam}) {
        const double t = ray_sphere(dir, end, cap.radius);
        if (t > 0.0 && t < best) best = t;
    }
    return std::isfinite(best) ? best : -1.0;
}

Rgb8 textured_color(Rgb8 base, Surface kind, const Vec3& p_world, std::uint64_t scene_seed) {
    const int amp = texture_amplitude(kind);
    if (amp == 0) return base;
    const auto qx = static_cast<std::int64_t>(std::floor(p_world.x() / kTextureCellMm));
    const auto qy = static_cast<std::int64_t>(std::floor(p_world.y() / kTextureCellMm));
    const auto qz = static_cast<std::int64_t>(std::floor(p_world.z() / kTextureCellMm));
    std::uint64_t k = hash_combine(scene_seed, static_cast<std::uint64_t>(kind));
    k = hash_combine(k, static_cast<std::uint64_t>(qx) * 0x8da6b343ULL);
    k = hash_combine(k, static_cast<std::uint64_t>(qy) * 0xd8163841ULL);
    k = hash_combine(k, static_cast<std::uint64_t>(qz) * 0xcb1ab31fULL);
    const int delta = static_cast<int>(splitmix64(k) % (2 * amp + 1)) - amp;
    auto shift = [delta](std::uint8_t c) {
        return static_cast<std::uint8_t>(std::clamp(static_cast<int>(c) + delta, 0, 255));
    };
    return {shift(base.r), shift(base.g), shift(base.b)};
}

struct Raster {
    Image color;
    DepthMap range;              // ray range per pixel
    std::vector<float> axial_z;  // axial depth of foreground pixels (unordered)
};

FramePrims gather_prims(const PlantScene& scene, const Pose& cam_pose, bool with_speckles) {
    const Pose base_to_cam = invert(cam_pose);
    FramePrims prims;
    for (const auto& fl : scene.flowers) {
        append_flower_prims(fl, base_to_cam, prims);
        if (with_speckles) append_flower_speckles(fl, scene.rng_seed, base_to_cam, prims);
    }
    for (const auto& leaf : scene.leaves) {
        DiskPrim d;
        d.center_cam = base_to_cam.apply(leaf.center);
        d.normal_cam = base_to_cam.rotation * leaf.normal;
        d.r_inner = 0.0;
        d.r_outer = leaf.radius_mm;
        d.color = leaf.color;
        d.kind = Surface::Leaf;
        prims.disks.push_back(d);
    }
    return prims;
}

// Conservative pixel bounds of a camera-frame bounding sphere.
bool sphere_bounds(const CameraModel& cam, const Vec3& c, double r, int& x0, int& y0, int& x1,
                   int& y1) {
    if (c.z() + r <= cam.near_clip) return false;
    const double z_min = std::max(cam.near_clip, c.z() - r);
    if (c.z() <= 0.0) {  // center behind the image plane: give up on tight bounds
        x0 = 0;
        y0 = 0;
        x1 = cam.width - 1;
        y1 = cam.height - 1;
        return true;
    }
    const double u = cam.fx * c.x() / c.z() + cam.cx;
    const double v = cam.fy * c.y() / c.z() + cam.cy;
    const double hu = cam.fx * r / z_min + 2.0;
    const double hv = cam.fy * r / z_min + 2.0;
    x0 = std::max(0, static_cast<int>(std::floor(u - hu)));
    y0 = std::max(0, static_cast<int>(std::floor(v - hv)));
    x1 = std::min(cam.width - 1, static_cast<int>(std::ceil(u + hu)));
    y1 = std::min(cam.height - 1, static_cast<int>(std::ceil(v + hv)));
    return x0 <= x1 && y0 <= y1;
}

Raster raster_scene(const PlantScene& scene, const CameraModel& cam, const Pose& cam_pose,
                    bool with_speckles) {
    cam.validate();
    Raster out;
    out.color = Image(cam.width, cam.height, scene.background);
    out.range = DepthMap(cam.width, cam.height);
    std::vector<float> zbuf(static_cast<std::size_t>(cam.width) * cam.height,
                            std::numeric_limits<float>::infinity());

    const FramePrims prims = gather_prims(scene, cam_pose, with_speckles);

    auto shade = [&](int x, int y, double t, const Vec3& dir, Rgb8 base, Surface kind) {
        const std::size_t i = static_cast<std::size_t>(y) * cam.width + x;
        if (t >= zbuf[i]) return;
        const Vec3 p_cam = dir * t;
        if (p_cam.z() < cam.near_clip || t > cam.far_clip) return;
        zbuf[i] = static_cast<float>(t);
        out.range.data()[i] = static_cast<float>(t);
        const Vec3 p_world = cam_pose.apply(p_cam);
        out.color.set(x, y, textured_color(base, kind, p_world, scene.rng_seed));
    };

    for (const auto& d : prims.disks) {
        int x0, y0, x1, y1;
        if (!sphere_bounds(cam, d.center_cam, d.r_outer, x0, y0, x1, y1)) continue;
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const Vec3 dir = pixel_ray_direction(cam, {static_cast<double>(x), static_cast<double>(y)});
                const double t = ray_disk(dir, d);
                if (t > 0.0) shade(x, y, t, dir, d.color, d.kind);
            }
        }
    }
    for (const auto& c : prims.capsules) {
        const Vec3 mid = 0.5 * (c.a_cam + c.b_cam);
        const double r = 0.5 * (c.a_cam - c.b_cam).norm() + c.radius;
        int x0, y0, x1, y1;
        if (!sphere_bounds(cam, mid, r, x0, y0, x1, y1)) continue;
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const Vec3 dir = pixel_ray_direction(cam, {static_cast<double>(x), static_cast<double>(y)});
                const double t = ray_capsule(dir, c);
                if (t > 0.0) shade(x, y, t, dir, c.color, c.kind);
            }
        }
    }

    // Surface speckles: splatted after the z-buffer is final, color only.
    for (const auto& s : prims.speckles) {
        if (s.pos_cam.z() <= cam.near_clip) continue;
        const double proj_r = 0.5 * (cam.fx + cam.fy) * s.radius_mm / s.pos_cam.z();
        if (proj_r < 0.4) continue;  // unresolvable at this working distance
        const PixelCoord px = {cam.fx * s.pos_cam.x() / s.pos_cam.z() + cam.cx,
                               cam.fy * s.pos_cam.y() / s.pos_cam.z() + cam.cy};
        const int x0 = static_cast<int>(std::lround(px.u));
        const int y0 = static_cast<int>(std::lround(px.v));
        const float t = static_cast<float>(s.pos_cam.norm());
        auto put = [&](int x, int y) {
            if (x < 0 || y < 0 || x >= cam.width || y >= cam.height) return;
            const std::size_t i = static_cast<std::size_t>(y) * cam.width + x;
            if (zbuf[i] + 0.5f < t) return;  // behind an occluder
            out.color.set(x, y, s.color);
        };
        if (s.pixel_area > 0) {  // fixed 1-3 px footprint
            put(x0, y0);
            if (s.pixel_area >= 2) put(x0 + 1, y0);
            if (s.pixel_area >= 3) put(x0, y0 + 1);
        } else {  // physical footprint from projection
            const int size = std::clamp(static_cast<int>(std::lround(2.0 * proj_r)), 1, 3);
            for (int y = y0 - size / 2; y < y0 - size / 2 + size; ++y) {
                for (int x = x0 - size / 2; x < x0 - size / 2 + size; ++x) put(x, y);
            }
        }
    }

    out.axial_z.reserve(1024);
    for (std::size_t i = 0; i < zbuf.size(); ++i) {
        if (std::isfinite(zbuf[i])) {
            const int x = static_cast<int>(i % cam.width);
            const int y = static_cast<int>(i / cam.width);
            const Vec3 dir = pixel_ray_direction(cam, {static_cast<double>(x), static_cast<double>(y)});
            out.axial_z.push_back(static_cast<float>(zbuf[i] * dir.z()));
        }
    }
    return out;
}

}  // namespace

Image render_color(const PlantScene& scene, const CameraModel& cam, const Pose& cam_pose) {
    return raster_scene(scene, cam, cam_pose, true).color;
}

DepthMap render_depth(const PlantScene& scene, const CameraModel& cam, const Pose& cam_pose,
                      double noise_sigma_mm) {
    if (noise_sigma_mm < 0.0) throw DomainError("render_depth: noise sigma must be >= 0");
    Raster r = raster_scene(scene, cam, cam_pose, false);
    if (noise_sigma_mm > 0.0) {
        std::uint64_t pose_salt = scene.rng_seed;
        for (int i = 0; i < 3; ++i) {
            std::uint64_t bits;
            const double v = cam_pose.translation[i];
            std::memcpy(&bits, &v, sizeof bits);
            pose_salt = hash_combine(pose_salt, bits);
        }
        auto& data = r.range.data();
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (!DepthMap::is_return(data[i])) continue;
            const double noisy =
                data[i] + noise_sigma_mm * hashed_normal(hash_combine(pose_salt, i));
            data[i] = static_cast<float>(std::clamp(noisy, 1e-3, cam.far_clip));
        }
    }
    return r.range;
}

double defocus_blur_radius_px(double subject_mm, double focal_mm, double blur_px_per_mm) {
    return blur_px_per_mm * std::abs(subject_mm - focal_mm);
}

Image disk_blur(const Image& img, double radius_px) {
    if (radius_px < 0.5 || img.empty()) return img;
    const int w = img.width();
    const int h = img.height();
    const int ri = static_cast<int>(std::floor(radius_px));

    // per-row prefix sums per channel
    std::vector<std::uint32_t> prefix(static_cast<std::size_t>(h) * (w + 1) * 3, 0);
    const auto& src = img.data();
    for (int y = 0; y < h; ++y) {
        std::uint32_t acc[3] = {0, 0, 0};
        const std::size_t row = static_cast<std::size_t>(y) * (w + 1) * 3;
        for (int x = 0; x < w; ++x) {
            const std::size_t s = (static_cast<std::size_t>(y) * w + x) * 3;
            for (int c = 0; c < 3; ++c) {
                acc[c] += src[s + c];
                prefix[row + static_cast<std::size_t>(x + 1) * 3 + c] = acc[c];
            }
        }
    }

    std::vector<int> half(static_cast<std::size_t>(ri) + 1);
    for (int dy = 0; dy <= ri; ++dy) {
        half[static_cast<std::size_t>(dy)] =
            static_cast<int>(std::floor(std::sqrt(std::max(0.0, radius_px * radius_px - dy * dy))));
    }

    Image out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::uint32_t sum[3] = {0, 0, 0};
            std::uint32_t count = 0;
            for (int dy = -ri; dy <= ri; ++dy) {
                const int yy = y + dy;
                if (yy < 0 || yy >= h) continue;
                const int hw = half[static_cast<std::size_t>(std::abs(dy))];
                const int xa = std::max(0, x - hw);
                const int xb = std::min(w - 1, x + hw);
                const std::size_t row = static_cast<std::size_t>(yy) * (w + 1) * 3;
                for (int c = 0; c < 3; ++c) {
                    sum[c] += prefix[row + static_cast<std::size_t>(xb + 1) * 3 + c] -
                              prefix[row + static_cast<std::size_t>(xa) * 3 + c];
                }
                count += static_cast<std::uint32_t>(xb - xa + 1);
            }
            out.set(x, y,
                    {static_cast<std::uint8_t>((sum[0] + count / 2) / count),
                     static_cast<std::uint8_t>((sum[1] + count / 2) / count),
                     static_cast<std::uint8_t>((sum[2] + count / 2) / count)});
        }
    }
    return out;
}

double subject_distance_mm(const PlantScene& scene, const CameraModel& cam, const Pose& cam_pose) {
    Raster r = raster_scene(scene, cam, cam_pose, false);
    if (r.axial_z.empty()) return 0.0;
    auto mid = r.axial_z.begin() + static_cast<std::ptrdiff_t>(r.axial_z.size() / 2);
    std::nth_element(r.axial_z.begin(), mid, r.axial_z.end());
    return static_cast<double>(*mid);
}

Image render_microscope(const PlantScene& scene, const CameraModel& cam, const Pose& cam_pose,
                        const MicroscopeState& state, const RenderParams& params) {
    Raster r = raster_scene(scene, cam, cam_pose, true);
    if (r.axial_z.empty()) return r.color;
    auto mid = r.axial_z.begin() + static_cast<std::ptrdiff_t>(r.axial_z.size() / 2);
    std::nth_element(r.axial_z.begin(), mid, r.axial_z.end());
    const double subject = static_cast<double>(*mid);
    const double radius = std::min(
        params.max_blur_px,
        defocus_blur_radius_px(subject, state.focal_distance_mm(), params.blur_px_per_mm));
    return disk_blur(r.color, radius);
}

}  // namespace pollisim
