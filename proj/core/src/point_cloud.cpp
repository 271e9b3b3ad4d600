#include "pollisim/point_cloud.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include "pollisim/errors.hpp"

namespace pollisim {

Vec3 PointCloud::centroid() const {
    Vec3 c = Vec3::Zero();
    for (const auto& p : points) c += p;
    return points.empty() ? c : Vec3(c / static_cast<double>(points.size()));
}

PointCloud transform_cloud(const Pose& pose, const PointCloud& cloud) {
    PointCloud out;
    out.frame = pose.parent;
    out.points.reserve(cloud.points.size());
    for (const auto& p : cloud.points) out.points.push_back(pose.apply(p));
    return out;
}

PointCloud voxel_downsample(const PointCloud& cloud, double voxel_mm) {
    if (voxel_mm <= 0.0) throw DomainError("voxel_downsample: voxel size must be positive");
    struct Acc {
        Vec3 sum = Vec3::Zero();
        int n = 0;
    };
    // std::map keeps voxel traversal order deterministic.
    std::map<std::tuple<int, int, int>, Acc> voxels;
    for (const auto& p : cloud.points) {
        const auto k = std::make_tuple(static_cast<int>(std::floor(p.x() / voxel_mm)),
                                       static_cast<int>(std::floor(p.y() / voxel_mm)),
                                       static_cast<int>(std::floor(p.z() / voxel_mm)));
        auto& acc = voxels[k];
        acc.sum += p;
        acc.n += 1;
    }
    PointCloud out;
    out.frame = cloud.frame;
    out.points.reserve(voxels.size());
    for (const auto& [k, acc] : voxels) out.points.push_back(acc.sum / acc.n);
    return out;
}

void write_xyz(const PointCloud& cloud, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DomainError("write_xyz: cannot open " + path);
    for (const auto& p : cloud.points) {
        out << p.x() << " " << p.y() << " " << p.z() << "\n";
    }
}

PointCloud read_xyz(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("read_xyz: cannot open " + path);
    PointCloud cloud;
    double x, y, z;
    while (in >> x >> y >> z) cloud.points.emplace_back(x, y, z);
    return cloud;
}

NeighborGrid::NeighborGrid(const std::vector<Vec3>& points, double cell_mm)
    : points_(points), cell_(cell_mm) {
    cells_.reserve(points.size() * 2);
    for (int i = 0; i < static_cast<int>(points.size()); ++i) {
        const auto& p = points[static_cast<std::size_t>(i)];
        cells_[key(static_cast<int>(std::floor(p.x() / cell_)),
                   static_cast<int>(std::floor(p.y() / cell_)),
                   static_cast<int>(std::floor(p.z() / cell_)))]
            .push_back(i);
    }
}

std::int64_t NeighborGrid::key(int ix, int iy, int iz) const {
    // 21 bits per axis, offset to keep indices positive
    const std::int64_t bias = 1 << 20;
    return ((static_cast<std::int64_t>(ix) + bias) << 42) |
           ((static_cast<std::int64_t>(iy) + bias) << 21) |
           (static_cast<std::int64_t>(iz) + bias);
}

int NeighborGrid::nearest(const Vec3& q, double max_dist_mm) const {
    const int cx = static_cast<int>(std::floor(q.x() / cell_));
    const int cy = static_cast<int>(std::floor(q.y() / cell_));
    const int cz = static_cast<int>(std::floor(q.z() / cell_));
    const int reach = std::max(1, static_cast<int>(std::ceil(max_dist_mm / cell_)));
    double best_sq = max_dist_mm * max_dist_mm;
    int best = -1;
    for (int dx = -reach; dx <= reach; ++dx) {
        for (int dy = -reach; dy <= reach; ++dy) {
            for (int dz = -reach; dz <= reach; ++dz) {
                const auto it = cells_.find(key(cx + dx, cy + dy, cz + dz));
                if (it == cells_.end()) continue;
                for (int i : it->second) {
                    const double d2 = (points_[static_cast<std::size_t>(i)] - q).squaredNorm();
                    if (d2 < best_sq || (d2 == best_sq && best >= 0 && i < best)) {
                        best_sq = d2;
                        best = i;
                    }
                }
            }
        }
    }
    return best;
}

double NeighborGrid::nearest_sq_dist(const Vec3& q, double max_dist_mm) const {
    const int i = nearest(q, max_dist_mm);
    if (i < 0) return std::numeric_limits<double>::infinity();
    return (points_[static_cast<std::size_t>(i)] - q).squaredNorm();
}

}  // namespace pollisim
