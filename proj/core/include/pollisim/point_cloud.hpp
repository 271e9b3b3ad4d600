#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "pollisim/pose.hpp"

namespace pollisim {

/// 3-D point set in millimeters, tagged with the frame it lives in.
struct PointCloud {
    std::vector<Vec3> points;
    std::string frame = "world";

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    Vec3 centroid() const;
};

PointCloud transform_cloud(const Pose& pose, const PointCloud& cloud);

/// Voxel-grid downsampling: one centroid per occupied voxel, emitted in a
/// deterministic voxel-index order.
PointCloud voxel_downsample(const PointCloud& cloud, double voxel_mm);

/// ASCII "x y z" per line, for external inspection.
void write_xyz(const PointCloud& cloud, const std::string& path);
PointCloud read_xyz(const std::string& path);

/// Hash-grid nearest-neighbor index over a fixed point set. Cell size should
/// be on the order of the query radius; queries search the 27 surrounding
/// cells, so results are exact for distances below one cell size and
/// conservative beyond.
class NeighborGrid {
public:
    NeighborGrid(const std::vector<Vec3>& points, double cell_mm);

    /// Index of the nearest point within max_dist_mm, or -1.
    int nearest(const Vec3& q, double max_dist_mm) const;
    /// Squared distance to that neighbor (valid when nearest() >= 0).
    double nearest_sq_dist(const Vec3& q, double max_dist_mm) const;

private:
    std::int64_t key(int ix, int iy, int iz) const;

    const std::vector<Vec3>& points_;
    double cell_;
    std::unordered_map<std::int64_t, std::vector<int>> cells_;
};

}  // namespace pollisim
