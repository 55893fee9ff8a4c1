#include "vdm/baseline.hpp"

#include "vdm/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <unordered_set>
#include <stdexcept>

namespace vdm {
namespace {

int floor_div(double x) { return static_cast<int>(std::floor(x)); }

struct KeyLess {
  bool operator()(const VoxelKey& a, const VoxelKey& b) const {
    if (a.x != b.x) return a.x < b.x;
    if (a.y != b.y) return a.y < b.y;
    return a.z < b.z;
  }
};

}  // namespace

VoxelGrid::VoxelGrid(double voxel_size, const Eigen::Vector3d& origin,
                     VoxelMode mode)
    : voxel_size_(voxel_size), origin_(origin), mode_(mode) {
  if (!(voxel_size > 0.0)) {
    throw std::invalid_argument("voxel grid: voxel_size must be positive");
  }
}

VoxelKey VoxelGrid::key_of(const Eigen::Vector3d& p) const {
  return {floor_div((p.x() - origin_.x()) / voxel_size_),
          floor_div((p.y() - origin_.y()) / voxel_size_),
          floor_div((p.z() - origin_.z()) / voxel_size_)};
}

Eigen::Vector3d VoxelGrid::center_of(const VoxelKey& k) const {
  return origin_ + voxel_size_ * Eigen::Vector3d(k.x + 0.5, k.y + 0.5, k.z + 0.5);
}

const OccupancyCell* VoxelGrid::occupancy_cell(const VoxelKey& k) const {
  const auto it = cells_.find(k);
  if (it == cells_.end()) return nullptr;
  return std::get_if<OccupancyCell>(&it->second);
}

const NdtCell* VoxelGrid::ndt_cell(const VoxelKey& k) const {
  const auto it = cells_.find(k);
  if (it == cells_.end()) return nullptr;
  return std::get_if<NdtCell>(&it->second);
}

std::vector<VoxelKey> traverse_ray(const Eigen::Vector3d& from,
                                   const Eigen::Vector3d& to, double voxel_size,
                                   const Eigen::Vector3d& origin) {
  // Amanatides-Woo stepping over the regular grid.
  std::vector<VoxelKey> out;
  const Eigen::Vector3d dir = to - from;
  const double len = dir.norm();

  VoxelKey cur{floor_div((from.x() - origin.x()) / voxel_size),
               floor_div((from.y() - origin.y()) / voxel_size),
               floor_div((from.z() - origin.z()) / voxel_size)};
  const VoxelKey end{floor_div((to.x() - origin.x()) / voxel_size),
                     floor_div((to.y() - origin.y()) / voxel_size),
                     floor_div((to.z() - origin.z()) / voxel_size)};
  if (len < 1e-12 || cur == end) return out;

  int step[3];
  double t_max[3];
  double t_delta[3];
  const int cur_idx[3] = {cur.x, cur.y, cur.z};
  for (int a = 0; a < 3; ++a) {
    const double d = dir[a] / len;
    const double pos = from[a] - origin[a];
    if (d > 1e-15) {
      step[a] = 1;
      const double boundary = (cur_idx[a] + 1) * voxel_size;
      t_max[a] = (boundary - pos) / d;
      t_delta[a] = voxel_size / d;
    } else if (d < -1e-15) {
      step[a] = -1;
      const double boundary = cur_idx[a] * voxel_size;
      t_max[a] = (boundary - pos) / d;
      t_delta[a] = -voxel_size / d;
    } else {
      step[a] = 0;
      t_max[a] = std::numeric_limits<double>::infinity();
      t_delta[a] = std::numeric_limits<double>::infinity();
    }
  }

  // Hard cap: the ray cannot cross more voxels than its axis spans plus one
  // per axis.
  const int max_steps = std::abs(end.x - cur.x) + std::abs(end.y - cur.y) +
                        std::abs(end.z - cur.z) + 3;
  out.push_back(cur);
  for (int s = 0; s < max_steps; ++s) {
    int axis = 0;
    if (t_max[1] < t_max[axis]) axis = 1;
    if (t_max[2] < t_max[axis]) axis = 2;
    if (axis == 0) cur.x += step[0];
    if (axis == 1) cur.y += step[1];
    if (axis == 2) cur.z += step[2];
    t_max[axis] += t_delta[axis];
    if (cur == end) break;
    out.push_back(cur);
  }
  return out;
}

VoxelStats VoxelGrid::integrate_frame(const RgbdFrame& frame,
                                      const CameraIntrinsics& intrinsics,
                                      int stride, const DepthRange& range) {
  if (frame.color.width != frame.depth.width ||
      frame.color.height != frame.depth.height) {
    throw DataError("integrate_frame: color and depth dimensions differ");
  }
  if (stride < 1) throw std::invalid_argument("integrate_frame: stride must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();

  VoxelStats stats;
  if (mode_ == VoxelMode::occupancy) {
    const Eigen::Vector3d sensor = frame.pose.translation;
    // One update per voxel per frame; order is irrelevant, so hashed sets
    // keep the result deterministic.
    std::unordered_set<VoxelKey, VoxelKeyHash> hits;
    std::unordered_set<VoxelKey, VoxelKeyHash> misses;
    for (int v = 0; v < frame.depth.height; v += stride) {
      for (int u = 0; u < frame.depth.width; u += stride) {
        const float d = frame.depth.at(u, v);
        if (!std::isfinite(d) || !range.contains(d)) continue;
        const Eigen::Vector3d endpoint =
            frame.pose * (*unproject(intrinsics, u, v, d));
        hits.insert(key_of(endpoint));
        for (const auto& k : traverse_ray(sensor, endpoint, voxel_size_, origin_)) {
          misses.insert(k);
        }
      }
    }
    for (const auto& k : misses) {
      if (hits.count(k)) continue;  // a hit outranks a miss within a frame
      auto& cell = cells_.try_emplace(k, OccupancyCell{}).first->second;
      auto& lo = std::get<OccupancyCell>(cell).log_odds;
      lo = std::clamp(lo + kLogOddsMiss, kLogOddsMin, kLogOddsMax);
      ++stats.voxels_touched;
    }
    for (const auto& k : hits) {
      auto& cell = cells_.try_emplace(k, OccupancyCell{}).first->second;
      auto& lo = std::get<OccupancyCell>(cell).log_odds;
      lo = std::clamp(lo + kLogOddsHit, kLogOddsMin, kLogOddsMax);
      ++stats.voxels_touched;
    }
  } else {
    struct Batch {
      std::vector<Eigen::Vector3d> points;
      std::vector<Eigen::Vector3d> colors;
    };
    std::unordered_map<VoxelKey, Batch, VoxelKeyHash> batches;
    for (int v = 0; v < frame.depth.height; v += stride) {
      for (int u = 0; u < frame.depth.width; u += stride) {
        const float d = frame.depth.at(u, v);
        if (!std::isfinite(d) || !range.contains(d)) continue;
        const Eigen::Vector3d endpoint =
            frame.pose * (*unproject(intrinsics, u, v, d));
        auto& batch = batches[key_of(endpoint)];
        batch.points.push_back(endpoint);
        const Rgb8& rgb = frame.color.at(u, v);
        batch.colors.emplace_back(rgb[0], rgb[1], rgb[2]);
      }
    }
    for (auto& [k, batch] : batches) {
      auto& cell = cells_.try_emplace(k, NdtCell{}).first->second;
      std::get<NdtCell>(cell).acc.add_batch(batch.points, batch.colors);
    }
    stats.voxels_touched = static_cast<std::int64_t>(batches.size());
  }

  stats.update_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                t0)
          .count();
  return stats;
}

std::vector<Eigen::Vector3d> VoxelGrid::centers(double occupancy_threshold,
                                                std::int64_t min_support) const {
  std::vector<VoxelKey> keys;
  keys.reserve(cells_.size());
  for (const auto& [k, cell] : cells_) {
    (void)cell;
    keys.push_back(k);
  }
  std::sort(keys.begin(), keys.end(), KeyLess{});

  std::vector<Eigen::Vector3d> out;
  for (const auto& k : keys) {
    const auto& cell = cells_.at(k);
    if (mode_ == VoxelMode::occupancy) {
      if (std::get<OccupancyCell>(cell).log_odds >= occupancy_threshold) {
        out.push_back(center_of(k));
      }
    } else {
      const auto e = finalize(std::get<NdtCell>(cell).acc, min_support);
      if (e) out.push_back(e->mean);
    }
  }
  return out;
}

}  // namespace vdm
