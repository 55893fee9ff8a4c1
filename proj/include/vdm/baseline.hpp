#pragma once

#include "vdm/image.hpp"
#include "vdm/ndt.hpp"

#include <cstdint>
#include <unordered_map>
#include <variant>
#include <vector>

namespace vdm {

inline constexpr double kLogOddsHit = 0.85;
inline constexpr double kLogOddsMiss = -0.4;
inline constexpr double kLogOddsMin = -2.0;
inline constexpr double kLogOddsMax = 3.5;

enum class VoxelMode { occupancy, ndt };

struct VoxelKey {
  int x = 0;
  int y = 0;
  int z = 0;
  friend bool operator==(const VoxelKey&, const VoxelKey&) = default;
};

struct VoxelKeyHash {
  std::size_t operator()(const VoxelKey& k) const {
    std::size_t h = static_cast<std::size_t>(k.x) * 73856093u;
    h ^= static_cast<std::size_t>(k.y) * 19349669u;
    h ^= static_cast<std::size_t>(k.z) * 83492791u;
    return h;
  }
};

struct OccupancyCell {
  double log_odds = 0.0;
};

struct NdtCell {
  MomentAccumulator acc;
};

struct VoxelStats {
  std::int64_t voxels_touched = 0;
  double update_ms = 0.0;
};

// Fixed-resolution sparse voxel map, either an occupancy grid updated by
// ray casting or a 3D NDT map reusing per-voxel moment accumulators.
class VoxelGrid {
 public:
  VoxelGrid(double voxel_size, const Eigen::Vector3d& origin, VoxelMode mode);

  // Occupancy mode: endpoint voxels get the hit increment, voxels traversed
  // by the camera-to-endpoint ray get the miss decrement, one update per
  // voxel per frame (hits win). NDT mode: endpoints are binned by voxel and
  // folded in one batch per voxel.
  VoxelStats integrate_frame(const RgbdFrame& frame,
                             const CameraIntrinsics& intrinsics, int stride = 1,
                             const DepthRange& range = {});

  // Cell centers of occupied voxels (occupancy mode, log-odds >= threshold)
  // or finalized Gaussian means (ndt mode), in ascending key order.
  std::vector<Eigen::Vector3d> centers(
      double occupancy_threshold = 0.0,
      std::int64_t min_support = kDefaultMinSupport) const;

  VoxelKey key_of(const Eigen::Vector3d& p) const;
  Eigen::Vector3d center_of(const VoxelKey& k) const;

  double voxel_size() const { return voxel_size_; }
  VoxelMode mode() const { return mode_; }
  std::size_t size() const { return cells_.size(); }
  const OccupancyCell* occupancy_cell(const VoxelKey& k) const;
  const NdtCell* ndt_cell(const VoxelKey& k) const;

 private:
  using Cell = std::variant<OccupancyCell, NdtCell>;

  double voxel_size_;
  Eigen::Vector3d origin_;
  VoxelMode mode_;
  std::unordered_map<VoxelKey, Cell, VoxelKeyHash> cells_;
};

// Voxel keys crossed by the segment from `from` to `to` (inclusive of the
// start voxel, exclusive of the end voxel), by 3D DDA traversal.
std::vector<VoxelKey> traverse_ray(const Eigen::Vector3d& from,
                                   const Eigen::Vector3d& to, double voxel_size,
                                   const Eigen::Vector3d& origin);

}  // namespace vdm
