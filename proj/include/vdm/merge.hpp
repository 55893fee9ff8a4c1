#pragma once

#include "vdm/graph.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace vdm {

// World-frame ellipsoid with provenance back to the local map it came from.
struct WorldEllipsoid {
  Ellipsoid e;           // world frame
  int source_keyframe = 0;
  CellIndex source_cell;
  double source_depth = 0.0;  // depth of the mean in the source camera
};

struct GlobalMapStats {
  std::int64_t input_count = 0;   // ellipsoids entering the merge
  std::int64_t output_count = 0;  // ellipsoids after clustering and filtering
  double generation_seconds = 0.0;
};

struct GlobalMap {
  std::vector<WorldEllipsoid> ellipsoids;
  GlobalMapStats stats;
};

struct ClusterParams {
  double bandwidth = 0.25;        // meters; also the do-not-cluster distance
  int max_iterations = 50;
  double convergence_eps = 1e-4;  // meters
  double occlusion_depth_tol = 0.1;  // meters; same-cell rivalry window
  double group_max_dist = 2.0;       // meters; neighbor-group extension
  double group_max_angle = 0.7853981633974483;  // radians (45 deg)
  std::int64_t min_support = kDefaultMinSupport;

  void validate() const;
};

// All finalizable cell Gaussians of the graph mapped into the world frame,
// in keyframe-then-cell order.
std::vector<WorldEllipsoid> ellipsoids_to_world(
    const MapGraph& graph, std::int64_t min_support = kDefaultMinSupport);

// Ellipsoid transported by a rigid pose: mean moved, covariance conjugated,
// cached axes rotated (eigenvalues are preserved exactly).
Ellipsoid transform_ellipsoid(const Se3Pose& pose, const Ellipsoid& e);

struct BinnedRef {
  std::size_t index = 0;  // into the candidate list
  double depth = 0.0;     // depth in the binning camera
};

struct ViewBins {
  // Keyed by linear cell index of the center keyframe's layout.
  std::map<int, std::vector<BinnedRef>> bins;
  // Behind the center camera or outside its container; kept, never merged.
  std::vector<std::size_t> unbinned;
};

// Bins world ellipsoids by projecting their means through `center`'s camera.
ViewBins bin_into_view(const Keyframe& center,
                       std::span<const WorldEllipsoid> candidates);

struct ReprojectedBins {
  std::vector<WorldEllipsoid> ellipsoids;  // group candidates, keyframe-then-cell order
  ViewBins view;                           // refs into `ellipsoids`
};

// Reprojects every ellipsoid of every group member into the center
// keyframe's container. Throws std::out_of_range for unknown ids and
// std::invalid_argument when center is not part of the group.
ReprojectedBins reproject_group(const MapGraph& graph, std::span<const int> group,
                                int center,
                                std::int64_t min_support = kDefaultMinSupport);

struct MeanShiftResult {
  std::vector<int> assignment;          // cluster id per input point
  std::vector<Eigen::Vector3d> modes;   // one per cluster id
  int cluster_count() const { return static_cast<int>(modes.size()); }
};

// Flat-kernel mean shift. Modes closer than bandwidth/2 are merged; every
// member ends within bandwidth of its cluster mode (violators split off as
// singletons).
MeanShiftResult mean_shift_cluster(std::span<const Eigen::Vector3d> points,
                                   const ClusterParams& params);

// Pools member moments (support-weighted, including between-member
// dispersion) into one ellipsoid. Members must be non-empty with support
// >= 2 each.
Ellipsoid merge_cluster(std::span<const Ellipsoid> members);

struct MergeGroup {
  int center = 0;
  std::vector<int> members;  // ascending, includes center
};

// Greedy max-degree cover: every keyframe lands in exactly one group.
std::vector<MergeGroup> build_merge_groups(const MapGraph& graph,
                                           const ClusterParams& params);

// For each group center's viewpoint, same-cell ellipsoids within the depth
// tolerance rival each other and only the smallest-max-stddev one survives.
// Groups are processed in order against the surviving set, so a removal is
// global. Output preserves the input order of the survivors.
std::vector<WorldEllipsoid> remove_occluded(const MapGraph& graph,
                                            std::span<const MergeGroup> groups,
                                            std::vector<WorldEllipsoid> candidates,
                                            const ClusterParams& params);

// Full pipeline: world ellipsoids -> greedy groups -> per-cell mean-shift
// merging -> occlusion filtering. Throws EmptyGraphError on an empty graph.
GlobalMap build_global_map(const MapGraph& graph, const ClusterParams& params);

// Draws per_ellipsoid points from each ellipsoid's Gaussian, deterministic
// for a fixed seed; each point carries its ellipsoid's color.
std::vector<ColoredPoint> sample_point_cloud(const GlobalMap& map,
                                             int per_ellipsoid,
                                             std::uint64_t seed);

}  // namespace vdm
