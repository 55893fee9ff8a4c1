#include "vdm/merge.hpp"

#include "vdm/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace vdm {

void ClusterParams::validate() const {
  if (!(bandwidth > 0.0)) {
    throw std::invalid_argument("cluster params: bandwidth must be positive");
  }
  if (max_iterations < 1) {
    throw std::invalid_argument("cluster params: max_iterations must be >= 1");
  }
  if (!(convergence_eps > 0.0) || !(occlusion_depth_tol > 0.0)) {
    throw std::invalid_argument("cluster params: tolerances must be positive");
  }
  if (!(group_max_dist > 0.0) || !(group_max_angle > 0.0)) {
    throw std::invalid_argument("cluster params: group thresholds must be positive");
  }
}

Ellipsoid transform_ellipsoid(const Se3Pose& pose, const Ellipsoid& e) {
  Ellipsoid out = e;
  out.mean = pose * e.mean;
  out.covariance = pose.rotation * e.covariance * pose.rotation.transpose();
  out.eigenvectors = pose.rotation * e.eigenvectors;
  return out;
}

std::vector<WorldEllipsoid> ellipsoids_to_world(const MapGraph& graph,
                                                std::int64_t min_support) {
  std::vector<WorldEllipsoid> out;
  for (const auto& kf : graph.keyframes()) {
    for (const auto& [cell, local] : kf.ellipsoids(min_support)) {
      out.push_back({transform_ellipsoid(kf.pose(), local), kf.id(), cell,
                     local.mean.z()});
    }
  }
  return out;
}

ViewBins bin_into_view(const Keyframe& center,
                       std::span<const WorldEllipsoid> candidates) {
  ViewBins out;
  const Se3Pose world_to_center = center.pose().inverse();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const Eigen::Vector3d p = world_to_center * candidates[i].e.mean;
    const auto pix = project(center.intrinsics(), p);
    if (!pix) {
      out.unbinned.push_back(i);
      continue;
    }
    const auto cell = cell_index(center.layout(), pix->u, pix->v);
    if (!cell) {
      out.unbinned.push_back(i);
      continue;
    }
    out.bins[center.layout().linear_index(*cell)].push_back({i, pix->depth});
  }
  return out;
}

ReprojectedBins reproject_group(const MapGraph& graph, std::span<const int> group,
                                int center, std::int64_t min_support) {
  if (std::find(group.begin(), group.end(), center) == group.end()) {
    throw std::invalid_argument("reproject_group: center must belong to the group");
  }
  ReprojectedBins out;
  for (int id : group) {
    const auto& kf = graph.keyframe(id);
    for (const auto& [cell, local] : kf.ellipsoids(min_support)) {
      out.ellipsoids.push_back({transform_ellipsoid(kf.pose(), local), id, cell,
                                local.mean.z()});
    }
  }
  out.view = bin_into_view(graph.keyframe(center), out.ellipsoids);
  return out;
}

MeanShiftResult mean_shift_cluster(std::span<const Eigen::Vector3d> points,
                                   const ClusterParams& params) {
  if (points.empty()) {
    throw std::invalid_argument("mean_shift_cluster: points must be non-empty");
  }
  params.validate();
  const double h = params.bandwidth;
  const double h2 = h * h;
  const int n = static_cast<int>(points.size());

  std::vector<Eigen::Vector3d> modes(points.begin(), points.end());
  for (int i = 0; i < n; ++i) {
    Eigen::Vector3d m = modes[i];
    for (int iter = 0; iter < params.max_iterations; ++iter) {
      Eigen::Vector3d sum = Eigen::Vector3d::Zero();
      int inside = 0;
      for (const auto& p : points) {
        if ((p - m).squaredNorm() <= h2) {
          sum += p;
          ++inside;
        }
      }
      const Eigen::Vector3d next = inside > 0 ? Eigen::Vector3d(sum / inside) : m;
      const double shift = (next - m).norm();
      m = next;
      if (shift < params.convergence_eps) break;
    }
    modes[i] = m;
  }

  // Union modes closer than half a bandwidth.
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  const double merge2 = (h / 2.0) * (h / 2.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if ((modes[i] - modes[j]).squaredNorm() < merge2) {
        parent[find(j)] = find(i);
      }
    }
  }

  MeanShiftResult result;
  result.assignment.assign(n, -1);
  std::vector<int> root_to_cluster(n, -1);
  std::vector<Eigen::Vector3d> mode_sum;
  std::vector<int> mode_count;
  for (int i = 0; i < n; ++i) {
    const int r = find(i);
    if (root_to_cluster[r] < 0) {
      root_to_cluster[r] = static_cast<int>(mode_sum.size());
      mode_sum.push_back(Eigen::Vector3d::Zero());
      mode_count.push_back(0);
    }
    const int c = root_to_cluster[r];
    result.assignment[i] = c;
    mode_sum[c] += modes[i];
    mode_count[c] += 1;
  }
  result.modes.resize(mode_sum.size());
  for (std::size_t c = 0; c < mode_sum.size(); ++c) {
    result.modes[c] = mode_sum[c] / mode_count[c];
  }

  // Members stranded farther than the bandwidth from their mode become
  // singleton clusters.
  for (int i = 0; i < n; ++i) {
    if ((points[i] - result.modes[result.assignment[i]]).norm() > h) {
      result.assignment[i] = static_cast<int>(result.modes.size());
      result.modes.push_back(points[i]);
    }
  }
  return result;
}

Ellipsoid merge_cluster(std::span<const Ellipsoid> members) {
  if (members.empty()) {
    throw std::invalid_argument("merge_cluster: members must be non-empty");
  }
  MomentAccumulator pooled;
  for (const auto& e : members) {
    if (e.support < 2) {
      throw std::invalid_argument("merge_cluster: member support must be >= 2");
    }
    MomentAccumulator acc;
    acc.count = e.support;
    acc.point_sum = e.mean * static_cast<double>(e.support);
    acc.scatter = e.covariance * static_cast<double>(e.support - 1);
    acc.color_sum = e.color * static_cast<double>(e.support);
    pooled = merge_accumulators(pooled, acc);
  }
  return *finalize(pooled, 2);
}

std::vector<MergeGroup> build_merge_groups(const MapGraph& graph,
                                           const ClusterParams& params) {
  std::vector<MergeGroup> groups;
  std::vector<bool> assigned(graph.size(), false);
  std::size_t remaining = graph.size();
  while (remaining > 0) {
    int best = -1;
    std::size_t best_count = 0;
    std::vector<int> best_members;
    for (const auto& kf : graph.keyframes()) {
      if (assigned[kf.id()]) continue;
      auto ids = graph.neighbor_groups(kf.id(), params.group_max_dist,
                                       params.group_max_angle);
      std::erase_if(ids, [&](int id) { return assigned[id]; });
      if (best < 0 || ids.size() > best_count) {
        best = kf.id();
        best_count = ids.size();
        best_members = std::move(ids);
      }
    }
    for (int id : best_members) assigned[id] = true;
    remaining -= best_members.size();
    groups.push_back({best, std::move(best_members)});
  }
  return groups;
}

std::vector<WorldEllipsoid> remove_occluded(const MapGraph& graph,
                                            std::span<const MergeGroup> groups,
                                            std::vector<WorldEllipsoid> candidates,
                                            const ClusterParams& params) {
  std::vector<bool> alive(candidates.size(), true);
  std::vector<WorldEllipsoid> pool;
  std::vector<std::size_t> pool_index;  // pool slot -> candidate slot

  for (const auto& group : groups) {
    pool.clear();
    pool_index.clear();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (alive[i]) {
        pool.push_back(candidates[i]);
        pool_index.push_back(i);
      }
    }

    const auto view = bin_into_view(graph.keyframe(group.center), pool);
    for (const auto& [cell, members] : view.bins) {
      (void)cell;
      std::vector<std::pair<double, std::size_t>> by_depth;  // (depth, pool slot)
      for (const auto& b : members) by_depth.emplace_back(b.depth, b.index);
      std::sort(by_depth.begin(), by_depth.end());

      // Split into depth layers; within each layer keep the most precise.
      std::size_t start = 0;
      for (std::size_t k = 1; k <= by_depth.size(); ++k) {
        const bool layer_ends =
            k == by_depth.size() ||
            by_depth[k].first - by_depth[k - 1].first > params.occlusion_depth_tol;
        if (!layer_ends) continue;
        std::size_t keep = start;
        for (std::size_t m = start + 1; m < k; ++m) {
          if (pool[by_depth[m].second].e.max_stddev() <
              pool[by_depth[keep].second].e.max_stddev()) {
            keep = m;
          }
        }
        for (std::size_t m = start; m < k; ++m) {
          if (m != keep) alive[pool_index[by_depth[m].second]] = false;
        }
        start = k;
      }
    }
  }

  std::vector<WorldEllipsoid> out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (alive[i]) out.push_back(candidates[i]);
  }
  return out;
}

GlobalMap build_global_map(const MapGraph& graph, const ClusterParams& params) {
  if (graph.empty()) throw EmptyGraphError("build_global_map: graph is empty");
  params.validate();
  const auto t0 = std::chrono::steady_clock::now();

  GlobalMap map;
  map.stats.input_count =
      static_cast<std::int64_t>(ellipsoids_to_world(graph, params.min_support).size());

  const auto groups = build_merge_groups(graph, params);
  std::vector<WorldEllipsoid> merged;
  std::vector<Eigen::Vector3d> positions;
  for (const auto& group : groups) {
    const auto binned =
        reproject_group(graph, group.members, group.center, params.min_support);
    for (const auto& [cell, members] : binned.view.bins) {
      (void)cell;
      positions.clear();
      for (const auto& b : members) positions.push_back(binned.ellipsoids[b.index].e.mean);
      const auto clusters = mean_shift_cluster(positions, params);
      for (int c = 0; c < clusters.cluster_count(); ++c) {
        std::vector<const WorldEllipsoid*> cluster;
        for (std::size_t m = 0; m < members.size(); ++m) {
          if (clusters.assignment[m] == c) {
            cluster.push_back(&binned.ellipsoids[members[m].index]);
          }
        }
        if (cluster.empty()) continue;
        if (cluster.size() == 1) {
          merged.push_back(*cluster.front());
          continue;
        }
        std::vector<Ellipsoid> parts;
        const WorldEllipsoid* origin = cluster.front();
        for (const auto* we : cluster) {
          parts.push_back(we->e);
          if (we->e.support > origin->e.support) origin = we;
        }
        WorldEllipsoid out;
        out.e = merge_cluster(parts);
        out.source_keyframe = origin->source_keyframe;
        out.source_cell = origin->source_cell;
        out.source_depth =
            (graph.keyframe(out.source_keyframe).pose().inverse() * out.e.mean).z();
        merged.push_back(out);
      }
    }
    for (std::size_t idx : binned.view.unbinned) {
      merged.push_back(binned.ellipsoids[idx]);
    }
  }

  map.ellipsoids = remove_occluded(graph, groups, std::move(merged), params);
  map.stats.output_count = static_cast<std::int64_t>(map.ellipsoids.size());
  map.stats.generation_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return map;
}

std::vector<ColoredPoint> sample_point_cloud(const GlobalMap& map,
                                             int per_ellipsoid,
                                             std::uint64_t seed) {
  if (per_ellipsoid < 1) {
    throw std::invalid_argument("sample_point_cloud: per_ellipsoid must be >= 1");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<ColoredPoint> cloud;
  cloud.reserve(map.ellipsoids.size() * static_cast<std::size_t>(per_ellipsoid));
  for (const auto& we : map.ellipsoids) {
    const Eigen::Vector3d sigma = we.e.eigenvalues.cwiseSqrt();
    const Rgb8 color = {
        static_cast<std::uint8_t>(std::lround(we.e.color.x())),
        static_cast<std::uint8_t>(std::lround(we.e.color.y())),
        static_cast<std::uint8_t>(std::lround(we.e.color.z()))};
    for (int s = 0; s < per_ellipsoid; ++s) {
      const Eigen::Vector3d z(normal(rng), normal(rng), normal(rng));
      cloud.push_back(
          {we.e.mean + we.e.eigenvectors * sigma.cwiseProduct(z).eval(), color});
    }
  }
  return cloud;
}

}  // namespace vdm
