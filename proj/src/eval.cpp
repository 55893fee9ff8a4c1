#include "vdm/eval.hpp"

#include "vdm/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

namespace vdm {

KdTree3::KdTree3(std::span<const Eigen::Vector3d> points)
    : points_(points.begin(), points.end()) {
  if (points_.empty()) throw EmptyInputError("kd-tree: no points");
  std::vector<std::uint32_t> order(points_.size());
  std::iota(order.begin(), order.end(), 0u);
  nodes_.reserve(points_.size());
  root_ = build(order.data(), order.data() + order.size(), 0);
}

std::int32_t KdTree3::build(std::uint32_t* begin, std::uint32_t* end, int depth) {
  if (begin == end) return -1;
  const int axis = depth % 3;
  std::uint32_t* mid = begin + (end - begin) / 2;
  std::nth_element(begin, mid, end, [&](std::uint32_t a, std::uint32_t b) {
    return points_[a][axis] < points_[b][axis];
  });
  const std::int32_t id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back({axis, -1, -1, *mid});
  const std::int32_t left = build(begin, mid, depth + 1);
  const std::int32_t right = build(mid + 1, end, depth + 1);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void KdTree3::search(std::int32_t node, const Eigen::Vector3d& query,
                     Hit& best) const {
  if (node < 0) return;
  const Node& n = nodes_[static_cast<std::size_t>(node)];
  const Eigen::Vector3d& p = points_[n.point];
  const double d2 = (p - query).squaredNorm();
  if (d2 < best.squared_distance) {
    best.squared_distance = d2;
    best.index = n.point;
  }
  const double diff = query[n.axis] - p[n.axis];
  const std::int32_t near = diff < 0.0 ? n.left : n.right;
  const std::int32_t far = diff < 0.0 ? n.right : n.left;
  search(near, query, best);
  if (diff * diff < best.squared_distance) search(far, query, best);
}

KdTree3::Hit KdTree3::nearest(const Eigen::Vector3d& query) const {
  Hit best{0, std::numeric_limits<double>::infinity()};
  search(root_, query, best);
  return best;
}

std::pair<double, double> nearest_neighbor_rmse(
    std::span<const Eigen::Vector3d> model,
    std::span<const Eigen::Vector3d> reference) {
  if (model.empty() || reference.empty()) {
    throw EmptyInputError("nearest_neighbor_rmse: empty point set");
  }
  const KdTree3 tree(reference);
  double sum_sq = 0.0;
  double sum_abs = 0.0;
  for (const auto& p : model) {
    const double d2 = tree.nearest(p).squared_distance;
    sum_sq += d2;
    sum_abs += std::sqrt(d2);
  }
  const double n = static_cast<double>(model.size());
  return {std::sqrt(sum_sq / n) * 1000.0, sum_abs / n * 1000.0};
}

EvalReport map_statistics(const GlobalMap& map) {
  EvalReport report;
  report.method = "vd";
  report.element_count = map.stats.output_count;
  report.runtime_s = map.stats.generation_seconds;
  std::ostringstream params;
  params << "input_count=" << map.stats.input_count
         << " output_count=" << map.stats.output_count;
  report.parameters = params.str();
  return report;
}

EvalReport map_statistics(const VoxelGrid& grid, double occupancy_threshold,
                          std::int64_t min_support) {
  EvalReport report;
  report.method = grid.mode() == VoxelMode::occupancy ? "occupancy" : "ndt_grid";
  report.element_count =
      static_cast<std::int64_t>(grid.centers(occupancy_threshold, min_support).size());
  std::ostringstream params;
  params << "voxel_size=" << grid.voxel_size();
  report.parameters = params.str();
  return report;
}

std::string format_report_kv(const EvalReport& report, bool include_timings) {
  std::ostringstream out;
  out << "method=" << report.method << '\n';
  if (!report.parameters.empty()) out << "parameters=" << report.parameters << '\n';
  out << "element_count=" << report.element_count << '\n';
  if (report.rmse_mm >= 0.0) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", report.rmse_mm);
    out << "rmse_mm=" << buf << '\n';
    std::snprintf(buf, sizeof(buf), "%.6f", report.mean_err_mm);
    out << "mean_err_mm=" << buf << '\n';
  }
  if (include_timings) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", report.runtime_s);
    out << "runtime_s=" << buf << '\n';
  }
  return out.str();
}

std::string format_report_table(std::span<const EvalReport> reports) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-12s %12s %12s %12s %10s\n", "method",
                "elements", "rmse[mm]", "mean[mm]", "time[s]");
  out << line;
  for (const auto& r : reports) {
    char rmse[32] = "-";
    char mean[32] = "-";
    if (r.rmse_mm >= 0.0) {
      std::snprintf(rmse, sizeof(rmse), "%.2f", r.rmse_mm);
      std::snprintf(mean, sizeof(mean), "%.2f", r.mean_err_mm);
    }
    std::snprintf(line, sizeof(line), "%-12s %12lld %12s %12s %10.2f\n",
                  r.method.c_str(), static_cast<long long>(r.element_count), rmse,
                  mean, r.runtime_s);
    out << line;
  }
  return out.str();
}

}  // namespace vdm
