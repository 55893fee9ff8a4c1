#pragma once

#include "vdm/baseline.hpp"
#include "vdm/merge.hpp"

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace vdm {

// Static 3D kd-tree for nearest-neighbor queries.
class KdTree3 {
 public:
  explicit KdTree3(std::span<const Eigen::Vector3d> points);

  struct Hit {
    std::size_t index = 0;
    double squared_distance = 0.0;
  };
  Hit nearest(const Eigen::Vector3d& query) const;

  std::size_t size() const { return points_.size(); }

 private:
  struct Node {
    int axis = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::uint32_t point = 0;
  };

  std::int32_t build(std::uint32_t* begin, std::uint32_t* end, int depth);
  void search(std::int32_t node, const Eigen::Vector3d& query, Hit& best) const;

  std::vector<Eigen::Vector3d> points_;
  std::vector<Node> nodes_;
  std::int32_t root_ = -1;
};

// One-directional model-to-reference distances through a kd-tree.
// Returns (rmse, mean absolute error), both in millimeters.
std::pair<double, double> nearest_neighbor_rmse(
    std::span<const Eigen::Vector3d> model,
    std::span<const Eigen::Vector3d> reference);

struct EvalReport {
  std::string method;
  std::string parameters;
  double rmse_mm = -1.0;  // negative when no reference was evaluated
  double mean_err_mm = -1.0;
  std::int64_t element_count = 0;
  double runtime_s = 0.0;
};

EvalReport map_statistics(const GlobalMap& map);
EvalReport map_statistics(const VoxelGrid& grid, double occupancy_threshold = 0.0,
                          std::int64_t min_support = kDefaultMinSupport);

// Machine-readable form: one key=value per line. Timings are reported only
// when include_timings is set so CI can diff the rest.
std::string format_report_kv(const EvalReport& report, bool include_timings = false);

// Human-readable side-by-side table.
std::string format_report_table(std::span<const EvalReport> reports);

}  // namespace vdm
