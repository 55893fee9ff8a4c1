#include "vdm/keyframe.hpp"

#include "vdm/error.hpp"

#include <cmath>
#include <unordered_map>

namespace vdm {

Keyframe::Keyframe(int id, const Se3Pose& pose, const CameraIntrinsics& intrinsics,
                   const ContainerLayout& layout, double timestamp)
    : id_(id),
      pose_(pose),
      intrinsics_(intrinsics),
      layout_(layout),
      timestamp_(timestamp),
      cells_(static_cast<std::size_t>(layout.cell_count())) {
  intrinsics_.validate();
  layout_.validate();
}

IntegrationStats Keyframe::integrate_frame(const RgbdFrame& frame, int stride,
                                           const DepthRange& range) {
  if (frame.color.width != frame.depth.width ||
      frame.color.height != frame.depth.height) {
    throw DataError("integrate_frame: color and depth dimensions differ");
  }
  if (stride < 1) throw std::invalid_argument("integrate_frame: stride must be >= 1");

  const Se3Pose to_keyframe = relative_transform(pose_, frame.pose);

  struct Batch {
    std::vector<Eigen::Vector3d> points;
    std::vector<Eigen::Vector3d> colors;
  };
  std::unordered_map<int, Batch> batches;

  IntegrationStats stats;
  for (int v = 0; v < frame.depth.height; v += stride) {
    for (int u = 0; u < frame.depth.width; u += stride) {
      const float d = frame.depth.at(u, v);
      if (!std::isfinite(d) || !range.contains(d)) continue;
      const auto p_cam = unproject(intrinsics_, u, v, d);
      const Eigen::Vector3d p_kf = to_keyframe * (*p_cam);
      const auto pix = project(intrinsics_, p_kf);
      if (!pix) {
        ++stats.points_rejected;
        continue;
      }
      const auto cell = cell_index(layout_, pix->u, pix->v);
      if (!cell) {
        ++stats.points_rejected;
        continue;
      }
      auto& batch = batches[layout_.linear_index(*cell)];
      batch.points.push_back(p_kf);
      const Rgb8& rgb = frame.color.at(u, v);
      batch.colors.emplace_back(rgb[0], rgb[1], rgb[2]);
      ++stats.points_used;
    }
  }

  for (auto& [linear, batch] : batches) {
    cells_[linear].add_batch(batch.points, batch.colors);
  }
  stats.cells_touched = static_cast<int>(batches.size());
  ++frames_integrated_;
  return stats;
}

int Keyframe::filter_elongated(const NoiseModel& model, double k,
                               std::int64_t min_support) {
  if (!(k > 0.0)) throw std::invalid_argument("filter_elongated: k must be positive");
  int removed = 0;
  for (auto& acc : cells_) {
    const auto ellipsoid = finalize(acc, min_support);
    if (!ellipsoid) continue;
    const double z = ellipsoid->mean.z();
    if (z <= 0.0) continue;  // degenerate mean behind the camera plane
    if (is_elongated(model, *ellipsoid, z, k)) {
      acc.reset();
      ++removed;
    }
  }
  return removed;
}

std::vector<CellEllipsoid> Keyframe::ellipsoids(std::int64_t min_support) const {
  std::vector<CellEllipsoid> out;
  const int nx = layout_.cells_x();
  for (int j = 0; j < layout_.cells_y(); ++j) {
    for (int i = 0; i < nx; ++i) {
      const auto e = finalize(cells_[static_cast<std::size_t>(j) * nx + i],
                              min_support);
      if (e) out.push_back({CellIndex{i, j}, *e});
    }
  }
  return out;
}

}  // namespace vdm
