#include "vdm/graph.hpp"

#include "vdm/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace vdm {

void GraphOptions::validate() const {
  if (!(delta_update > 0.0 && delta_update < 1.0) ||
      !(delta_loop > 0.0 && delta_loop < 1.0)) {
    throw std::invalid_argument("graph options: thresholds must lie in (0, 1)");
  }
  if (covis_samples < 100) {
    throw std::invalid_argument("graph options: covis_samples must be >= 100");
  }
  if (stride < 1) throw std::invalid_argument("graph options: stride must be >= 1");
}

double covisibility(const RgbdFrame& frame, const Keyframe& kf, int samples,
                    const DepthRange& range) {
  if (samples < 100) {
    throw std::invalid_argument("covisibility: samples must be >= 100");
  }
  const int w = frame.depth.width;
  const int h = frame.depth.height;
  const int step = std::max(
      1, static_cast<int>(std::floor(std::sqrt(double(w) * h / samples))));

  const Se3Pose to_kf = relative_transform(kf.pose(), frame.pose);
  const CameraIntrinsics& intr = kf.intrinsics();

  std::int64_t valid = 0;
  std::int64_t inside = 0;
  for (int v = 0; v < h; v += step) {
    for (int u = 0; u < w; u += step) {
      const float d = frame.depth.at(u, v);
      if (!std::isfinite(d) || !range.contains(d)) continue;
      ++valid;
      const auto p_cam = unproject(intr, u, v, d);
      const Eigen::Vector3d p_kf = to_kf * (*p_cam);
      const auto pix = project(intr, p_kf);
      if (!pix) continue;
      if (pix->u >= 0.0 && pix->u < intr.width && pix->v >= 0.0 &&
          pix->v < intr.height) {
        ++inside;
      }
    }
  }
  if (valid == 0) {
    throw NoValidDepthError("covisibility: frame has no valid depth samples");
  }
  return static_cast<double>(inside) / static_cast<double>(valid);
}

MapGraph::MapGraph(const CameraIntrinsics& intrinsics, const ContainerLayout& layout,
                   const GraphOptions& options)
    : intrinsics_(intrinsics), layout_(layout), options_(options) {
  intrinsics_.validate();
  layout_.validate();
  options_.validate();
}

const Keyframe& MapGraph::keyframe(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= keyframes_.size()) {
    throw std::out_of_range("unknown keyframe id " + std::to_string(id));
  }
  return keyframes_[static_cast<std::size_t>(id)];
}

Keyframe& MapGraph::keyframe(int id) {
  if (id < 0 || static_cast<std::size_t>(id) >= keyframes_.size()) {
    throw std::out_of_range("unknown keyframe id " + std::to_string(id));
  }
  return keyframes_[static_cast<std::size_t>(id)];
}

void MapGraph::set_current(int id) {
  keyframe(id);  // bounds check
  current_ = id;
}

double MapGraph::edge_weight(int i, int j) const {
  const auto it = edges_.find({std::min(i, j), std::max(i, j)});
  return it == edges_.end() ? 0.0 : it->second;
}

void MapGraph::set_edge(int i, int j, double delta) {
  keyframe(i);
  keyframe(j);
  if (i == j) throw std::invalid_argument("set_edge: self edges are not allowed");
  if (delta < 0.0 || delta > 1.0) {
    throw std::invalid_argument("set_edge: delta must lie in [0, 1]");
  }
  edges_[{std::min(i, j), std::max(i, j)}] = delta;
}

int MapGraph::add_keyframe(Keyframe kf) {
  if (kf.id() != static_cast<int>(keyframes_.size())) {
    throw std::invalid_argument("add_keyframe: ids must be consecutive");
  }
  keyframes_.push_back(std::move(kf));
  if (current_ < 0) current_ = keyframes_.back().id();
  return keyframes_.back().id();
}

Action MapGraph::process_frame(const RgbdFrame& frame) {
  const auto integrate_into = [&](int id) {
    return keyframe(id).integrate_frame(frame, options_.stride,
                                        options_.depth_range);
  };
  const auto create_keyframe = [&]() {
    const int id = static_cast<int>(keyframes_.size());
    keyframes_.emplace_back(id, frame.pose, intrinsics_, layout_, frame.timestamp);
    // Link the newcomer to every keyframe it shares any view with.
    for (int j = 0; j < id; ++j) {
      const double delta = covisibility(frame, keyframes_[j],
                                        options_.covis_samples,
                                        options_.depth_range);
      if (delta > 0.0) set_edge(id, j, delta);
    }
    current_ = id;
    Action action{ActionKind::CreatedKeyframe, id, integrate_into(id)};
    return action;
  };

  if (keyframes_.empty()) return create_keyframe();

  const int prev = current_;
  const double delta_current = covisibility(frame, keyframes_[prev],
                                            options_.covis_samples,
                                            options_.depth_range);
  if (delta_current >= options_.delta_update) {
    return {ActionKind::UpdatedCurrent, prev, integrate_into(prev)};
  }

  // Loop-closure scan, oldest keyframe first; the first hit wins.
  for (int j = 0; j < static_cast<int>(keyframes_.size()); ++j) {
    if (j == prev) continue;
    const double delta = covisibility(frame, keyframes_[j], options_.covis_samples,
                                      options_.depth_range);
    if (delta >= options_.delta_loop) {
      // The frame now belongs to j; its overlap with the keyframe it just
      // left is fresh evidence for that edge.
      if (delta_current > 0.0) set_edge(j, prev, delta_current);
      current_ = j;
      return {ActionKind::LoopClosureUpdate, j, integrate_into(j)};
    }
  }
  return create_keyframe();
}

std::vector<int> MapGraph::neighbor_groups(int center, double max_dist,
                                           double max_angle) const {
  const Keyframe& c = keyframe(center);
  std::set<int> ids{center};
  for (const auto& [key, delta] : edges_) {
    (void)delta;
    if (key.first == center) ids.insert(key.second);
    if (key.second == center) ids.insert(key.first);
  }
  const Eigen::Vector3d axis_c = c.pose().rotation.col(2);
  for (const auto& kf : keyframes_) {
    if (kf.id() == center) continue;
    const double dist = (kf.pose().translation - c.pose().translation).norm();
    if (dist > max_dist) continue;
    const double cos_angle =
        std::clamp(axis_c.dot(kf.pose().rotation.col(2)), -1.0, 1.0);
    if (std::acos(cos_angle) <= max_angle) ids.insert(kf.id());
  }
  return {ids.begin(), ids.end()};
}

}  // namespace vdm
