#pragma once

#include "vdm/keyframe.hpp"

#include <map>
#include <utility>
#include <vector>

namespace vdm {

// Frame-routing thresholds and measurement settings.
struct GraphOptions {
  double delta_update = 0.8;  // stay on the current keyframe at or above this
  double delta_loop = 0.6;    // accept a loop closure at or above this
  int covis_samples = 768;    // target size of the covisibility sampling grid
  int stride = 1;             // pixel stride for integration
  DepthRange depth_range;

  void validate() const;
};

// Fraction of the frame's sampled valid-depth points that re-project inside
// the keyframe's source-image footprint with positive depth. Deterministic:
// samples lie on a fixed grid. Throws NoValidDepthError when the sampled set
// is empty.
double covisibility(const RgbdFrame& frame, const Keyframe& kf, int samples,
                    const DepthRange& range = {});

enum class ActionKind { UpdatedCurrent, LoopClosureUpdate, CreatedKeyframe };

struct Action {
  ActionKind kind;
  int keyframe_id;
  IntegrationStats stats;
};

// Global map structure: keyframes plus symmetric covisibility edges.
class MapGraph {
 public:
  MapGraph(const CameraIntrinsics& intrinsics, const ContainerLayout& layout,
           const GraphOptions& options = {});

  // Routes one frame: update the current keyframe when covisibility allows,
  // otherwise scan old keyframes for a loop closure, otherwise create a new
  // keyframe at the frame's pose. Exactly one action is taken and the frame
  // is integrated into the chosen keyframe.
  Action process_frame(const RgbdFrame& frame);

  // Keyframes covisibility-adjacent to `center`, plus keyframes within
  // max_dist meters and max_angle radians between camera z-axes; includes
  // center. Ascending id order.
  std::vector<int> neighbor_groups(int center, double max_dist,
                                   double max_angle) const;

  bool empty() const { return keyframes_.empty(); }
  std::size_t size() const { return keyframes_.size(); }
  const std::vector<Keyframe>& keyframes() const { return keyframes_; }
  const Keyframe& keyframe(int id) const;
  Keyframe& keyframe(int id);
  int current() const { return current_; }
  void set_current(int id);

  // Symmetric edge set keyed by (min id, max id).
  const std::map<std::pair<int, int>, double>& edges() const { return edges_; }
  double edge_weight(int i, int j) const;  // 0 when absent
  void set_edge(int i, int j, double delta);

  const GraphOptions& options() const { return options_; }
  const CameraIntrinsics& intrinsics() const { return intrinsics_; }
  const ContainerLayout& layout() const { return layout_; }

  // Appends an externally built keyframe (deserialization, tests). Its id
  // must equal the current keyframe count.
  int add_keyframe(Keyframe kf);

 private:
  CameraIntrinsics intrinsics_;
  ContainerLayout layout_;
  GraphOptions options_;
  std::vector<Keyframe> keyframes_;
  std::map<std::pair<int, int>, double> edges_;
  int current_ = -1;
};

}  // namespace vdm
