#pragma once

#include "vdm/geometry.hpp"
#include "vdm/image.hpp"
#include "vdm/ndt.hpp"
#include "vdm/noise.hpp"

#include <cstdint>
#include <vector>

namespace vdm {

struct IntegrationStats {
  std::int64_t points_used = 0;
  std::int64_t points_rejected = 0;  // behind the keyframe camera or off-container
  int cells_touched = 0;
};

struct CellEllipsoid {
  CellIndex cell;
  Ellipsoid ellipsoid;  // keyframe camera frame
};

// View-dependent local map: a camera pose plus a dense 2D grid of cells on
// its image plane, each cell accumulating one Gaussian.
class Keyframe {
 public:
  Keyframe(int id, const Se3Pose& pose, const CameraIntrinsics& intrinsics,
           const ContainerLayout& layout, double timestamp);

  // Re-projects the frame's valid depth pixels (sampled at `stride`) into
  // this keyframe's container and updates one batch per touched cell.
  IntegrationStats integrate_frame(const RgbdFrame& frame, int stride = 1,
                                   const DepthRange& range = {});

  // Resets every finalizable cell whose longest semi-axis exceeds
  // k * sigma_z at the cell's mean depth. Returns the number removed.
  int filter_elongated(const NoiseModel& model, double k,
                       std::int64_t min_support = kDefaultMinSupport);

  // Finalized ellipsoids of all sufficiently supported cells, row-major.
  std::vector<CellEllipsoid> ellipsoids(
      std::int64_t min_support = kDefaultMinSupport) const;

  int id() const { return id_; }
  const Se3Pose& pose() const { return pose_; }
  const CameraIntrinsics& intrinsics() const { return intrinsics_; }
  const ContainerLayout& layout() const { return layout_; }
  double timestamp() const { return timestamp_; }
  int frames_integrated() const { return frames_integrated_; }
  void set_frames_integrated(int n) { frames_integrated_ = n; }

  const MomentAccumulator& cell(const CellIndex& c) const {
    return cells_[layout_.linear_index(c)];
  }
  MomentAccumulator& cell(const CellIndex& c) {
    return cells_[layout_.linear_index(c)];
  }
  const std::vector<MomentAccumulator>& cells() const { return cells_; }

 private:
  int id_;
  Se3Pose pose_;  // world <- keyframe camera
  CameraIntrinsics intrinsics_;
  ContainerLayout layout_;
  double timestamp_;
  int frames_integrated_ = 0;
  std::vector<MomentAccumulator> cells_;  // row-major, cells_y x cells_x
};

}  // namespace vdm
