#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <optional>

namespace vdm {

// Rigid transform in SE(3). Rotation kept as a matrix; quaternions only
// appear at I/O boundaries.
struct Se3Pose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static Se3Pose identity() { return {}; }

  static Se3Pose from_quaternion(double qx, double qy, double qz, double qw,
                                 const Eigen::Vector3d& t);

  // Camera pose at `eye` with +z toward `target`, +x right, +y down.
  static Se3Pose look_at(const Eigen::Vector3d& eye,
                         const Eigen::Vector3d& target,
                         const Eigen::Vector3d& up = Eigen::Vector3d(0, -1, 0));

  Se3Pose inverse() const;
  Se3Pose operator*(const Se3Pose& rhs) const;
  Eigen::Vector3d operator*(const Eigen::Vector3d& p) const {
    return rotation * p + translation;
  }

  // Orthonormal with determinant +1 within tol.
  bool is_valid(double tol = 1e-9) const;
};

// T = k0^-1 * ki: maps points expressed in ki's frame into k0's frame.
Se3Pose relative_transform(const Se3Pose& k0, const Se3Pose& ki);

inline Eigen::Vector3d transform_point(const Se3Pose& t, const Eigen::Vector3d& p) {
  return t * p;
}

struct CameraIntrinsics {
  double fx = 525.0;
  double fy = 525.0;
  double cx = 319.5;
  double cy = 239.5;
  int width = 640;
  int height = 480;

  // Throws std::invalid_argument when the invariants do not hold.
  void validate() const;
};

struct ImagePoint {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;  // meters
};

// Points closer than this to the camera plane are treated as behind it.
inline constexpr double kMinProjectionDepth = 1e-6;

// u = x*fx/z + cx, v = y*fy/z + cy, d = z. Empty when z <= kMinProjectionDepth.
std::optional<ImagePoint> project(const CameraIntrinsics& intr,
                                  const Eigen::Vector3d& p);

// Inverse of project; empty when depth <= 0.
std::optional<Eigen::Vector3d> unproject(const CameraIntrinsics& intr, double u,
                                         double v, double depth);

struct CellIndex {
  int i = 0;  // along u
  int j = 0;  // along v
  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

// Square-cell grid over a virtual container larger than the source image.
// The source frame sits centrally; offsets shift source-frame pixel
// coordinates into container coordinates.
struct ContainerLayout {
  int cell_px = 5;
  int container_w_px = 1280;
  int container_h_px = 960;
  int offset_u = 320;
  int offset_v = 240;

  static ContainerLayout centered(int cell_px, int container_w_px,
                                  int container_h_px, int source_w_px,
                                  int source_h_px);

  int cells_x() const { return container_w_px / cell_px; }
  int cells_y() const { return container_h_px / cell_px; }
  int cell_count() const { return cells_x() * cells_y(); }
  int linear_index(const CellIndex& c) const { return c.j * cells_x() + c.i; }

  void validate() const;
};

// Bins a source-frame pixel coordinate into a container cell. Empty when the
// shifted coordinate falls outside the container.
std::optional<CellIndex> cell_index(const ContainerLayout& layout, double u,
                                    double v);

}  // namespace vdm
