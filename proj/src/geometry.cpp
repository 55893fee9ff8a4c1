#include "vdm/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace vdm {

Se3Pose Se3Pose::from_quaternion(double qx, double qy, double qz, double qw,
                                 const Eigen::Vector3d& t) {
  Eigen::Quaterniond q(qw, qx, qy, qz);
  if (q.norm() < 1e-12) {
    throw std::invalid_argument("zero quaternion");
  }
  q.normalize();
  return {q.toRotationMatrix(), t};
}

Se3Pose Se3Pose::look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& target,
                         const Eigen::Vector3d& up) {
  Eigen::Vector3d z = target - eye;
  if (z.norm() < 1e-12) {
    throw std::invalid_argument("look_at: eye equals target");
  }
  z.normalize();
  Eigen::Vector3d x = (-up).cross(z);
  if (x.norm() < 1e-9) {
    // View direction parallel to up; pick an arbitrary right vector.
    x = std::abs(z.x()) < 0.9 ? Eigen::Vector3d::UnitX().cross(z)
                              : Eigen::Vector3d::UnitY().cross(z);
  }
  x.normalize();
  Eigen::Vector3d y = z.cross(x);
  Eigen::Matrix3d r;
  r.col(0) = x;
  r.col(1) = y;
  r.col(2) = z;
  return {r, eye};
}

Se3Pose Se3Pose::inverse() const {
  Eigen::Matrix3d rt = rotation.transpose();
  return {rt, -(rt * translation)};
}

Se3Pose Se3Pose::operator*(const Se3Pose& rhs) const {
  return {rotation * rhs.rotation, rotation * rhs.translation + translation};
}

bool Se3Pose::is_valid(double tol) const {
  if (!rotation.allFinite() || !translation.allFinite()) return false;
  Eigen::Matrix3d rtr = rotation.transpose() * rotation;
  if ((rtr - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(rotation.determinant() - 1.0) <= tol;
}

Se3Pose relative_transform(const Se3Pose& k0, const Se3Pose& ki) {
  return k0.inverse() * ki;
}

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw std::invalid_argument("intrinsics: focal lengths must be positive");
  }
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("intrinsics: image size must be positive");
  }
  if (cx < 0.0 || cx >= width || cy < 0.0 || cy >= height) {
    throw std::invalid_argument("intrinsics: principal point outside image");
  }
}

std::optional<ImagePoint> project(const CameraIntrinsics& intr,
                                  const Eigen::Vector3d& p) {
  if (p.z() <= kMinProjectionDepth) return std::nullopt;
  return ImagePoint{p.x() * intr.fx / p.z() + intr.cx,
                    p.y() * intr.fy / p.z() + intr.cy, p.z()};
}

std::optional<Eigen::Vector3d> unproject(const CameraIntrinsics& intr, double u,
                                         double v, double depth) {
  if (depth <= 0.0) return std::nullopt;
  return Eigen::Vector3d((u - intr.cx) * depth / intr.fx,
                         (v - intr.cy) * depth / intr.fy, depth);
}

ContainerLayout ContainerLayout::centered(int cell_px, int container_w_px,
                                          int container_h_px, int source_w_px,
                                          int source_h_px) {
  ContainerLayout layout;
  layout.cell_px = cell_px;
  layout.container_w_px = container_w_px;
  layout.container_h_px = container_h_px;
  // Rounded toward zero when the margin is odd.
  layout.offset_u = (container_w_px - source_w_px) / 2;
  layout.offset_v = (container_h_px - source_h_px) / 2;
  layout.validate();
  return layout;
}

void ContainerLayout::validate() const {
  if (cell_px <= 0) {
    throw std::invalid_argument("layout: cell_px must be positive");
  }
  if (container_w_px <= 0 || container_h_px <= 0) {
    throw std::invalid_argument("layout: container size must be positive");
  }
  if (container_w_px % cell_px != 0 || container_h_px % cell_px != 0) {
    throw std::invalid_argument(
        "layout: container dimensions must be multiples of cell_px");
  }
}

std::optional<CellIndex> cell_index(const ContainerLayout& layout, double u,
                                    double v) {
  const double cu = u + layout.offset_u;
  const double cv = v + layout.offset_v;
  if (cu < 0.0 || cu >= layout.container_w_px || cv < 0.0 ||
      cv >= layout.container_h_px) {
    return std::nullopt;
  }
  return CellIndex{static_cast<int>(std::floor(cu / layout.cell_px)),
                   static_cast<int>(std::floor(cv / layout.cell_px))};
}

}  // namespace vdm
