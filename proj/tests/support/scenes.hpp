#pragma once

// Shared synthetic fixtures: a small fast camera for unit tests, simple
// plane/step scenes with analytic geometry, and a desk-scale room for the
// pipeline tests.

#include "vdm/dataio.hpp"
#include "vdm/geometry.hpp"

#include <cmath>
#include <vector>

namespace scenes {

inline vdm::CameraIntrinsics small_camera() {
  return {130.0, 130.0, 79.5, 59.5, 160, 120};
}

inline vdm::ContainerLayout small_layout() {
  return vdm::ContainerLayout::centered(5, 320, 240, 160, 120);
}

inline vdm::CameraIntrinsics full_camera() {
  return {525.0, 525.0, 319.5, 239.5, 640, 480};
}

inline vdm::ContainerLayout full_layout() {
  return vdm::ContainerLayout::centered(5, 1280, 960, 640, 480);
}

// A large fronto-parallel wall at depth z (camera at origin looking +z).
inline vdm::io::SyntheticScene wall_scene(double z, double half_extent = 20.0,
                                          vdm::Rgb8 color = {200, 60, 60}) {
  vdm::io::SyntheticScene scene;
  vdm::io::PlanePrimitive wall;
  wall.point = {0.0, 0.0, z};
  wall.normal = {0.0, 0.0, -1.0};
  wall.extent_x = half_extent;
  wall.extent_y = half_extent;
  wall.color = color;
  scene.primitives.emplace_back(wall);
  return scene;
}

// A depth discontinuity: the view left of x_split sits at z_near, the rest
// at z_far. The default split is offset from x = 0 so the edge lands inside
// a container cell instead of exactly on a cell boundary.
inline vdm::io::SyntheticScene step_scene(double z_near = 1.0,
                                          double z_far = 3.0,
                                          double x_split = 0.012) {
  vdm::io::SyntheticScene scene;
  vdm::io::PlanePrimitive near_plane;
  near_plane.point = {x_split - 20.0, 0.0, z_near};
  near_plane.normal = {0.0, 0.0, -1.0};
  near_plane.extent_x = 20.0;  // spans x in [x_split - 40, x_split]
  near_plane.extent_y = 20.0;
  near_plane.color = {220, 220, 40};
  scene.primitives.emplace_back(near_plane);

  vdm::io::PlanePrimitive far_plane;
  far_plane.point = {20.0, 0.0, z_far};
  far_plane.normal = {0.0, 0.0, -1.0};
  far_plane.extent_x = 20.0;  // spans x in [0, 40]
  far_plane.extent_y = 20.0;
  far_plane.color = {40, 220, 220};
  scene.primitives.emplace_back(far_plane);
  return scene;
}

// A plane tilted about the camera x-axis so the depth seen from a camera at
// the origin spans exactly [z_near, z_far] across the image rows: the top
// row hits at z_far, the bottom row at z_near.
inline vdm::io::SyntheticScene tilted_plane_scene(
    const vdm::CameraIntrinsics& intr, double z_near = 0.5, double z_far = 5.0) {
  // Along the row-v ray (y_dir = (v - cy)/fy) the hit depth is
  // z(y_dir) = z0 / (1 + slope * y_dir); solve slope and z0 from the
  // endpoints.
  const double y_min = (0.0 - intr.cy) / intr.fy;
  const double y_max = (intr.height - 1.0 - intr.cy) / intr.fy;
  const double ratio = z_far / z_near;
  const double slope = (ratio - 1.0) / (y_max - ratio * y_min);
  const double z0 = z_near * (1.0 + slope * y_max);

  vdm::io::SyntheticScene scene;
  vdm::io::PlanePrimitive plane;
  plane.point = {0.0, 0.0, z0};
  plane.normal = Eigen::Vector3d(0.0, -slope, -1.0).normalized();
  plane.extent_x = 80.0;
  plane.extent_y = 80.0;
  plane.color = {180, 180, 180};
  scene.primitives.emplace_back(plane);
  return scene;
}

// Desk-scale room (y points down, floor at y = +1): three walls, a floor,
// a table, and two objects on the table.
inline vdm::io::SyntheticScene room_scene() {
  using namespace vdm::io;
  SyntheticScene scene;

  PlanePrimitive floor;
  floor.point = {0.0, 1.0, 1.5};
  floor.normal = {0.0, -1.0, 0.0};
  floor.extent_x = 3.0;
  floor.extent_y = 3.0;
  floor.color = {120, 100, 80};
  scene.primitives.emplace_back(floor);

  PlanePrimitive back_wall;
  back_wall.point = {0.0, 0.0, 3.2};
  back_wall.normal = {0.0, 0.0, -1.0};
  back_wall.extent_x = 3.0;
  back_wall.extent_y = 2.0;
  back_wall.color = {200, 200, 190};
  scene.primitives.emplace_back(back_wall);

  PlanePrimitive left_wall;
  left_wall.point = {-2.5, 0.0, 1.5};
  left_wall.normal = {1.0, 0.0, 0.0};
  left_wall.extent_x = 3.0;
  left_wall.extent_y = 2.0;
  left_wall.color = {190, 200, 210};
  scene.primitives.emplace_back(left_wall);

  PlanePrimitive right_wall;
  right_wall.point = {2.5, 0.0, 1.5};
  right_wall.normal = {-1.0, 0.0, 0.0};
  right_wall.extent_x = 3.0;
  right_wall.extent_y = 2.0;
  right_wall.color = {210, 200, 190};
  scene.primitives.emplace_back(right_wall);

  BoxPrimitive table;
  table.center = {0.0, 0.8, 1.8};
  table.half_extents = {0.5, 0.2, 0.4};
  table.color = {150, 90, 40};
  scene.primitives.emplace_back(table);

  SpherePrimitive ball;
  ball.center = {-0.15, 0.45, 1.7};
  ball.radius = 0.15;
  ball.color = {220, 40, 40};
  scene.primitives.emplace_back(ball);

  BoxPrimitive block;
  block.center = {0.25, 0.5, 1.9};
  block.half_extents = {0.1, 0.1, 0.1};
  block.color = {40, 60, 220};
  scene.primitives.emplace_back(block);

  return scene;
}

// Poses orbiting `target` at the given radius and height, looking at it.
inline std::vector<vdm::Se3Pose> orbit_poses(const Eigen::Vector3d& target,
                                             double radius, double height,
                                             double start_angle,
                                             double end_angle, int count) {
  std::vector<vdm::Se3Pose> poses;
  poses.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double a = count == 1
                         ? start_angle
                         : start_angle + (end_angle - start_angle) * i / (count - 1);
    const Eigen::Vector3d eye = target + Eigen::Vector3d(radius * std::sin(a),
                                                         height,
                                                         -radius * std::cos(a));
    poses.push_back(vdm::Se3Pose::look_at(eye, target));
  }
  return poses;
}

inline std::vector<vdm::RgbdFrame> render_sequence(
    const vdm::io::SyntheticScene& scene, const std::vector<vdm::Se3Pose>& poses,
    const vdm::CameraIntrinsics& intrinsics, std::uint64_t seed,
    double dt = 0.1) {
  std::vector<vdm::RgbdFrame> frames;
  frames.reserve(poses.size());
  for (std::size_t i = 0; i < poses.size(); ++i) {
    auto frame = vdm::io::render_synthetic(scene, poses[i], intrinsics, seed + i);
    frame.timestamp = 1000.0 + dt * static_cast<double>(i);
    frames.push_back(std::move(frame));
  }
  return frames;
}

}  // namespace scenes
