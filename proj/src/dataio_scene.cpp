#include "vdm/dataio.hpp"
#include "vdm/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

namespace vdm::io {
namespace {

Rgb8 parse_color(const std::vector<double>& v, std::size_t offset,
                 const std::string& file, int lineno) {
  Rgb8 rgb;
  for (int c = 0; c < 3; ++c) {
    const double x = v[offset + c];
    if (x < 0.0 || x > 255.0) {
      throw MalformedLineError(file, lineno, "color channel outside [0, 255]");
    }
    rgb[c] = static_cast<std::uint8_t>(std::lround(x));
  }
  return rgb;
}

// Camera-frame z (depth) of the nearest hit along the pixel ray, or nothing.
struct Hit {
  double depth = std::numeric_limits<double>::infinity();
  Rgb8 color = {0, 0, 0};
  bool valid = false;
};

void intersect_plane(const PlanePrimitive& plane, const Eigen::Vector3d& origin,
                     const Eigen::Vector3d& dir, Hit& hit) {
  const double denom = plane.normal.dot(dir);
  if (std::abs(denom) < 1e-12) return;
  const double s = plane.normal.dot(plane.point - origin) / denom;
  if (s <= 1e-9 || s >= hit.depth) return;
  const Eigen::Vector3d q = origin + s * dir - plane.point;
  const auto [t1, t2] = plane_tangents(plane.normal);
  if (std::abs(q.dot(t1)) > plane.extent_x || std::abs(q.dot(t2)) > plane.extent_y) {
    return;
  }
  hit.depth = s;
  hit.color = plane.color;
  hit.valid = true;
}

void intersect_sphere(const SpherePrimitive& sphere, const Eigen::Vector3d& origin,
                      const Eigen::Vector3d& dir, Hit& hit) {
  const Eigen::Vector3d oc = origin - sphere.center;
  const double a = dir.squaredNorm();
  const double b = 2.0 * oc.dot(dir);
  const double c = oc.squaredNorm() - sphere.radius * sphere.radius;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return;
  const double sq = std::sqrt(disc);
  double s = (-b - sq) / (2.0 * a);
  if (s <= 1e-9) s = (-b + sq) / (2.0 * a);
  if (s <= 1e-9 || s >= hit.depth) return;
  hit.depth = s;
  hit.color = sphere.color;
  hit.valid = true;
}

void intersect_box(const BoxPrimitive& box, const Eigen::Vector3d& origin,
                   const Eigen::Vector3d& dir, Hit& hit) {
  double t_enter = -std::numeric_limits<double>::infinity();
  double t_exit = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    const double lo = box.center[a] - box.half_extents[a];
    const double hi = box.center[a] + box.half_extents[a];
    if (std::abs(dir[a]) < 1e-12) {
      if (origin[a] < lo || origin[a] > hi) return;
      continue;
    }
    double t0 = (lo - origin[a]) / dir[a];
    double t1 = (hi - origin[a]) / dir[a];
    if (t0 > t1) std::swap(t0, t1);
    t_enter = std::max(t_enter, t0);
    t_exit = std::min(t_exit, t1);
  }
  if (t_enter > t_exit) return;
  const double s = t_enter > 1e-9 ? t_enter : t_exit;
  if (s <= 1e-9 || s >= hit.depth) return;
  hit.depth = s;
  hit.color = box.color;
  hit.valid = true;
}

void intersect(const ScenePrimitive& primitive, const Eigen::Vector3d& origin,
               const Eigen::Vector3d& dir, Hit& hit) {
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, PlanePrimitive>) {
          intersect_plane(p, origin, dir, hit);
        } else if constexpr (std::is_same_v<T, SpherePrimitive>) {
          intersect_sphere(p, origin, dir, hit);
        } else {
          intersect_box(p, origin, dir, hit);
        }
      },
      primitive);
}

}  // namespace

std::pair<Eigen::Vector3d, Eigen::Vector3d> plane_tangents(
    const Eigen::Vector3d& normal) {
  const Eigen::Vector3d n = normal.normalized();
  Eigen::Vector3d t1 = n.cross(Eigen::Vector3d::UnitZ());
  if (t1.norm() < 1e-6) t1 = Eigen::Vector3d::UnitX();
  t1.normalize();
  return {t1, n.cross(t1)};
}

SyntheticScene parse_scene(std::istream& in, const std::string& name) {
  SyntheticScene scene;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto pos = line.find_first_not_of(" \t");
    if (pos == std::string::npos || line[pos] == '#') continue;

    std::istringstream iss(line);
    std::string kind;
    iss >> kind;
    std::vector<double> v;
    double x;
    while (iss >> x) v.push_back(x);
    if (!iss.eof()) {
      throw MalformedLineError(name, lineno, "non-numeric token");
    }

    if (kind == "PLANE") {
      if (v.size() != 11) {
        throw MalformedLineError(name, lineno,
                                 "PLANE needs px py pz nx ny nz ex ey r g b");
      }
      PlanePrimitive p;
      p.point = {v[0], v[1], v[2]};
      p.normal = {v[3], v[4], v[5]};
      p.extent_x = v[6];
      p.extent_y = v[7];
      if (p.normal.norm() < 1e-9 || p.extent_x <= 0.0 || p.extent_y <= 0.0) {
        throw MalformedLineError(name, lineno, "degenerate plane");
      }
      p.normal.normalize();
      p.color = parse_color(v, 8, name, lineno);
      scene.primitives.emplace_back(p);
    } else if (kind == "SPHERE") {
      if (v.size() != 7) {
        throw MalformedLineError(name, lineno, "SPHERE needs cx cy cz rad r g b");
      }
      SpherePrimitive p;
      p.center = {v[0], v[1], v[2]};
      p.radius = v[3];
      if (p.radius <= 0.0) throw MalformedLineError(name, lineno, "degenerate sphere");
      p.color = parse_color(v, 4, name, lineno);
      scene.primitives.emplace_back(p);
    } else if (kind == "BOX") {
      if (v.size() != 9) {
        throw MalformedLineError(name, lineno,
                                 "BOX needs cx cy cz hx hy hz r g b");
      }
      BoxPrimitive p;
      p.center = {v[0], v[1], v[2]};
      p.half_extents = {v[3], v[4], v[5]};
      if (p.half_extents.minCoeff() <= 0.0) {
        throw MalformedLineError(name, lineno, "degenerate box");
      }
      p.color = parse_color(v, 6, name, lineno);
      scene.primitives.emplace_back(p);
    } else {
      throw MalformedLineError(name, lineno, "unknown primitive: " + kind);
    }
  }
  return scene;
}

SyntheticScene load_scene(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw MissingFileError(file.string());
  return parse_scene(in, file.string());
}

RgbdFrame render_synthetic(const SyntheticScene& scene, const Se3Pose& pose,
                           const CameraIntrinsics& intrinsics,
                           std::uint64_t seed) {
  RgbdFrame frame;
  frame.pose = pose;
  frame.color = ColorImage::filled(intrinsics.width, intrinsics.height);
  frame.depth = DepthImage::filled(intrinsics.width, intrinsics.height);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::Vector3d origin = pose.translation;

  for (int v = 0; v < intrinsics.height; ++v) {
    for (int u = 0; u < intrinsics.width; ++u) {
      // Unit-z camera ray: the hit parameter equals the camera-frame depth.
      const Eigen::Vector3d dir_cam((u - intrinsics.cx) / intrinsics.fx,
                                    (v - intrinsics.cy) / intrinsics.fy, 1.0);
      const Eigen::Vector3d dir = pose.rotation * dir_cam;
      Hit hit;
      for (const auto& primitive : scene.primitives) {
        intersect(primitive, origin, dir, hit);
      }
      if (!hit.valid) continue;
      double depth = hit.depth;
      if (scene.noise_multiplier > 0.0) {
        depth += normal(rng) * axial_sigma(scene.noise, depth) *
                 scene.noise_multiplier;
      }
      if (depth <= 0.0) continue;
      frame.depth.at(u, v) = static_cast<float>(depth);
      frame.color.at(u, v) = hit.color;
    }
  }
  return frame;
}

std::vector<ColoredPoint> sample_scene_surface(const SyntheticScene& scene,
                                               double spacing) {
  if (!(spacing > 0.0)) {
    throw std::invalid_argument("sample_scene_surface: spacing must be positive");
  }
  std::vector<ColoredPoint> out;

  const auto sample_rect = [&](const Eigen::Vector3d& corner,
                               const Eigen::Vector3d& edge_a,
                               const Eigen::Vector3d& edge_b, Rgb8 color) {
    const int na = std::max(1, static_cast<int>(std::lround(edge_a.norm() / spacing)));
    const int nb = std::max(1, static_cast<int>(std::lround(edge_b.norm() / spacing)));
    for (int a = 0; a <= na; ++a) {
      for (int b = 0; b <= nb; ++b) {
        out.push_back({corner + edge_a * (double(a) / na) + edge_b * (double(b) / nb),
                       color});
      }
    }
  };

  for (const auto& primitive : scene.primitives) {
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, PlanePrimitive>) {
            const auto [t1, t2] = plane_tangents(p.normal);
            sample_rect(p.point - t1 * p.extent_x - t2 * p.extent_y,
                        2.0 * p.extent_x * t1, 2.0 * p.extent_y * t2, p.color);
          } else if constexpr (std::is_same_v<T, SpherePrimitive>) {
            const int rings =
                std::max(3, static_cast<int>(std::lround(M_PI * p.radius / spacing)));
            for (int r = 0; r <= rings; ++r) {
              const double theta = M_PI * r / rings;
              const double ring_radius = p.radius * std::sin(theta);
              const int steps = std::max(
                  1, static_cast<int>(std::lround(2.0 * M_PI * ring_radius / spacing)));
              for (int s = 0; s < steps; ++s) {
                const double phi = 2.0 * M_PI * s / steps;
                out.push_back({p.center + p.radius * Eigen::Vector3d(
                                                         std::sin(theta) * std::cos(phi),
                                                         std::sin(theta) * std::sin(phi),
                                                         std::cos(theta)),
                               p.color});
              }
            }
          } else {
            const Eigen::Vector3d& h = p.half_extents;
            const Eigen::Vector3d x = Eigen::Vector3d::UnitX() * h.x();
            const Eigen::Vector3d y = Eigen::Vector3d::UnitY() * h.y();
            const Eigen::Vector3d z = Eigen::Vector3d::UnitZ() * h.z();
            sample_rect(p.center - x - y - z, 2 * x, 2 * y, p.color);  // z-
            sample_rect(p.center - x - y + z, 2 * x, 2 * y, p.color);  // z+
            sample_rect(p.center - x - y - z, 2 * x, 2 * z, p.color);  // y-
            sample_rect(p.center - x + y - z, 2 * x, 2 * z, p.color);  // y+
            sample_rect(p.center - x - y - z, 2 * y, 2 * z, p.color);  // x-
            sample_rect(p.center + x - y - z, 2 * y, 2 * z, p.color);  // x+
          }
        },
        primitive);
  }
  return out;
}

}  // namespace vdm::io
