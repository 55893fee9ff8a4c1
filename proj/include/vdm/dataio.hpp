#pragma once

#include "vdm/graph.hpp"
#include "vdm/image.hpp"
#include "vdm/merge.hpp"
#include "vdm/noise.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace vdm::io {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// PNG images

ColorImage load_color_png(const fs::path& path);
void save_color_png(const fs::path& path, const ColorImage& image);

// 16-bit depth PNGs; meters = raw / depth_scale.
DepthImage load_depth_png(const fs::path& path, double depth_scale);
void save_depth_png(const fs::path& path, const DepthImage& image,
                    double depth_scale);

// ---------------------------------------------------------------------------
// TUM RGB-D sequence layout

struct TumLoadStats {
  int rgb_entries = 0;
  int depth_entries = 0;
  int pose_entries = 0;
  int associated = 0;
  int dropped = 0;  // rgb entries without depth or pose within tolerance
};

// Timestamped trajectory in TUM groundtruth format:
// `timestamp tx ty tz qx qy qz qw`, '#' comments.
std::vector<std::pair<double, Se3Pose>> load_trajectory(const fs::path& file);

// Parses rgb.txt/depth.txt/groundtruth.txt, associates entries by nearest
// timestamp within `tolerance` (greedy smallest gap, earliest-first
// tie-break), and loads the associated images.
std::vector<RgbdFrame> load_tum_sequence(const fs::path& directory,
                                         double tolerance = 0.02,
                                         double depth_scale = 5000.0,
                                         TumLoadStats* stats = nullptr);

// Writes frames as a TUM-layout directory (rgb/, depth/, list files,
// groundtruth.txt).
void write_tum_sequence(const fs::path& directory,
                        std::span<const RgbdFrame> frames,
                        double depth_scale = 5000.0);

// ---------------------------------------------------------------------------
// Synthetic scenes

struct PlanePrimitive {
  Eigen::Vector3d point = Eigen::Vector3d::Zero();
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
  double extent_x = 1.0;  // half extent along the first tangent, meters
  double extent_y = 1.0;  // half extent along the second tangent, meters
  Rgb8 color = {128, 128, 128};
};

struct SpherePrimitive {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double radius = 0.5;
  Rgb8 color = {128, 128, 128};
};

struct BoxPrimitive {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d half_extents = Eigen::Vector3d::Ones();
  Rgb8 color = {128, 128, 128};
};

using ScenePrimitive = std::variant<PlanePrimitive, SpherePrimitive, BoxPrimitive>;

// Deterministic tangent basis of a plane patch; extents are measured along
// these two axes.
std::pair<Eigen::Vector3d, Eigen::Vector3d> plane_tangents(
    const Eigen::Vector3d& normal);

struct SyntheticScene {
  std::vector<ScenePrimitive> primitives;
  double noise_multiplier = 0.0;  // scales axial sigma; 0 renders exact depth
  NoiseModel noise;
};

// One primitive per line: `PLANE px py pz nx ny nz ex ey r g b`,
// `SPHERE cx cy cz rad r g b`, `BOX cx cy cz hx hy hz r g b`; '#' comments.
SyntheticScene parse_scene(std::istream& in, const std::string& name);
SyntheticScene load_scene(const fs::path& file);

// Per-pixel ray cast against the scene; nearest hit wins. Depth is the
// camera-frame z of the hit, perturbed by seeded Gaussian axial noise;
// misses render as depth 0.
RgbdFrame render_synthetic(const SyntheticScene& scene, const Se3Pose& pose,
                           const CameraIntrinsics& intrinsics,
                           std::uint64_t seed);

// Evenly spaced surface samples of every primitive, for reference clouds.
std::vector<ColoredPoint> sample_scene_surface(const SyntheticScene& scene,
                                               double spacing);

// ---------------------------------------------------------------------------
// PLY point clouds

enum class PlyFormat { ascii, binary_le };

void export_ply(const fs::path& path, std::span<const ColoredPoint> points,
                PlyFormat format);

// Ellipsoid export adds the upper-triangle covariance entries
// (cxx cxy cxz cyy cyz czz) as float properties.
void export_ply(const fs::path& path, std::span<const WorldEllipsoid> ellipsoids,
                PlyFormat format);

struct PlyCloud {
  std::vector<Eigen::Vector3d> points;
  std::vector<Rgb8> colors;  // (128,128,128) when the file has no color
};

// Reads ascii or binary little-endian PLY vertices; x/y/z required, colors
// optional, unknown scalar properties skipped.
PlyCloud load_ply_points(const fs::path& path);

// ---------------------------------------------------------------------------
// Map graph directory (graph.txt + one binary cell payload per keyframe)

void save_graph(const fs::path& directory, const MapGraph& graph);
MapGraph load_graph(const fs::path& directory, const GraphOptions& options = {});

}  // namespace vdm::io
