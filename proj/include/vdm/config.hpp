#pragma once

#include "vdm/geometry.hpp"
#include "vdm/graph.hpp"
#include "vdm/merge.hpp"
#include "vdm/noise.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

namespace vdm {

// Every pipeline tunable in one place. Plain `key = value` text with '#'
// comments; unknown keys are rejected.
struct RunConfig {
  // container / camera
  int cell_px = 5;
  int container_w = 1280;
  int container_h = 960;
  int image_w = 640;
  int image_h = 480;
  double fx = 525.0;
  double fy = 525.0;
  double cx = 319.5;
  double cy = 239.5;

  // keyframe routing
  double delta_update = 0.8;
  double delta_loop = 0.6;
  int covis_samples = 768;

  // sensor noise model
  double noise_a0 = 0.0012;
  double noise_a1 = 0.0;
  double noise_a2 = 0.0019;
  double noise_z0 = 0.4;
  double noise_b = 0.0014;

  // ellipsoid filtering
  double filter_k = 3.0;
  int min_support = 3;

  // merging
  double bandwidth = 0.25;
  int cluster_max_iterations = 50;
  double cluster_convergence_eps = 1e-4;
  double occlusion_depth_tol = 0.1;
  double group_max_dist = 2.0;
  double group_max_angle_deg = 45.0;

  // baselines
  double voxel_size = 0.1;

  // frame ingestion
  int stride = 1;
  double depth_min = 0.3;
  double depth_max = 10.0;
  double depth_scale = 5000.0;
  double assoc_tolerance = 0.02;

  // synthetic rendering
  double synth_noise_mult = 1.0;

  std::uint64_t seed = 0;

  static RunConfig load(const std::filesystem::path& file);
  static RunConfig parse(std::istream& in, const std::string& name);

  // Applies one `key = value` assignment; throws DataError on unknown keys
  // or unparsable values.
  void set(const std::string& key, const std::string& value);

  // Effective settings, one `key = value` per line, load-compatible.
  std::string dump() const;

  // Checks every field against its owning module's invariants.
  void validate() const;

  // Assembled module parameter views.
  CameraIntrinsics intrinsics() const;
  ContainerLayout layout() const;
  NoiseModel noise_model() const;
  GraphOptions graph_options() const;
  ClusterParams cluster_params() const;
  DepthRange depth_range() const;
};

}  // namespace vdm
