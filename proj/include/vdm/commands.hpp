#pragma once

#include "vdm/config.hpp"
#include "vdm/dataio.hpp"
#include "vdm/eval.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace vdm::cli {

namespace fs = std::filesystem;

struct BuildOptions {
  fs::path dataset_dir;
  fs::path out_dir;
  RunConfig config;
};

struct BuildSummary {
  int frames = 0;
  int skipped = 0;  // frames without any valid depth
  int created = 0;
  int updated = 0;
  int loop_closures = 0;
  int keyframes = 0;
  int edges = 0;
  std::int64_t points_used = 0;
  std::int64_t cells_filtered = 0;
};

// Streams a TUM-layout dataset through the keyframe graph, filters elongated
// ellipsoids, and serializes the graph directory plus a deterministic
// build_stats.txt.
BuildSummary cmd_build(const BuildOptions& options, std::ostream& log);

struct GlobalOptions {
  fs::path graph_dir;
  fs::path out_ply;
  io::PlyFormat format = io::PlyFormat::binary_le;
  int samples_per_ellipsoid = 0;  // 0 disables the sampled cloud
  fs::path samples_out;           // defaults next to out_ply
  RunConfig config;
};

struct GlobalSummary {
  GlobalMapStats stats;
  fs::path stats_path;
};

// Builds the merged global ellipsoid map from a graph directory and exports
// it as PLY (+ optional sampled point cloud). Timings go to the log only;
// the stats file stays byte-stable across reruns.
GlobalSummary cmd_global(const GlobalOptions& options, std::ostream& log);

struct EvalOptions {
  fs::path model_ply;
  fs::path reference_ply;
  fs::path report_out;  // optional
};

EvalReport cmd_eval(const EvalOptions& options, std::ostream& log);

struct CompareOptions {
  fs::path dataset;          // TUM directory, or a scene file with `trajectory`
  fs::path trajectory;       // required for scene input
  fs::path reference_ply;    // optional; scene input can self-generate
  fs::path report_out;       // optional key=value output
  fs::path export_prefix;    // optional: write <prefix>_<method>.ply centers
  double reference_spacing = 0.008;  // meters, for self-generated references
  RunConfig config;
};

// Runs the view-dependent pipeline and both voxel baselines on the same
// frames and reports element counts, RMSE (when a reference exists), and
// wall time.
std::vector<EvalReport> cmd_compare(const CompareOptions& options,
                                    std::ostream& log);

struct SynthOptions {
  fs::path scene_file;
  fs::path trajectory_file;
  fs::path out_dir;
  fs::path reference_out;  // optional PLY of scene surface samples
  double reference_spacing = 0.008;
  RunConfig config;
};

struct SynthSummary {
  int frames = 0;
  std::size_t reference_points = 0;
};

// Renders a scene description along a trajectory into a TUM-layout dataset.
SynthSummary cmd_synth(const SynthOptions& options, std::ostream& log);

}  // namespace vdm::cli
