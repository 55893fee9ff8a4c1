#include "vdm/commands.hpp"

#include "vdm/baseline.hpp"
#include "vdm/error.hpp"
#include "vdm/merge.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace vdm::cli {
namespace {

bool has_valid_depth(const RgbdFrame& frame, const DepthRange& range) {
  for (const float d : frame.depth.meters) {
    if (std::isfinite(d) && range.contains(d)) return true;
  }
  return false;
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw IoError("write failed: " + path.string());
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::vector<RgbdFrame> render_scene_frames(const fs::path& scene_file,
                                           const fs::path& trajectory_file,
                                           const RunConfig& config) {
  auto scene = io::load_scene(scene_file);
  scene.noise = config.noise_model();
  scene.noise_multiplier = config.synth_noise_mult;
  const auto trajectory = io::load_trajectory(trajectory_file);
  if (trajectory.empty()) {
    throw EmptyInputError("trajectory has no poses: " + trajectory_file.string());
  }
  std::vector<RgbdFrame> frames;
  frames.reserve(trajectory.size());
  const auto intrinsics = config.intrinsics();
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    auto frame = io::render_synthetic(scene, trajectory[i].second, intrinsics,
                                      config.seed + i);
    frame.timestamp = trajectory[i].first;
    frames.push_back(std::move(frame));
  }
  return frames;
}

}  // namespace

BuildSummary cmd_build(const BuildOptions& options, std::ostream& log) {
  const RunConfig& config = options.config;
  config.validate();

  const auto frames = io::load_tum_sequence(options.dataset_dir,
                                            config.assoc_tolerance,
                                            config.depth_scale);
  MapGraph graph(config.intrinsics(), config.layout(), config.graph_options());

  BuildSummary summary;
  for (const auto& frame : frames) {
    ++summary.frames;
    if (!has_valid_depth(frame, config.depth_range())) {
      ++summary.skipped;
      continue;
    }
    const Action action = graph.process_frame(frame);
    summary.points_used += action.stats.points_used;
    switch (action.kind) {
      case ActionKind::CreatedKeyframe:
        ++summary.created;
        break;
      case ActionKind::UpdatedCurrent:
        ++summary.updated;
        break;
      case ActionKind::LoopClosureUpdate:
        ++summary.loop_closures;
        break;
    }
  }
  if (graph.empty()) {
    throw NoAssociationsError("no usable frames in " + options.dataset_dir.string());
  }

  const NoiseModel noise = config.noise_model();
  for (auto id = 0; id < static_cast<int>(graph.size()); ++id) {
    summary.cells_filtered += graph.keyframe(id).filter_elongated(
        noise, config.filter_k, config.min_support);
  }
  summary.keyframes = static_cast<int>(graph.size());
  summary.edges = static_cast<int>(graph.edges().size());

  io::save_graph(options.out_dir, graph);

  std::ostringstream stats;
  stats << "frames=" << summary.frames << '\n'
        << "skipped=" << summary.skipped << '\n'
        << "created=" << summary.created << '\n'
        << "updated=" << summary.updated << '\n'
        << "loop_closures=" << summary.loop_closures << '\n'
        << "keyframes=" << summary.keyframes << '\n'
        << "edges=" << summary.edges << '\n'
        << "points_used=" << summary.points_used << '\n'
        << "cells_filtered=" << summary.cells_filtered << '\n';
  write_text_file(options.out_dir / "build_stats.txt", stats.str());

  log << "build: " << summary.frames << " frames (" << summary.skipped
      << " skipped) -> " << summary.keyframes << " keyframes, " << summary.edges
      << " edges; actions: created=" << summary.created
      << " updated=" << summary.updated
      << " loop_closures=" << summary.loop_closures
      << "; filtered cells=" << summary.cells_filtered << '\n';
  return summary;
}

GlobalSummary cmd_global(const GlobalOptions& options, std::ostream& log) {
  const RunConfig& config = options.config;
  config.validate();

  const MapGraph graph = io::load_graph(options.graph_dir, config.graph_options());
  const GlobalMap map = build_global_map(graph, config.cluster_params());

  io::export_ply(options.out_ply, map.ellipsoids, options.format);
  if (options.samples_per_ellipsoid > 0) {
    const auto cloud =
        sample_point_cloud(map, options.samples_per_ellipsoid, config.seed);
    fs::path samples_path = options.samples_out;
    if (samples_path.empty()) {
      samples_path = options.out_ply;
      samples_path.replace_extension(".samples.ply");
    }
    io::export_ply(samples_path, cloud, options.format);
  }

  GlobalSummary summary;
  summary.stats = map.stats;
  summary.stats_path = options.out_ply;
  summary.stats_path += ".stats";

  std::ostringstream stats;
  stats << "keyframes=" << graph.size() << '\n'
        << "edges=" << graph.edges().size() << '\n'
        << "sigma_e=" << map.stats.input_count << '\n'
        << "sigma_e_prime=" << map.stats.output_count << '\n';
  write_text_file(summary.stats_path, stats.str());

  char line[160];
  std::snprintf(line, sizeof(line),
                "global: sigma_e=%lld sigma_e_prime=%lld t_g=%.3fs\n",
                static_cast<long long>(map.stats.input_count),
                static_cast<long long>(map.stats.output_count),
                map.stats.generation_seconds);
  log << line;
  return summary;
}

EvalReport cmd_eval(const EvalOptions& options, std::ostream& log) {
  const auto model = io::load_ply_points(options.model_ply);
  const auto reference = io::load_ply_points(options.reference_ply);
  if (model.points.empty() || reference.points.empty()) {
    throw EmptyInputError("eval: empty model or reference cloud");
  }

  EvalReport report;
  report.method = options.model_ply.filename().string();
  const auto t0 = std::chrono::steady_clock::now();
  std::tie(report.rmse_mm, report.mean_err_mm) =
      nearest_neighbor_rmse(model.points, reference.points);
  report.runtime_s = seconds_since(t0);
  report.element_count = static_cast<std::int64_t>(model.points.size());
  report.parameters = "reference=" + options.reference_ply.filename().string();

  const std::string kv = format_report_kv(report);
  if (!options.report_out.empty()) write_text_file(options.report_out, kv);
  const EvalReport table_row[] = {report};
  log << format_report_table(table_row) << kv;
  return report;
}

std::vector<EvalReport> cmd_compare(const CompareOptions& options,
                                    std::ostream& log) {
  const RunConfig& config = options.config;
  config.validate();

  std::vector<RgbdFrame> frames;
  std::vector<Eigen::Vector3d> reference;
  if (fs::is_directory(options.dataset)) {
    frames = io::load_tum_sequence(options.dataset, config.assoc_tolerance,
                                   config.depth_scale);
  } else {
    if (options.trajectory.empty()) {
      throw DataError("compare: scene input needs a trajectory file");
    }
    frames = render_scene_frames(options.dataset, options.trajectory, config);
    if (options.reference_ply.empty()) {
      auto scene = io::load_scene(options.dataset);
      for (const auto& p :
           io::sample_scene_surface(scene, options.reference_spacing)) {
        reference.push_back(p.position);
      }
    }
  }
  if (!options.reference_ply.empty()) {
    reference = io::load_ply_points(options.reference_ply).points;
  }
  if (frames.empty()) throw EmptyInputError("compare: no frames");

  std::vector<EvalReport> reports;
  const auto export_centers = [&](const std::string& method,
                                  const std::vector<ColoredPoint>& centers) {
    if (options.export_prefix.empty()) return;
    fs::path path = options.export_prefix;
    path += "_" + method + ".ply";
    io::export_ply(path, centers, io::PlyFormat::binary_le);
  };

  // View-dependent pipeline.
  {
    const auto t0 = std::chrono::steady_clock::now();
    MapGraph graph(config.intrinsics(), config.layout(), config.graph_options());
    for (const auto& frame : frames) {
      if (!has_valid_depth(frame, config.depth_range())) continue;
      graph.process_frame(frame);
    }
    if (graph.empty()) throw EmptyInputError("compare: no usable frames");
    const NoiseModel noise = config.noise_model();
    for (auto id = 0; id < static_cast<int>(graph.size()); ++id) {
      graph.keyframe(id).filter_elongated(noise, config.filter_k,
                                          config.min_support);
    }
    const GlobalMap map = build_global_map(graph, config.cluster_params());
    EvalReport report = map_statistics(map);
    report.runtime_s = seconds_since(t0);
    std::vector<Eigen::Vector3d> centers;
    std::vector<ColoredPoint> colored;
    centers.reserve(map.ellipsoids.size());
    for (const auto& we : map.ellipsoids) {
      centers.push_back(we.e.mean);
      colored.push_back(
          {we.e.mean,
           {static_cast<std::uint8_t>(std::lround(we.e.color.x())),
            static_cast<std::uint8_t>(std::lround(we.e.color.y())),
            static_cast<std::uint8_t>(std::lround(we.e.color.z()))}});
    }
    if (!reference.empty()) {
      std::tie(report.rmse_mm, report.mean_err_mm) =
          nearest_neighbor_rmse(centers, reference);
    }
    export_centers(report.method, colored);
    reports.push_back(std::move(report));
  }

  // Voxel baselines on the same frames.
  for (const VoxelMode mode : {VoxelMode::occupancy, VoxelMode::ndt}) {
    const auto t0 = std::chrono::steady_clock::now();
    VoxelGrid grid(config.voxel_size, Eigen::Vector3d::Zero(), mode);
    const auto intrinsics = config.intrinsics();
    for (const auto& frame : frames) {
      grid.integrate_frame(frame, intrinsics, config.stride,
                           config.depth_range());
    }
    EvalReport report = map_statistics(grid, 0.0, config.min_support);
    report.runtime_s = seconds_since(t0);
    const auto centers = grid.centers(0.0, config.min_support);
    if (!reference.empty() && !centers.empty()) {
      std::tie(report.rmse_mm, report.mean_err_mm) =
          nearest_neighbor_rmse(centers, reference);
    }
    std::vector<ColoredPoint> colored;
    colored.reserve(centers.size());
    for (const auto& c : centers) colored.push_back({c, {128, 128, 128}});
    export_centers(report.method, colored);
    reports.push_back(std::move(report));
  }

  log << format_report_table(reports);
  if (!options.report_out.empty()) {
    std::string kv;
    for (const auto& r : reports) kv += format_report_kv(r) + "\n";
    write_text_file(options.report_out, kv);
  }
  return reports;
}

SynthSummary cmd_synth(const SynthOptions& options, std::ostream& log) {
  const RunConfig& config = options.config;
  config.validate();

  const auto frames = render_scene_frames(options.scene_file,
                                          options.trajectory_file, config);
  io::write_tum_sequence(options.out_dir, frames, config.depth_scale);

  SynthSummary summary;
  summary.frames = static_cast<int>(frames.size());
  if (!options.reference_out.empty()) {
    auto scene = io::load_scene(options.scene_file);
    const auto cloud = io::sample_scene_surface(scene, options.reference_spacing);
    io::export_ply(options.reference_out, cloud, io::PlyFormat::binary_le);
    summary.reference_points = cloud.size();
  }
  log << "synth: wrote " << summary.frames << " frames to "
      << options.out_dir.string();
  if (summary.reference_points > 0) {
    log << " and " << summary.reference_points << " reference points";
  }
  log << '\n';
  return summary;
}

}  // namespace vdm::cli
