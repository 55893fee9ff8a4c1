#include "vdm/commands.hpp"
#include "vdm/error.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

namespace {

struct CommonFlags {
  std::string config_file;
  std::uint64_t seed = 0;
  int stride = 1;
  int cell_px = 5;
  double voxel = 0.1;
  bool dump_config = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_file,
                  "config file with `key = value` lines");
  cmd->add_option("--seed", flags.seed, "RNG seed");
  cmd->add_option("--stride", flags.stride, "pixel stride for integration");
  cmd->add_option("--cell-px", flags.cell_px, "container cell size in pixels");
  cmd->add_option("--voxel", flags.voxel, "baseline voxel size in meters");
  cmd->add_flag("--dump-config", flags.dump_config,
                "print the effective settings and exit");
}

vdm::RunConfig make_config(CLI::App* cmd, const CommonFlags& flags) {
  vdm::RunConfig config;
  if (!flags.config_file.empty()) config = vdm::RunConfig::load(flags.config_file);
  if (cmd->count("--seed")) config.seed = flags.seed;
  if (cmd->count("--stride")) config.stride = flags.stride;
  if (cmd->count("--cell-px")) config.cell_px = flags.cell_px;
  if (cmd->count("--voxel")) config.voxel_size = flags.voxel;
  config.validate();
  return config;
}

vdm::io::PlyFormat parse_format(const std::string& name) {
  return name == "ascii" ? vdm::io::PlyFormat::ascii
                         : vdm::io::PlyFormat::binary_le;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"view-dependent RGB-D mapping pipeline"};
  app.require_subcommand(1);

  // build
  auto* build = app.add_subcommand("build",
                                   "build a keyframe graph from a TUM dataset");
  CommonFlags build_flags;
  std::string build_dataset, build_out;
  build->add_option("dataset", build_dataset, "TUM-layout dataset directory")
      ->required();
  build->add_option("--out", build_out, "output graph directory")->required();
  add_common(build, build_flags);

  // global
  auto* global = app.add_subcommand("global",
                                    "merge a graph into a global ellipsoid map");
  CommonFlags global_flags;
  std::string global_dir, global_out, global_samples_out;
  std::string global_format = "binary";
  int global_samples = 0;
  global->add_option("graph", global_dir, "graph directory from `build`")
      ->required();
  global->add_option("--out", global_out, "output ellipsoid PLY")->required();
  global->add_option("--format", global_format, "ascii|binary")
      ->check(CLI::IsMember({"ascii", "binary"}));
  global->add_option("--samples", global_samples,
                     "also export N sampled points per ellipsoid");
  global->add_option("--samples-out", global_samples_out,
                     "path of the sampled cloud PLY");
  add_common(global, global_flags);

  // eval
  auto* eval = app.add_subcommand("eval", "nearest-neighbor RMSE of a model PLY");
  std::string eval_model, eval_reference, eval_out;
  eval->add_option("model", eval_model, "model point cloud (PLY)")->required();
  eval->add_option("reference", eval_reference, "reference point cloud (PLY)")
      ->required();
  eval->add_option("--out", eval_out, "write the report as key=value lines");

  // compare
  auto* compare = app.add_subcommand(
      "compare", "run the pipeline and voxel baselines on the same frames");
  CommonFlags compare_flags;
  std::string compare_input, compare_traj, compare_reference, compare_out;
  compare->add_option("input", compare_input,
                      "TUM dataset directory or scene description file")
      ->required();
  compare->add_option("--traj", compare_traj,
                      "trajectory file (required for scene input)");
  compare->add_option("--reference", compare_reference, "reference PLY for RMSE");
  compare->add_option("--out", compare_out, "write reports as key=value lines");
  std::string compare_export;
  compare->add_option("--export-prefix", compare_export,
                      "write <prefix>_<method>.ply center clouds");
  add_common(compare, compare_flags);

  // synth
  auto* synth = app.add_subcommand(
      "synth", "render a scene description into a TUM-layout dataset");
  CommonFlags synth_flags;
  std::string synth_scene, synth_traj, synth_out, synth_ref_out;
  double synth_ref_spacing = 0.008;
  synth->add_option("scene", synth_scene, "scene description file")->required();
  synth->add_option("--traj", synth_traj, "trajectory file")->required();
  synth->add_option("--out", synth_out, "output dataset directory")->required();
  synth->add_option("--ref-out", synth_ref_out,
                    "also export a surface reference cloud PLY");
  synth->add_option("--ref-spacing", synth_ref_spacing,
                    "reference sample spacing in meters");
  add_common(synth, synth_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    CommonFlags* flags = nullptr;
    if (sub == build) flags = &build_flags;
    if (sub == global) flags = &global_flags;
    if (sub == compare) flags = &compare_flags;
    if (sub == synth) flags = &synth_flags;

    if (flags && flags->dump_config) {
      std::cout << make_config(sub, *flags).dump();
      return 0;
    }

    if (sub == build) {
      vdm::cli::BuildOptions options;
      options.dataset_dir = build_dataset;
      options.out_dir = build_out;
      options.config = make_config(build, build_flags);
      vdm::cli::cmd_build(options, std::cout);
    } else if (sub == global) {
      vdm::cli::GlobalOptions options;
      options.graph_dir = global_dir;
      options.out_ply = global_out;
      options.format = parse_format(global_format);
      options.samples_per_ellipsoid = global_samples;
      options.samples_out = global_samples_out;
      options.config = make_config(global, global_flags);
      vdm::cli::cmd_global(options, std::cout);
    } else if (sub == eval) {
      vdm::cli::EvalOptions options;
      options.model_ply = eval_model;
      options.reference_ply = eval_reference;
      options.report_out = eval_out;
      vdm::cli::cmd_eval(options, std::cout);
    } else if (sub == compare) {
      vdm::cli::CompareOptions options;
      options.dataset = compare_input;
      options.trajectory = compare_traj;
      options.reference_ply = compare_reference;
      options.report_out = compare_out;
      options.export_prefix = compare_export;
      options.config = make_config(compare, compare_flags);
      vdm::cli::cmd_compare(options, std::cout);
    } else if (sub == synth) {
      vdm::cli::SynthOptions options;
      options.scene_file = synth_scene;
      options.trajectory_file = synth_traj;
      options.out_dir = synth_out;
      options.reference_out = synth_ref_out;
      options.reference_spacing = synth_ref_spacing;
      options.config = make_config(synth, synth_flags);
      vdm::cli::cmd_synth(options, std::cout);
    }
  } catch (const vdm::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
