#include "vdm/config.hpp"

#include "vdm/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <variant>
#include <vector>

namespace vdm {
namespace {

using Member =
    std::variant<int RunConfig::*, double RunConfig::*, std::uint64_t RunConfig::*>;

struct Field {
  const char* name;
  Member member;
};

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"cell_px", &RunConfig::cell_px},
      {"container_w", &RunConfig::container_w},
      {"container_h", &RunConfig::container_h},
      {"image_w", &RunConfig::image_w},
      {"image_h", &RunConfig::image_h},
      {"fx", &RunConfig::fx},
      {"fy", &RunConfig::fy},
      {"cx", &RunConfig::cx},
      {"cy", &RunConfig::cy},
      {"delta_update", &RunConfig::delta_update},
      {"delta_loop", &RunConfig::delta_loop},
      {"covis_samples", &RunConfig::covis_samples},
      {"noise_a0", &RunConfig::noise_a0},
      {"noise_a1", &RunConfig::noise_a1},
      {"noise_a2", &RunConfig::noise_a2},
      {"noise_z0", &RunConfig::noise_z0},
      {"noise_b", &RunConfig::noise_b},
      {"filter_k", &RunConfig::filter_k},
      {"min_support", &RunConfig::min_support},
      {"bandwidth", &RunConfig::bandwidth},
      {"cluster_max_iterations", &RunConfig::cluster_max_iterations},
      {"cluster_convergence_eps", &RunConfig::cluster_convergence_eps},
      {"occlusion_depth_tol", &RunConfig::occlusion_depth_tol},
      {"group_max_dist", &RunConfig::group_max_dist},
      {"group_max_angle_deg", &RunConfig::group_max_angle_deg},
      {"voxel_size", &RunConfig::voxel_size},
      {"stride", &RunConfig::stride},
      {"depth_min", &RunConfig::depth_min},
      {"depth_max", &RunConfig::depth_max},
      {"depth_scale", &RunConfig::depth_scale},
      {"assoc_tolerance", &RunConfig::assoc_tolerance},
      {"synth_noise_mult", &RunConfig::synth_noise_mult},
      {"seed", &RunConfig::seed},
  };
  return table;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  for (const auto& field : fields()) {
    if (key != field.name) continue;
    try {
      std::size_t used = 0;
      if (std::holds_alternative<int RunConfig::*>(field.member)) {
        const int v = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        this->*std::get<int RunConfig::*>(field.member) = v;
      } else if (std::holds_alternative<double RunConfig::*>(field.member)) {
        const double v = std::stod(value, &used);
        if (used != value.size() || !std::isfinite(v)) {
          throw std::invalid_argument(value);
        }
        this->*std::get<double RunConfig::*>(field.member) = v;
      } else {
        const std::uint64_t v = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        this->*std::get<std::uint64_t RunConfig::*>(field.member) = v;
      }
    } catch (const std::exception&) {
      throw DataError("config: bad value for " + key + ": `" + value + "`");
    }
    return;
  }
  throw DataError("config: unknown key `" + key + "`");
}

RunConfig RunConfig::parse(std::istream& in, const std::string& name) {
  RunConfig config;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw MalformedLineError(name, lineno, "expected `key = value`");
    }
    try {
      config.set(trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
    } catch (const DataError& e) {
      throw MalformedLineError(name, lineno, e.what());
    }
  }
  config.validate();
  return config;
}

RunConfig RunConfig::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw MissingFileError(file.string());
  return parse(in, file.string());
}

std::string RunConfig::dump() const {
  std::ostringstream out;
  char buf[64];
  for (const auto& field : fields()) {
    out << field.name << " = ";
    if (std::holds_alternative<int RunConfig::*>(field.member)) {
      out << this->*std::get<int RunConfig::*>(field.member);
    } else if (std::holds_alternative<double RunConfig::*>(field.member)) {
      std::snprintf(buf, sizeof(buf), "%.17g",
                    this->*std::get<double RunConfig::*>(field.member));
      out << buf;
    } else {
      out << this->*std::get<std::uint64_t RunConfig::*>(field.member);
    }
    out << '\n';
  }
  return out.str();
}

void RunConfig::validate() const {
  try {
    intrinsics().validate();
    layout().validate();
    noise_model().validate();
    graph_options().validate();
    cluster_params().validate();
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("config: ") + e.what());
  }
  if (!(filter_k > 0.0)) throw DataError("config: filter_k must be positive");
  if (min_support < 2) throw DataError("config: min_support must be >= 2");
  if (!(voxel_size > 0.0)) throw DataError("config: voxel_size must be positive");
  if (!(depth_min > 0.0) || !(depth_max > depth_min)) {
    throw DataError("config: depth range must satisfy 0 < depth_min < depth_max");
  }
  if (!(depth_scale > 0.0)) throw DataError("config: depth_scale must be positive");
  if (!(assoc_tolerance > 0.0)) {
    throw DataError("config: assoc_tolerance must be positive");
  }
  if (synth_noise_mult < 0.0) {
    throw DataError("config: synth_noise_mult must be non-negative");
  }
}

CameraIntrinsics RunConfig::intrinsics() const {
  return {fx, fy, cx, cy, image_w, image_h};
}

ContainerLayout RunConfig::layout() const {
  return ContainerLayout::centered(cell_px, container_w, container_h, image_w,
                                   image_h);
}

NoiseModel RunConfig::noise_model() const {
  return {noise_a0, noise_a1, noise_a2, noise_z0, noise_b};
}

GraphOptions RunConfig::graph_options() const {
  GraphOptions options;
  options.delta_update = delta_update;
  options.delta_loop = delta_loop;
  options.covis_samples = covis_samples;
  options.stride = stride;
  options.depth_range = depth_range();
  return options;
}

ClusterParams RunConfig::cluster_params() const {
  ClusterParams params;
  params.bandwidth = bandwidth;
  params.max_iterations = cluster_max_iterations;
  params.convergence_eps = cluster_convergence_eps;
  params.occlusion_depth_tol = occlusion_depth_tol;
  params.group_max_dist = group_max_dist;
  params.group_max_angle = group_max_angle_deg * M_PI / 180.0;
  params.min_support = min_support;
  return params;
}

DepthRange RunConfig::depth_range() const { return {depth_min, depth_max}; }

}  // namespace vdm
