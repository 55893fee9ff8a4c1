#include "vdm/dataio.hpp"
#include "vdm/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace vdm::io {
namespace {

struct TimedPath {
  double timestamp;
  std::string payload;
};

std::vector<std::string> read_lines(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw MissingFileError(file.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

bool skippable(const std::string& line) {
  const auto pos = line.find_first_not_of(" \t");
  return pos == std::string::npos || line[pos] == '#';
}

bool parse_double(const std::string& token, double& out) {
  std::size_t used = 0;
  try {
    out = std::stod(token, &used);
  } catch (const std::exception&) {
    return false;
  }
  return used == token.size() && std::isfinite(out);
}

// `timestamp path` entries with strictly increasing timestamps.
std::vector<TimedPath> parse_list_file(const fs::path& file) {
  std::vector<TimedPath> out;
  int lineno = 0;
  for (const auto& line : read_lines(file)) {
    ++lineno;
    if (skippable(line)) continue;
    std::istringstream iss(line);
    std::string ts_token, payload, extra;
    if (!(iss >> ts_token >> payload)) {
      throw MalformedLineError(file.string(), lineno, "expected `timestamp path`");
    }
    if (iss >> extra) {
      throw MalformedLineError(file.string(), lineno, "trailing tokens");
    }
    double ts = 0.0;
    if (!parse_double(ts_token, ts)) {
      throw MalformedLineError(file.string(), lineno, "bad timestamp");
    }
    if (!out.empty() && ts <= out.back().timestamp) {
      throw MalformedLineError(file.string(), lineno,
                               "timestamps must be strictly increasing");
    }
    out.push_back({ts, payload});
  }
  return out;
}

std::vector<std::pair<double, Se3Pose>> parse_trajectory_file(const fs::path& file) {
  std::vector<std::pair<double, Se3Pose>> out;
  int lineno = 0;
  for (const auto& line : read_lines(file)) {
    ++lineno;
    if (skippable(line)) continue;
    std::istringstream iss(line);
    std::vector<std::string> tokens;
    std::string token;
    while (iss >> token) tokens.push_back(token);
    if (tokens.size() != 8) {
      throw MalformedLineError(file.string(), lineno,
                               "expected `timestamp tx ty tz qx qy qz qw`");
    }
    double values[8];
    for (int i = 0; i < 8; ++i) {
      if (!parse_double(tokens[i], values[i])) {
        throw MalformedLineError(file.string(), lineno, "bad number: " + tokens[i]);
      }
    }
    if (!out.empty() && values[0] <= out.back().first) {
      throw MalformedLineError(file.string(), lineno,
                               "timestamps must be strictly increasing");
    }
    const Eigen::Vector3d t(values[1], values[2], values[3]);
    out.emplace_back(values[0], Se3Pose::from_quaternion(values[4], values[5],
                                                         values[6], values[7], t));
  }
  return out;
}

// Greedy unique matching by smallest time gap; ties break toward earlier
// entries. Returns, per query index, the matched target index or -1.
std::vector<int> associate(const std::vector<double>& query,
                           const std::vector<double>& target, double tolerance) {
  struct Candidate {
    double gap;
    int qi;
    int ti;
  };
  std::vector<Candidate> candidates;
  for (int qi = 0; qi < static_cast<int>(query.size()); ++qi) {
    const double ts = query[qi];
    const auto lo = std::lower_bound(target.begin(), target.end(), ts - tolerance);
    const auto hi = std::upper_bound(target.begin(), target.end(), ts + tolerance);
    for (auto it = lo; it != hi; ++it) {
      candidates.push_back(
          {std::abs(*it - ts), qi, static_cast<int>(it - target.begin())});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    if (a.gap != b.gap) return a.gap < b.gap;
    if (a.qi != b.qi) return a.qi < b.qi;
    return a.ti < b.ti;
  });
  std::vector<int> match(query.size(), -1);
  std::vector<bool> taken(target.size(), false);
  for (const auto& c : candidates) {
    if (match[c.qi] >= 0 || taken[c.ti]) continue;
    match[c.qi] = c.ti;
    taken[c.ti] = true;
  }
  return match;
}

}  // namespace

std::vector<std::pair<double, Se3Pose>> load_trajectory(const fs::path& file) {
  return parse_trajectory_file(file);
}

std::vector<RgbdFrame> load_tum_sequence(const fs::path& directory,
                                         double tolerance, double depth_scale,
                                         TumLoadStats* stats) {
  const auto rgb_list = parse_list_file(directory / "rgb.txt");
  const auto depth_list = parse_list_file(directory / "depth.txt");
  const auto trajectory = parse_trajectory_file(directory / "groundtruth.txt");

  std::vector<double> rgb_ts, depth_ts, pose_ts;
  for (const auto& e : rgb_list) rgb_ts.push_back(e.timestamp);
  for (const auto& e : depth_list) depth_ts.push_back(e.timestamp);
  for (const auto& e : trajectory) pose_ts.push_back(e.first);

  const auto depth_match = associate(rgb_ts, depth_ts, tolerance);
  const auto pose_match = associate(rgb_ts, pose_ts, tolerance);

  TumLoadStats local;
  local.rgb_entries = static_cast<int>(rgb_list.size());
  local.depth_entries = static_cast<int>(depth_list.size());
  local.pose_entries = static_cast<int>(trajectory.size());

  std::vector<RgbdFrame> frames;
  for (std::size_t i = 0; i < rgb_list.size(); ++i) {
    if (depth_match[i] < 0 || pose_match[i] < 0) {
      ++local.dropped;
      continue;
    }
    RgbdFrame frame;
    frame.timestamp = rgb_list[i].timestamp;
    frame.color = load_color_png(directory / rgb_list[i].payload);
    frame.depth =
        load_depth_png(directory / depth_list[depth_match[i]].payload, depth_scale);
    frame.pose = trajectory[pose_match[i]].second;
    if (frame.color.width != frame.depth.width ||
        frame.color.height != frame.depth.height) {
      throw DataError("color/depth size mismatch at timestamp " +
                      std::to_string(frame.timestamp));
    }
    frames.push_back(std::move(frame));
    ++local.associated;
  }
  if (frames.empty()) {
    throw NoAssociationsError("no rgb/depth/pose associations in " +
                              directory.string());
  }
  if (local.dropped > 0) {
    std::clog << "load_tum_sequence: dropped " << local.dropped
              << " unassociated rgb entries\n";
  }
  if (stats) *stats = local;
  return frames;
}

void write_tum_sequence(const fs::path& directory,
                        std::span<const RgbdFrame> frames, double depth_scale) {
  fs::create_directories(directory / "rgb");
  fs::create_directories(directory / "depth");
  std::ofstream rgb_list(directory / "rgb.txt");
  std::ofstream depth_list(directory / "depth.txt");
  std::ofstream gt(directory / "groundtruth.txt");
  if (!rgb_list || !depth_list || !gt) {
    throw IoError("cannot create sequence files in " + directory.string());
  }
  rgb_list << "# color images\n# timestamp filename\n";
  depth_list << "# depth images\n# timestamp filename\n";
  gt << "# ground truth trajectory\n# timestamp tx ty tz qx qy qz qw\n";

  char name[64];
  char buf[512];
  for (const auto& frame : frames) {
    std::snprintf(name, sizeof(name), "%.6f.png", frame.timestamp);
    save_color_png(directory / "rgb" / name, frame.color);
    save_depth_png(directory / "depth" / name, frame.depth, depth_scale);
    std::snprintf(buf, sizeof(buf), "%.6f rgb/%s\n", frame.timestamp, name);
    rgb_list << buf;
    std::snprintf(buf, sizeof(buf), "%.6f depth/%s\n", frame.timestamp, name);
    depth_list << buf;
    const Eigen::Quaterniond q(frame.pose.rotation);
    const Eigen::Vector3d& t = frame.pose.translation;
    std::snprintf(buf, sizeof(buf),
                  "%.6f %.17g %.17g %.17g %.17g %.17g %.17g %.17g\n",
                  frame.timestamp, t.x(), t.y(), t.z(), q.x(), q.y(), q.z(),
                  q.w());
    gt << buf;
  }
}

}  // namespace vdm::io
