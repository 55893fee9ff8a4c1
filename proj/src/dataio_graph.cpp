#include "vdm/dataio.hpp"
#include "vdm/error.hpp"

#include <Eigen/Geometry>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace vdm::io {
namespace {

constexpr char kKeyframeMagic[4] = {'V', 'D', 'K', 'F'};
constexpr std::uint32_t kKeyframeVersion = 1;

std::string keyframe_filename(int id) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "keyframe_%06d.bin", id);
  return buf;
}

template <typename T>
void write_pod(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
void read_pod(std::istream& in, T& value, const std::string& context) {
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) {
    throw DataError("truncated keyframe file: " + context);
  }
}

void save_keyframe(const fs::path& path, const Keyframe& kf) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(kKeyframeMagic, sizeof(kKeyframeMagic));
  write_pod(out, kKeyframeVersion);
  write_pod(out, static_cast<std::int32_t>(kf.id()));
  write_pod(out, kf.timestamp());
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) write_pod(out, kf.pose().rotation(r, c));
  }
  for (int r = 0; r < 3; ++r) write_pod(out, kf.pose().translation(r));
  const auto& intr = kf.intrinsics();
  write_pod(out, intr.fx);
  write_pod(out, intr.fy);
  write_pod(out, intr.cx);
  write_pod(out, intr.cy);
  write_pod(out, static_cast<std::int32_t>(intr.width));
  write_pod(out, static_cast<std::int32_t>(intr.height));
  const auto& layout = kf.layout();
  write_pod(out, static_cast<std::int32_t>(layout.cell_px));
  write_pod(out, static_cast<std::int32_t>(layout.container_w_px));
  write_pod(out, static_cast<std::int32_t>(layout.container_h_px));
  write_pod(out, static_cast<std::int32_t>(layout.offset_u));
  write_pod(out, static_cast<std::int32_t>(layout.offset_v));
  write_pod(out, static_cast<std::int32_t>(kf.frames_integrated()));

  std::uint64_t nonempty = 0;
  for (const auto& acc : kf.cells()) {
    if (!acc.empty()) ++nonempty;
  }
  write_pod(out, nonempty);
  const int nx = layout.cells_x();
  for (int j = 0; j < layout.cells_y(); ++j) {
    for (int i = 0; i < nx; ++i) {
      const auto& acc = kf.cell({i, j});
      if (acc.empty()) continue;
      write_pod(out, static_cast<std::int32_t>(i));
      write_pod(out, static_cast<std::int32_t>(j));
      write_pod(out, acc.count);
      for (int r = 0; r < 3; ++r) write_pod(out, acc.point_sum(r));
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) write_pod(out, acc.scatter(r, c));
      }
      for (int r = 0; r < 3; ++r) write_pod(out, acc.color_sum(r));
    }
  }
  if (!out) throw IoError("write failed: " + path.string());
}

Keyframe load_keyframe(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFileError(path.string());
  const std::string ctx = path.string();

  char magic[4];
  if (!in.read(magic, sizeof(magic)) ||
      std::memcmp(magic, kKeyframeMagic, sizeof(magic)) != 0) {
    throw DataError("not a keyframe file: " + ctx);
  }
  std::uint32_t version = 0;
  read_pod(in, version, ctx);
  if (version != kKeyframeVersion) {
    throw DataError("unsupported keyframe file version in " + ctx);
  }
  std::int32_t id = 0;
  double timestamp = 0.0;
  read_pod(in, id, ctx);
  read_pod(in, timestamp, ctx);
  Se3Pose pose;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) read_pod(in, pose.rotation(r, c), ctx);
  }
  for (int r = 0; r < 3; ++r) read_pod(in, pose.translation(r), ctx);
  CameraIntrinsics intr;
  std::int32_t iw = 0, ih = 0;
  read_pod(in, intr.fx, ctx);
  read_pod(in, intr.fy, ctx);
  read_pod(in, intr.cx, ctx);
  read_pod(in, intr.cy, ctx);
  read_pod(in, iw, ctx);
  read_pod(in, ih, ctx);
  intr.width = iw;
  intr.height = ih;
  ContainerLayout layout;
  std::int32_t fields[5];
  for (auto& f : fields) read_pod(in, f, ctx);
  layout.cell_px = fields[0];
  layout.container_w_px = fields[1];
  layout.container_h_px = fields[2];
  layout.offset_u = fields[3];
  layout.offset_v = fields[4];
  std::int32_t frames_integrated = 0;
  read_pod(in, frames_integrated, ctx);

  Keyframe kf(id, pose, intr, layout, timestamp);
  kf.set_frames_integrated(frames_integrated);

  std::uint64_t nonempty = 0;
  read_pod(in, nonempty, ctx);
  for (std::uint64_t n = 0; n < nonempty; ++n) {
    std::int32_t i = 0, j = 0;
    read_pod(in, i, ctx);
    read_pod(in, j, ctx);
    if (i < 0 || i >= layout.cells_x() || j < 0 || j >= layout.cells_y()) {
      throw DataError("cell index out of range in " + ctx);
    }
    auto& acc = kf.cell({i, j});
    read_pod(in, acc.count, ctx);
    for (int r = 0; r < 3; ++r) read_pod(in, acc.point_sum(r), ctx);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) read_pod(in, acc.scatter(r, c), ctx);
    }
    for (int r = 0; r < 3; ++r) read_pod(in, acc.color_sum(r), ctx);
  }
  return kf;
}

}  // namespace

void save_graph(const fs::path& directory, const MapGraph& graph) {
  fs::create_directories(directory);
  const fs::path graph_file = directory / "graph.txt";
  std::ofstream out(graph_file);
  if (!out) throw IoError("cannot open for writing: " + graph_file.string());

  char buf[512];
  for (const auto& kf : graph.keyframes()) {
    Eigen::Quaterniond q(kf.pose().rotation);
    if (q.w() < 0.0) q.coeffs() = -q.coeffs();
    const Eigen::Vector3d& t = kf.pose().translation;
    std::snprintf(buf, sizeof(buf),
                  "KF %d %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g\n",
                  kf.id(), t.x(), t.y(), t.z(), q.x(), q.y(), q.z(), q.w(),
                  kf.timestamp());
    out << buf;
  }
  for (const auto& [key, delta] : graph.edges()) {
    std::snprintf(buf, sizeof(buf), "EDGE %d %d %.17g\n", key.first, key.second,
                  delta);
    out << buf;
  }
  if (!out) throw IoError("write failed: " + graph_file.string());

  for (const auto& kf : graph.keyframes()) {
    save_keyframe(directory / keyframe_filename(kf.id()), kf);
  }
}

MapGraph load_graph(const fs::path& directory, const GraphOptions& options) {
  const fs::path graph_file = directory / "graph.txt";
  std::ifstream in(graph_file);
  if (!in) throw MissingFileError(graph_file.string());

  struct EdgeRecord {
    int i, j;
    double delta;
  };
  std::vector<int> keyframe_ids;
  std::vector<EdgeRecord> edge_records;

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto pos = line.find_first_not_of(" \t");
    if (pos == std::string::npos || line[pos] == '#') continue;
    std::istringstream iss(line);
    std::string tag;
    iss >> tag;
    if (tag == "KF") {
      int id = 0;
      double v[8];
      if (!(iss >> id >> v[0] >> v[1] >> v[2] >> v[3] >> v[4] >> v[5] >> v[6] >>
            v[7])) {
        throw MalformedLineError(graph_file.string(), lineno, "bad KF line");
      }
      keyframe_ids.push_back(id);
    } else if (tag == "EDGE") {
      EdgeRecord e{};
      if (!(iss >> e.i >> e.j >> e.delta)) {
        throw MalformedLineError(graph_file.string(), lineno, "bad EDGE line");
      }
      edge_records.push_back(e);
    } else {
      throw MalformedLineError(graph_file.string(), lineno,
                               "unknown record: " + tag);
    }
  }
  if (keyframe_ids.empty()) {
    throw EmptyGraphError("no keyframes in " + graph_file.string());
  }
  for (std::size_t i = 0; i < keyframe_ids.size(); ++i) {
    if (keyframe_ids[i] != static_cast<int>(i)) {
      throw DataError("keyframe ids must be consecutive from 0 in " +
                      graph_file.string());
    }
  }

  // Cell payloads (with exact poses) live in the per-keyframe binaries;
  // the text file stays the interchange format.
  std::vector<Keyframe> keyframes;
  keyframes.reserve(keyframe_ids.size());
  for (int id : keyframe_ids) {
    keyframes.push_back(load_keyframe(directory / keyframe_filename(id)));
    if (keyframes.back().id() != id) {
      throw DataError("keyframe id mismatch in " + directory.string());
    }
  }

  MapGraph graph(keyframes.front().intrinsics(), keyframes.front().layout(),
                 options);
  for (auto& kf : keyframes) graph.add_keyframe(std::move(kf));
  for (const auto& e : edge_records) graph.set_edge(e.i, e.j, e.delta);
  graph.set_current(static_cast<int>(graph.size()) - 1);
  return graph;
}

}  // namespace vdm::io
