#include "vdm/dataio.hpp"
#include "vdm/error.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

static_assert(std::endian::native == std::endian::little,
              "binary PLY writer assumes a little-endian host");

namespace vdm::io {
namespace {

void write_header(std::ostream& out, PlyFormat format, std::size_t count,
                  bool with_covariance) {
  out << "ply\n";
  out << (format == PlyFormat::ascii ? "format ascii 1.0\n"
                                     : "format binary_little_endian 1.0\n");
  out << "element vertex " << count << "\n";
  out << "property float x\nproperty float y\nproperty float z\n";
  out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  if (with_covariance) {
    for (const char* name : {"cxx", "cxy", "cxz", "cyy", "cyz", "czz"}) {
      out << "property float " << name << "\n";
    }
  }
  out << "end_header\n";
}

void append_float(std::string& buf, float value) {
  char raw[sizeof(float)];
  std::memcpy(raw, &value, sizeof(float));
  buf.append(raw, sizeof(float));
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

struct Property {
  std::string name;
  std::string type;
  int size = 0;
};

int scalar_size(const std::string& type) {
  if (type == "char" || type == "uchar" || type == "int8" || type == "uint8") return 1;
  if (type == "short" || type == "ushort" || type == "int16" || type == "uint16") {
    return 2;
  }
  if (type == "int" || type == "uint" || type == "int32" || type == "uint32" ||
      type == "float" || type == "float32") {
    return 4;
  }
  if (type == "double" || type == "float64") return 8;
  return 0;
}

}  // namespace

void export_ply(const fs::path& path, std::span<const ColoredPoint> points,
                PlyFormat format) {
  auto out = open_out(path);
  write_header(out, format, points.size(), /*with_covariance=*/false);
  if (format == PlyFormat::ascii) {
    char line[160];
    for (const auto& p : points) {
      std::snprintf(line, sizeof(line), "%.9g %.9g %.9g %d %d %d\n",
                    static_cast<float>(p.position.x()),
                    static_cast<float>(p.position.y()),
                    static_cast<float>(p.position.z()), p.color[0], p.color[1],
                    p.color[2]);
      out << line;
    }
  } else {
    std::string buf;
    buf.reserve(points.size() * 15);
    for (const auto& p : points) {
      append_float(buf, static_cast<float>(p.position.x()));
      append_float(buf, static_cast<float>(p.position.y()));
      append_float(buf, static_cast<float>(p.position.z()));
      buf.push_back(static_cast<char>(p.color[0]));
      buf.push_back(static_cast<char>(p.color[1]));
      buf.push_back(static_cast<char>(p.color[2]));
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
  if (!out) throw IoError("write failed: " + path.string());
}

void export_ply(const fs::path& path, std::span<const WorldEllipsoid> ellipsoids,
                PlyFormat format) {
  auto out = open_out(path);
  write_header(out, format, ellipsoids.size(), /*with_covariance=*/true);
  const auto color_of = [](const Ellipsoid& e) {
    return Rgb8{static_cast<std::uint8_t>(std::lround(e.color.x())),
                static_cast<std::uint8_t>(std::lround(e.color.y())),
                static_cast<std::uint8_t>(std::lround(e.color.z()))};
  };
  if (format == PlyFormat::ascii) {
    char line[320];
    for (const auto& we : ellipsoids) {
      const auto& e = we.e;
      const auto rgb = color_of(e);
      const auto& c = e.covariance;
      std::snprintf(line, sizeof(line),
                    "%.9g %.9g %.9g %d %d %d %.9g %.9g %.9g %.9g %.9g %.9g\n",
                    static_cast<float>(e.mean.x()), static_cast<float>(e.mean.y()),
                    static_cast<float>(e.mean.z()), rgb[0], rgb[1], rgb[2],
                    static_cast<float>(c(0, 0)), static_cast<float>(c(0, 1)),
                    static_cast<float>(c(0, 2)), static_cast<float>(c(1, 1)),
                    static_cast<float>(c(1, 2)), static_cast<float>(c(2, 2)));
      out << line;
    }
  } else {
    std::string buf;
    buf.reserve(ellipsoids.size() * 39);
    for (const auto& we : ellipsoids) {
      const auto& e = we.e;
      const auto rgb = color_of(e);
      append_float(buf, static_cast<float>(e.mean.x()));
      append_float(buf, static_cast<float>(e.mean.y()));
      append_float(buf, static_cast<float>(e.mean.z()));
      buf.push_back(static_cast<char>(rgb[0]));
      buf.push_back(static_cast<char>(rgb[1]));
      buf.push_back(static_cast<char>(rgb[2]));
      const auto& c = e.covariance;
      for (const double value : {c(0, 0), c(0, 1), c(0, 2), c(1, 1), c(1, 2),
                                 c(2, 2)}) {
        append_float(buf, static_cast<float>(value));
      }
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
  if (!out) throw IoError("write failed: " + path.string());
}

PlyCloud load_ply_points(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFileError(path.string());

  std::string line;
  if (!std::getline(in, line)) throw MalformedHeaderError("empty PLY file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "ply") throw MalformedHeaderError("missing `ply` magic");

  bool ascii = false;
  bool format_seen = false;
  std::size_t vertex_count = 0;
  bool vertex_seen = false;
  std::string current_element;
  std::vector<Property> properties;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream iss(line);
    std::string keyword;
    iss >> keyword;
    if (keyword == "comment" || keyword.empty()) continue;
    if (keyword == "format") {
      std::string fmt, version;
      iss >> fmt >> version;
      if (fmt == "ascii") {
        ascii = true;
      } else if (fmt == "binary_little_endian") {
        ascii = false;
      } else {
        throw MalformedHeaderError("unsupported PLY format: " + fmt);
      }
      format_seen = true;
    } else if (keyword == "element") {
      std::size_t count = 0;
      iss >> current_element >> count;
      if (current_element == "vertex") {
        vertex_count = count;
        vertex_seen = true;
      } else if (!vertex_seen) {
        // Reading stops after the vertex data, so anything before it would
        // shift the payload in ways this loader cannot skip.
        throw MalformedHeaderError("element `" + current_element +
                                   "` precedes vertices");
      }
    } else if (keyword == "property") {
      if (current_element != "vertex") continue;
      std::string type, name;
      iss >> type >> name;
      if (type == "list") {
        throw MalformedHeaderError("list properties are not supported");
      }
      const int size = scalar_size(type);
      if (size == 0) throw MalformedHeaderError("unknown property type: " + type);
      properties.push_back({name, type, size});
    } else if (keyword == "end_header") {
      break;
    } else {
      throw MalformedHeaderError("unexpected header keyword: " + keyword);
    }
  }
  if (!format_seen) throw MalformedHeaderError("missing format line");
  if (!vertex_seen) throw MalformedHeaderError("missing vertex element");

  int ix = -1, iy = -1, iz = -1, ir = -1, ig = -1, ib = -1;
  for (int k = 0; k < static_cast<int>(properties.size()); ++k) {
    const auto& p = properties[k];
    if (p.name == "x") ix = k;
    if (p.name == "y") iy = k;
    if (p.name == "z") iz = k;
    if (p.name == "red") ir = k;
    if (p.name == "green") ig = k;
    if (p.name == "blue") ib = k;
  }
  if (ix < 0 || iy < 0 || iz < 0) {
    throw MalformedHeaderError("PLY vertices need x/y/z properties");
  }

  PlyCloud cloud;
  cloud.points.reserve(vertex_count);
  cloud.colors.reserve(vertex_count);

  if (ascii) {
    for (std::size_t n = 0; n < vertex_count; ++n) {
      if (!std::getline(in, line)) {
        throw DataError("PLY truncated at vertex " + std::to_string(n));
      }
      std::istringstream iss(line);
      std::vector<double> values(properties.size());
      for (auto& v : values) {
        if (!(iss >> v)) {
          throw DataError("PLY vertex line too short at vertex " + std::to_string(n));
        }
      }
      cloud.points.emplace_back(values[ix], values[iy], values[iz]);
      Rgb8 rgb = {128, 128, 128};
      if (ir >= 0 && ig >= 0 && ib >= 0) {
        rgb = {static_cast<std::uint8_t>(values[ir]),
               static_cast<std::uint8_t>(values[ig]),
               static_cast<std::uint8_t>(values[ib])};
      }
      cloud.colors.push_back(rgb);
    }
  } else {
    std::size_t stride = 0;
    std::vector<std::size_t> offsets(properties.size());
    for (std::size_t k = 0; k < properties.size(); ++k) {
      offsets[k] = stride;
      stride += static_cast<std::size_t>(properties[k].size);
    }
    std::vector<char> row(stride);
    const auto read_scalar = [&](int k) -> double {
      const auto& p = properties[static_cast<std::size_t>(k)];
      const char* src = row.data() + offsets[static_cast<std::size_t>(k)];
      if (p.type == "float" || p.type == "float32") {
        float v;
        std::memcpy(&v, src, 4);
        return v;
      }
      if (p.type == "double" || p.type == "float64") {
        double v;
        std::memcpy(&v, src, 8);
        return v;
      }
      if (p.size == 1) {
        unsigned char v;
        std::memcpy(&v, src, 1);
        return v;
      }
      throw MalformedHeaderError("property `" + p.name + "` has unsupported type " +
                                 p.type);
    };
    for (std::size_t n = 0; n < vertex_count; ++n) {
      if (!in.read(row.data(), static_cast<std::streamsize>(stride))) {
        throw DataError("PLY truncated at vertex " + std::to_string(n));
      }
      cloud.points.emplace_back(read_scalar(ix), read_scalar(iy), read_scalar(iz));
      Rgb8 rgb = {128, 128, 128};
      if (ir >= 0 && ig >= 0 && ib >= 0) {
        rgb = {static_cast<std::uint8_t>(read_scalar(ir)),
               static_cast<std::uint8_t>(read_scalar(ig)),
               static_cast<std::uint8_t>(read_scalar(ib))};
      }
      cloud.colors.push_back(rgb);
    }
  }
  return cloud;
}

}  // namespace vdm::io
