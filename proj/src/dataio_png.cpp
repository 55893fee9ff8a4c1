#include "vdm/dataio.hpp"
#include "vdm/error.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <algorithm>
#include <cmath>

namespace vdm::io {

ColorImage load_color_png(const fs::path& path) {
  cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (bgr.empty()) throw MissingFileError(path.string());
  ColorImage out = ColorImage::filled(bgr.cols, bgr.rows);
  for (int v = 0; v < bgr.rows; ++v) {
    const auto* row = bgr.ptr<cv::Vec3b>(v);
    for (int u = 0; u < bgr.cols; ++u) {
      out.at(u, v) = {row[u][2], row[u][1], row[u][0]};
    }
  }
  return out;
}

void save_color_png(const fs::path& path, const ColorImage& image) {
  cv::Mat bgr(image.height, image.width, CV_8UC3);
  for (int v = 0; v < image.height; ++v) {
    auto* row = bgr.ptr<cv::Vec3b>(v);
    for (int u = 0; u < image.width; ++u) {
      const Rgb8& rgb = image.at(u, v);
      row[u] = {rgb[2], rgb[1], rgb[0]};
    }
  }
  if (!cv::imwrite(path.string(), bgr)) {
    throw IoError("failed to write " + path.string());
  }
}

DepthImage load_depth_png(const fs::path& path, double depth_scale) {
  cv::Mat raw = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (raw.empty()) throw MissingFileError(path.string());
  if (raw.type() != CV_16UC1) {
    throw DataError("depth image must be 16-bit single channel: " + path.string());
  }
  DepthImage out = DepthImage::filled(raw.cols, raw.rows);
  for (int v = 0; v < raw.rows; ++v) {
    const auto* row = raw.ptr<std::uint16_t>(v);
    for (int u = 0; u < raw.cols; ++u) {
      out.at(u, v) = static_cast<float>(row[u] / depth_scale);
    }
  }
  return out;
}

void save_depth_png(const fs::path& path, const DepthImage& image,
                    double depth_scale) {
  cv::Mat raw(image.height, image.width, CV_16UC1);
  for (int v = 0; v < image.height; ++v) {
    auto* row = raw.ptr<std::uint16_t>(v);
    for (int u = 0; u < image.width; ++u) {
      const double scaled = std::round(image.at(u, v) * depth_scale);
      row[u] = static_cast<std::uint16_t>(std::clamp(scaled, 0.0, 65535.0));
    }
  }
  if (!cv::imwrite(path.string(), raw)) {
    throw IoError("failed to write " + path.string());
  }
}

}  // namespace vdm::io
