#pragma once

#include "vdm/geometry.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace vdm {

using Rgb8 = std::array<std::uint8_t, 3>;

struct ColorImage {
  int width = 0;
  int height = 0;
  std::vector<Rgb8> pixels;  // row-major

  static ColorImage filled(int width, int height, Rgb8 value = {0, 0, 0}) {
    return {width, height,
            std::vector<Rgb8>(static_cast<std::size_t>(width) * height, value)};
  }
  const Rgb8& at(int u, int v) const {
    return pixels[static_cast<std::size_t>(v) * width + u];
  }
  Rgb8& at(int u, int v) { return pixels[static_cast<std::size_t>(v) * width + u]; }
};

// Metric depth in meters; 0 marks an invalid measurement.
struct DepthImage {
  int width = 0;
  int height = 0;
  std::vector<float> meters;  // row-major

  static DepthImage filled(int width, int height, float value = 0.0f) {
    return {width, height,
            std::vector<float>(static_cast<std::size_t>(width) * height, value)};
  }
  float at(int u, int v) const {
    return meters[static_cast<std::size_t>(v) * width + u];
  }
  float& at(int u, int v) {
    return meters[static_cast<std::size_t>(v) * width + u];
  }
};

// One posed, registered RGB-D measurement.
struct RgbdFrame {
  double timestamp = 0.0;  // seconds
  ColorImage color;
  DepthImage depth;
  Se3Pose pose;  // world <- camera
};

struct ColoredPoint {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Rgb8 color = {128, 128, 128};
};

// Depth measurements outside this window are ignored.
struct DepthRange {
  double min_m = 0.3;
  double max_m = 10.0;

  bool contains(double d) const { return d >= min_m && d <= max_m; }
};

}  // namespace vdm
