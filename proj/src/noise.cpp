#include "vdm/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace vdm {

void NoiseModel::validate() const {
  if (!(a0 > 0.0)) {
    throw std::invalid_argument("noise model: a0 must be positive");
  }
  double prev = 0.0;
  for (int i = 0; i <= 97; ++i) {
    const double z = 0.3 + i * 0.1;
    const double s = axial_sigma(*this, z);
    if (!(s > 0.0)) {
      throw std::invalid_argument("noise model: sigma_z not positive on [0.3, 10]");
    }
    if (i > 0 && s < prev) {
      throw std::invalid_argument(
          "noise model: sigma_z not non-decreasing on [0.3, 10]");
    }
    prev = s;
  }
}

double axial_sigma(const NoiseModel& model, double z) {
  if (z <= 0.0) throw std::invalid_argument("axial_sigma: depth must be positive");
  // Flat at a0 below the reference depth; the parabola would otherwise rise
  // again toward the camera.
  const double dz = std::max(z, model.z0) - model.z0;
  const double s = model.a0 + model.a1 * dz + model.a2 * dz * dz;
  return std::max(s, model.a0);
}

double lateral_sigma(const NoiseModel& model, double z) {
  if (z <= 0.0) throw std::invalid_argument("lateral_sigma: depth must be positive");
  return model.lateral_b * z;
}

bool is_elongated(const NoiseModel& model, const Ellipsoid& e, double z,
                  double k) {
  if (!(k > 0.0)) throw std::invalid_argument("is_elongated: k must be positive");
  return e.max_stddev() > k * axial_sigma(model, z);
}

}  // namespace vdm
