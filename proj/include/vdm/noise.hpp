#pragma once

#include "vdm/ndt.hpp"

namespace vdm {

// Depth-dependent RGB-D measurement uncertainty. Axial sigma follows a
// quadratic in (z - z0) clamped below at a0; lateral sigma grows linearly
// with depth. Defaults model a Kinect-class structured-light sensor.
struct NoiseModel {
  double a0 = 0.0012;     // meters
  double a1 = 0.0;        // unitless
  double a2 = 0.0019;     // 1/meters
  double z0 = 0.4;        // meters
  double lateral_b = 0.0014;  // meters per meter of depth

  // Checks sigma_z positive and non-decreasing over [0.3, 10] m.
  void validate() const;
};

// Axial (range) standard deviation at depth z. Throws std::invalid_argument
// when z <= 0.
double axial_sigma(const NoiseModel& model, double z);

// Lateral standard deviation at depth z.
double lateral_sigma(const NoiseModel& model, double z);

// True iff the ellipsoid's longest semi-axis exceeds k * sigma_z(z).
// Strict inequality: the boundary case is not elongated.
bool is_elongated(const NoiseModel& model, const Ellipsoid& e, double z,
                  double k);

}  // namespace vdm
