#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <span>

namespace vdm {

inline constexpr double kEigenvalueFloor = 1e-12;  // m^2
inline constexpr std::int64_t kDefaultMinSupport = 3;

// Running Gaussian moments of one cell: point count, point sum, unnormalized
// scatter about the mean, and per-channel color sum (0-255 scale).
struct MomentAccumulator {
  std::int64_t count = 0;
  Eigen::Vector3d point_sum = Eigen::Vector3d::Zero();
  Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();
  Eigen::Vector3d color_sum = Eigen::Vector3d::Zero();

  bool empty() const { return count == 0; }
  Eigen::Vector3d mean() const { return point_sum / static_cast<double>(count); }
  Eigen::Vector3d mean_color() const {
    return color_sum / static_cast<double>(count);
  }

  // Folds one batch of points and their colors into the running moments.
  void add_batch(std::span<const Eigen::Vector3d> points,
                 std::span<const Eigen::Vector3d> colors);

  void reset() { *this = MomentAccumulator{}; }
};

// Mean after folding in a non-empty batch; the accumulator is not modified.
Eigen::Vector3d update_mean(const MomentAccumulator& acc,
                            std::span<const Eigen::Vector3d> batch);

// Scatter after folding in a non-empty batch. The incremental form adds the
// batch's own scatter plus a mean-separation correction; with an empty
// accumulator it reduces to the plain batch scatter.
Eigen::Matrix3d update_scatter(const MomentAccumulator& acc,
                               std::span<const Eigen::Vector3d> batch);

// Mean color after folding in a non-empty color batch.
Eigen::Vector3d update_color(const MomentAccumulator& acc,
                             std::span<const Eigen::Vector3d> colors);

// Two-set moment merge; equals the moments of the concatenated point sets.
// Commutative, associative, with the empty accumulator as identity.
MomentAccumulator merge_accumulators(const MomentAccumulator& a,
                                     const MomentAccumulator& b);

// Finalized Gaussian of one cell. Eigenpairs are cached sorted descending,
// eigenvalues floored at kEigenvalueFloor so planar cells stay decomposable.
struct Ellipsoid {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
  Eigen::Vector3d color = Eigen::Vector3d::Zero();  // RGB, 0-255
  std::int64_t support = 0;
  Eigen::Vector3d eigenvalues = Eigen::Vector3d::Zero();   // descending
  Eigen::Matrix3d eigenvectors = Eigen::Matrix3d::Identity();  // columns

  double max_stddev() const { return std::sqrt(eigenvalues(0)); }

  static Ellipsoid from_moments(const Eigen::Vector3d& mean,
                                const Eigen::Matrix3d& covariance,
                                const Eigen::Vector3d& color,
                                std::int64_t support);
};

// Converts running moments into an ellipsoid with Bessel-corrected
// covariance. Empty below min_support.
std::optional<Ellipsoid> finalize(const MomentAccumulator& acc,
                                  std::int64_t min_support = kDefaultMinSupport);

}  // namespace vdm
