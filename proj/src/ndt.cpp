#include "vdm/ndt.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <stdexcept>

namespace vdm {
namespace {

Eigen::Vector3d batch_sum(std::span<const Eigen::Vector3d> batch) {
  Eigen::Vector3d s = Eigen::Vector3d::Zero();
  for (const auto& p : batch) s += p;
  return s;
}

void require_non_empty(std::span<const Eigen::Vector3d> batch) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
}

}  // namespace

void MomentAccumulator::add_batch(std::span<const Eigen::Vector3d> points,
                                  std::span<const Eigen::Vector3d> colors) {
  require_non_empty(points);
  if (colors.size() != points.size()) {
    throw std::invalid_argument("batch size mismatch between points and colors");
  }
  scatter = update_scatter(*this, points);
  point_sum += batch_sum(points);
  color_sum += batch_sum(colors);
  count += static_cast<std::int64_t>(points.size());
}

Eigen::Vector3d update_mean(const MomentAccumulator& acc,
                            std::span<const Eigen::Vector3d> batch) {
  require_non_empty(batch);
  const double n = static_cast<double>(batch.size());
  const Eigen::Vector3d s_n = batch_sum(batch);
  if (acc.empty()) return s_n / n;
  const double m = static_cast<double>(acc.count);
  return (acc.mean() * m + s_n) / (m + n);
}

Eigen::Matrix3d update_scatter(const MomentAccumulator& acc,
                               std::span<const Eigen::Vector3d> batch) {
  require_non_empty(batch);
  const double n = static_cast<double>(batch.size());
  const Eigen::Vector3d s_n = batch_sum(batch);
  const Eigen::Vector3d batch_mean = s_n / n;

  Eigen::Matrix3d result = acc.scatter;
  for (const auto& p : batch) {
    const Eigen::Vector3d d = p - batch_mean;
    result += d * d.transpose();
  }
  if (!acc.empty()) {
    const double m = static_cast<double>(acc.count);
    const Eigen::Vector3d u = (n / m) * acc.point_sum - s_n;
    result += (m / (n * (m + n))) * (u * u.transpose());
  }
  return result;
}

Eigen::Vector3d update_color(const MomentAccumulator& acc,
                             std::span<const Eigen::Vector3d> colors) {
  require_non_empty(colors);
  const double n = static_cast<double>(colors.size());
  const Eigen::Vector3d s_cn = batch_sum(colors);
  if (acc.empty()) return s_cn / n;
  const double m = static_cast<double>(acc.count);
  return (m * acc.mean_color() + s_cn) / (m + n);
}

MomentAccumulator merge_accumulators(const MomentAccumulator& a,
                                     const MomentAccumulator& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  const double m = static_cast<double>(a.count);
  const double n = static_cast<double>(b.count);
  MomentAccumulator out;
  out.count = a.count + b.count;
  out.point_sum = a.point_sum + b.point_sum;
  out.color_sum = a.color_sum + b.color_sum;
  // Two-set scatter: within-set parts plus the mean-separation term.
  const Eigen::Vector3d d = a.point_sum / m - b.point_sum / n;
  out.scatter = a.scatter + b.scatter + (m * n / (m + n)) * (d * d.transpose());
  return out;
}

Ellipsoid Ellipsoid::from_moments(const Eigen::Vector3d& mean,
                                  const Eigen::Matrix3d& covariance,
                                  const Eigen::Vector3d& color,
                                  std::int64_t support) {
  Ellipsoid e;
  e.mean = mean;
  e.covariance = covariance;
  e.color = color.cwiseMax(0.0).cwiseMin(255.0);
  e.support = support;

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(covariance);
  // Eigen returns ascending order; store descending with the floor applied.
  for (int k = 0; k < 3; ++k) {
    e.eigenvalues(k) = std::max(solver.eigenvalues()(2 - k), kEigenvalueFloor);
    e.eigenvectors.col(k) = solver.eigenvectors().col(2 - k);
  }
  return e;
}

std::optional<Ellipsoid> finalize(const MomentAccumulator& acc,
                                  std::int64_t min_support) {
  if (acc.count < std::max<std::int64_t>(min_support, 2)) return std::nullopt;
  const double m = static_cast<double>(acc.count);
  return Ellipsoid::from_moments(acc.mean(), acc.scatter / (m - 1.0),
                                 acc.mean_color(), acc.count);
}

}  // namespace vdm
