#pragma once

// Independent reference implementations used to check the library. These
// deliberately avoid the incremental code paths: moments are computed in one
// pass over all points, transforms via 4x4 homogeneous matrices, nearest
// neighbors by exhaustive search.

#include "vdm/geometry.hpp"

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <vector>

namespace oracles {

struct OneShotMoments {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();  // about the mean
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();  // scatter/(n-1)
};

inline OneShotMoments one_shot_moments(std::span<const Eigen::Vector3d> points) {
  OneShotMoments out;
  const double n = static_cast<double>(points.size());
  for (const auto& p : points) out.mean += p;
  out.mean /= n;
  for (const auto& p : points) {
    const Eigen::Vector3d d = p - out.mean;
    out.scatter += d * d.transpose();
  }
  if (points.size() > 1) out.covariance = out.scatter / (n - 1.0);
  return out;
}

inline Eigen::Vector3d one_shot_mean(std::span<const Eigen::Vector3d> points) {
  return one_shot_moments(points).mean;
}

inline Eigen::Matrix4d to_homogeneous(const vdm::Se3Pose& pose) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = pose.rotation;
  m.topRightCorner<3, 1>() = pose.translation;
  return m;
}

inline Eigen::Vector3d homogeneous_transform(const Eigen::Matrix4d& m,
                                             const Eigen::Vector3d& p) {
  const Eigen::Vector4d q = m * p.homogeneous();
  return q.head<3>() / q.w();
}

inline vdm::Se3Pose random_pose(std::mt19937_64& rng, double translation_range = 2.0) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Quaterniond q(normal(rng), normal(rng), normal(rng), normal(rng));
  q.normalize();
  std::uniform_real_distribution<double> uniform(-translation_range,
                                                 translation_range);
  return {q.toRotationMatrix(),
          Eigen::Vector3d(uniform(rng), uniform(rng), uniform(rng))};
}

inline Eigen::Vector3d random_point(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> uniform(lo, hi);
  return {uniform(rng), uniform(rng), uniform(rng)};
}

inline double brute_force_nearest_distance(
    const Eigen::Vector3d& query, std::span<const Eigen::Vector3d> reference) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : reference) best = std::min(best, (p - query).norm());
  return best;
}

// Connected components of the "distance <= radius" graph.
inline std::vector<int> single_linkage_clusters(
    std::span<const Eigen::Vector3d> points, double radius) {
  const int n = static_cast<int>(points.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if ((points[i] - points[j]).norm() <= radius) parent[find(j)] = find(i);
    }
  }
  std::vector<int> label(n, -1);
  std::vector<int> out(n);
  int next = 0;
  for (int i = 0; i < n; ++i) {
    const int r = find(i);
    if (label[r] < 0) label[r] = next++;
    out[i] = label[r];
  }
  return out;
}

inline int cluster_count(std::span<const int> assignment) {
  int max_id = -1;
  for (int a : assignment) max_id = std::max(max_id, a);
  return max_id + 1;
}

inline double min_eigenvalue(const Eigen::Matrix3d& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(m);
  return solver.eigenvalues().minCoeff();
}

}  // namespace oracles
