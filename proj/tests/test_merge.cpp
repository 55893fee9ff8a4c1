#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support/oracles.hpp"
#include "support/scenes.hpp"
#include "vdm/dataio.hpp"
#include "vdm/error.hpp"
#include "vdm/merge.hpp"

#include <random>
#include <set>

using namespace vdm;

namespace {

GraphOptions test_options() {
  GraphOptions options;
  options.covis_samples = 768;
  return options;
}

MapGraph graph_with_keyframes(const std::vector<Se3Pose>& poses,
                              const io::SyntheticScene& scene,
                              std::uint64_t seed = 100) {
  MapGraph graph(scenes::small_camera(), scenes::small_layout(), test_options());
  for (std::size_t i = 0; i < poses.size(); ++i) {
    Keyframe kf(static_cast<int>(i), poses[i], scenes::small_camera(),
                scenes::small_layout(), 0.0);
    const auto frame =
        io::render_synthetic(scene, poses[i], scenes::small_camera(), seed + i);
    kf.integrate_frame(frame);
    graph.add_keyframe(std::move(kf));
  }
  return graph;
}

Ellipsoid ellipsoid_from_points(std::span<const Eigen::Vector3d> points,
                                const Eigen::Vector3d& color) {
  MomentAccumulator acc;
  std::vector<Eigen::Vector3d> colors(points.size(), color);
  acc.add_batch(points, colors);
  return *finalize(acc, 2);
}

WorldEllipsoid world_ellipsoid(const Eigen::Vector3d& mean, double lambda_max,
                               int source = 0) {
  Eigen::Matrix3d cov = Eigen::Matrix3d::Identity() * (lambda_max / 100.0);
  cov(0, 0) = lambda_max;
  WorldEllipsoid we;
  we.e = Ellipsoid::from_moments(mean, cov, {128, 128, 128}, 10);
  we.source_keyframe = source;
  we.source_cell = {0, 0};
  we.source_depth = mean.z();
  return we;
}

}  // namespace

TEST_CASE("world mapping with an identity pose changes nothing") {
  const auto graph = graph_with_keyframes({Se3Pose::identity()},
                                          scenes::wall_scene(2.0));
  const auto local = graph.keyframe(0).ellipsoids();
  const auto world = ellipsoids_to_world(graph);
  REQUIRE(world.size() == local.size());
  for (std::size_t k = 0; k < world.size(); ++k) {
    CHECK((world[k].e.mean - local[k].ellipsoid.mean).norm() == 0.0);
    CHECK((world[k].e.covariance - local[k].ellipsoid.covariance).norm() == 0.0);
    CHECK(world[k].source_keyframe == 0);
  }
}

TEST_CASE("rotation preserves covariance eigenvalues") {
  std::mt19937_64 rng(41);
  const Se3Pose pose = oracles::random_pose(rng);
  const auto e = ellipsoid_from_points(
      std::vector<Eigen::Vector3d>{{0, 0, 0}, {0.1, 0, 0}, {0, 0.05, 0},
                                   {0.03, 0.02, 0.01}},
      {100, 150, 200});
  const auto moved = transform_ellipsoid(pose, e);
  CHECK((moved.eigenvalues - e.eigenvalues).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((moved.mean - (pose * e.mean)).norm() < 1e-12);
  // The rotated covariance agrees with a fresh eigendecomposition.
  const auto recomputed = Ellipsoid::from_moments(moved.mean, moved.covariance,
                                                  moved.color, moved.support);
  CHECK((recomputed.eigenvalues - e.eigenvalues).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("two views of one plane agree in the world frame") {
  const auto scene = scenes::wall_scene(2.0);
  const std::vector<Se3Pose> poses = {
      Se3Pose::identity(), Se3Pose::look_at({0.6, 0.2, -0.3}, {0, 0, 2.0})};
  const auto graph = graph_with_keyframes(poses, scene);
  for (const auto& we : ellipsoids_to_world(graph)) {
    CHECK(std::abs(we.e.mean.z() - 2.0) < 1e-6);  // plane z = 2 in world frame
  }
}

TEST_CASE("reprojecting a group onto itself reproduces the cell assignment") {
  const auto graph = graph_with_keyframes({Se3Pose::identity()},
                                          scenes::wall_scene(2.0));
  const std::vector<int> group = {0};
  const auto binned = reproject_group(graph, group, 0);
  CHECK(binned.view.unbinned.empty());
  const auto local = graph.keyframe(0).ellipsoids();
  CHECK(binned.ellipsoids.size() == local.size());
  // Bin count matches the number of source cells (one ellipsoid each).
  CHECK(binned.view.bins.size() == local.size());
  for (const auto& [cell, members] : binned.view.bins) {
    (void)cell;
    CHECK(members.size() == 1);
  }
}

TEST_CASE("co-located duplicate keyframes double every bin") {
  const auto scene = scenes::wall_scene(2.0);
  const std::vector<Se3Pose> poses = {Se3Pose::identity(), Se3Pose::identity()};
  const auto graph = graph_with_keyframes(poses, scene, 50);
  const std::vector<int> group = {0, 1};
  const auto binned = reproject_group(graph, group, 0);
  for (const auto& [cell, members] : binned.view.bins) {
    (void)cell;
    CHECK(members.size() == 2);
  }
}

TEST_CASE("center must belong to the group") {
  const auto graph = graph_with_keyframes({Se3Pose::identity()},
                                          scenes::wall_scene(2.0));
  const std::vector<int> group = {0};
  CHECK_THROWS_AS(reproject_group(graph, group, 3), std::invalid_argument);
}

TEST_CASE("mean shift keeps singletons and obeys the distance threshold") {
  ClusterParams params;

  SUBCASE("one point, one cluster") {
    const std::vector<Eigen::Vector3d> points = {{1, 2, 3}};
    const auto result = mean_shift_cluster(points, params);
    CHECK(result.cluster_count() == 1);
    CHECK(result.assignment == std::vector<int>{0});
  }

  SUBCASE("pairs inside and outside the threshold") {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
      Eigen::Vector3d dir(normal(rng), normal(rng), normal(rng));
      dir.normalize();
      const Eigen::Vector3d base = oracles::random_point(rng, -2.0, 2.0);

      const std::vector<Eigen::Vector3d> close = {base, base + 0.1 * dir};
      const auto merged = mean_shift_cluster(close, params);
      CHECK(merged.cluster_count() == 1);

      const std::vector<Eigen::Vector3d> apart = {base, base + 0.5 * dir};
      const auto split = mean_shift_cluster(apart, params);
      CHECK(split.cluster_count() == 2);
    }
  }

  SUBCASE("members end within one bandwidth of their modes") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<Eigen::Vector3d> points;
      for (int i = 0; i < 20; ++i) {
        points.push_back(oracles::random_point(rng, -1.0, 1.0));
      }
      const auto result = mean_shift_cluster(points, params);
      for (std::size_t i = 0; i < points.size(); ++i) {
        CHECK((points[i] - result.modes[result.assignment[i]]).norm() <=
              params.bandwidth + 1e-12);
      }
    }
  }

  SUBCASE("well-separated blobs match the linkage oracle") {
    std::mt19937_64 rng(44);
    std::normal_distribution<double> jitter(0.0, 0.02);
    for (int trial = 0; trial < 50; ++trial) {
      std::uniform_int_distribution<int> blob_count(1, 4);
      const int blobs = blob_count(rng);
      std::vector<Eigen::Vector3d> centers;
      // Centers on a coarse lattice keep inter-blob gaps > 2 * bandwidth.
      for (int b = 0; b < blobs; ++b) {
        centers.emplace_back(1.5 * b, 0.5 * (b % 2), 0.0);
      }
      std::vector<Eigen::Vector3d> points;
      std::uniform_int_distribution<int> per_blob(1, 6);
      for (const auto& c : centers) {
        const int n = per_blob(rng);
        for (int i = 0; i < n; ++i) {
          points.push_back(c + Eigen::Vector3d(jitter(rng), jitter(rng),
                                               jitter(rng)));
        }
      }
      const auto result = mean_shift_cluster(points, params);
      const auto oracle = oracles::single_linkage_clusters(points, params.bandwidth);
      CHECK(result.cluster_count() == oracles::cluster_count(oracle));
    }
  }
}

TEST_CASE("merging one member returns it unchanged") {
  std::mt19937_64 rng(45);
  std::vector<Eigen::Vector3d> points;
  for (int i = 0; i < 25; ++i) points.push_back(oracles::random_point(rng, -1, 1));
  const auto e = ellipsoid_from_points(points, {10, 200, 30});
  const auto merged = merge_cluster(std::vector<Ellipsoid>{e});
  CHECK((merged.mean - e.mean).norm() < 1e-12);
  CHECK((merged.covariance - e.covariance).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((merged.color - e.color).norm() < 1e-12);
  CHECK(merged.support == e.support);
}

TEST_CASE("merging disjoint halves equals the full-set ellipsoid") {
  std::mt19937_64 rng(46);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Eigen::Vector3d> all;
    for (int i = 0; i < 40; ++i) all.push_back(oracles::random_point(rng, -1, 1));
    const std::span<const Eigen::Vector3d> span(all);
    const auto left = ellipsoid_from_points(span.subspan(0, 20), {50, 60, 70});
    const auto right = ellipsoid_from_points(span.subspan(20, 20), {50, 60, 70});
    const auto merged = merge_cluster(std::vector<Ellipsoid>{left, right});
    const auto full = ellipsoid_from_points(all, {50, 60, 70});
    CHECK((merged.mean - full.mean).norm() < 1e-9);
    CHECK((merged.covariance - full.covariance).cwiseAbs().maxCoeff() <
          1e-9 * (1.0 + full.covariance.norm()));
    CHECK(merged.support == 40);
  }
}

TEST_CASE("merging identical ellipsoids pools their moments") {
  std::mt19937_64 rng(47);
  std::vector<Eigen::Vector3d> points;
  for (int i = 0; i < 30; ++i) points.push_back(oracles::random_point(rng, -1, 1));
  const auto e = ellipsoid_from_points(points, {90, 90, 90});

  const int copies = 3;
  const auto merged =
      merge_cluster(std::vector<Ellipsoid>(static_cast<std::size_t>(copies), e));
  CHECK((merged.mean - e.mean).norm() < 1e-12);
  CHECK((merged.color - e.color).norm() < 1e-12);
  CHECK(merged.support == copies * e.support);

  // Oracle: one-shot moments over the tripled multiset. The pooled scatter
  // triples while Bessel's correction uses the tripled support.
  std::vector<Eigen::Vector3d> multiset;
  for (int c = 0; c < copies; ++c) {
    multiset.insert(multiset.end(), points.begin(), points.end());
  }
  const auto oracle = oracles::one_shot_moments(multiset);
  CHECK((merged.covariance - oracle.covariance).cwiseAbs().maxCoeff() <
        1e-9 * (1.0 + oracle.covariance.norm()));
}

TEST_CASE("occlusion removal keeps the most precise rival") {
  MapGraph graph(scenes::small_camera(), scenes::small_layout(), test_options());
  graph.add_keyframe(Keyframe(0, Se3Pose::identity(), scenes::small_camera(),
                              scenes::small_layout(), 0.0));
  const std::vector<MergeGroup> groups = {{0, {0}}};
  ClusterParams params;

  SUBCASE("same cell, close depths: smaller uncertainty survives") {
    std::vector<WorldEllipsoid> candidates = {
        world_ellipsoid({0.01, 0.02, 1.00}, 0.01),
        world_ellipsoid({0.011, 0.021, 1.02}, 0.0001)};
    const auto kept = remove_occluded(graph, groups, candidates, params);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].e.max_stddev() == doctest::Approx(0.01));  // sqrt(1e-4)
  }

  SUBCASE("distinct depth layers both survive") {
    std::vector<WorldEllipsoid> candidates = {
        world_ellipsoid({0.01, 0.02, 1.0}, 0.01),
        world_ellipsoid({0.03, 0.06, 3.0}, 0.0001)};  // same pixel ray
    const auto kept = remove_occluded(graph, groups, candidates, params);
    CHECK(kept.size() == 2);
  }

  SUBCASE("a single ellipsoid always survives") {
    std::vector<WorldEllipsoid> candidates = {world_ellipsoid({0, 0, 2.0}, 0.5)};
    CHECK(remove_occluded(graph, groups, candidates, params).size() == 1);
  }

  SUBCASE("ellipsoids behind the center camera pass through") {
    std::vector<WorldEllipsoid> candidates = {
        world_ellipsoid({0, 0, -1.0}, 0.01),
        world_ellipsoid({0.001, 0.001, -1.01}, 0.0001)};
    CHECK(remove_occluded(graph, groups, candidates, params).size() == 2);
  }
}

TEST_CASE("a single keyframe passes through the global pipeline unmerged") {
  const auto graph = graph_with_keyframes({Se3Pose::identity()},
                                          scenes::wall_scene(2.0));
  const auto map = build_global_map(graph, ClusterParams{});
  CHECK(map.stats.input_count > 0);
  CHECK(map.stats.output_count == map.stats.input_count);
  CHECK(map.ellipsoids.size() ==
        static_cast<std::size_t>(map.stats.output_count));
}

TEST_CASE("duplicate co-located keyframes halve the global map") {
  const auto scene = scenes::wall_scene(2.0);
  const auto graph = graph_with_keyframes(
      {Se3Pose::identity(), Se3Pose::identity()}, scene, 60);
  const auto map = build_global_map(graph, ClusterParams{});
  CHECK(map.stats.input_count > 0);
  const double ratio = static_cast<double>(map.stats.output_count) /
                       static_cast<double>(map.stats.input_count);
  CHECK(ratio <= 0.55);
  CHECK(ratio >= 0.45);
}

TEST_CASE("an empty graph cannot be merged") {
  MapGraph graph(scenes::small_camera(), scenes::small_layout(), test_options());
  CHECK_THROWS_AS(build_global_map(graph, ClusterParams{}), EmptyGraphError);
}

TEST_CASE("greedy grouping covers every keyframe exactly once") {
  const auto scene = scenes::wall_scene(2.0, 60.0);
  std::vector<Se3Pose> poses;
  for (int i = 0; i < 6; ++i) {
    Se3Pose pose;
    pose.translation = {0.4 * i, 0.0, 0.0};
    poses.push_back(pose);
  }
  const auto graph = graph_with_keyframes(poses, scene, 70);
  const auto groups = build_merge_groups(graph, ClusterParams{});
  std::set<int> seen;
  for (const auto& group : groups) {
    CHECK(std::find(group.members.begin(), group.members.end(), group.center) !=
          group.members.end());
    for (int id : group.members) {
      CHECK(seen.insert(id).second);  // no keyframe appears twice
    }
  }
  CHECK(seen.size() == graph.size());
}

TEST_CASE("sampling the global map is deterministic and centered") {
  const auto graph = graph_with_keyframes({Se3Pose::identity()},
                                          scenes::wall_scene(2.0));
  const auto map = build_global_map(graph, ClusterParams{});

  const auto a = sample_point_cloud(map, 2, 777);
  const auto b = sample_point_cloud(map, 2, 777);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK((a[i].position - b[i].position).norm() == 0.0);
    CHECK(a[i].color == b[i].color);
  }

  SUBCASE("near-degenerate ellipsoids sample at their means") {
    GlobalMap tiny;
    WorldEllipsoid we;
    we.e = Ellipsoid::from_moments(Eigen::Vector3d(1, 2, 3),
                                   Eigen::Matrix3d::Zero(), {10, 10, 10}, 5);
    tiny.ellipsoids.push_back(we);
    tiny.stats = {1, 1, 0.0};
    const auto cloud = sample_point_cloud(tiny, 1, 3);
    REQUIRE(cloud.size() == 1);
    CHECK((cloud[0].position - Eigen::Vector3d(1, 2, 3)).norm() < 1e-5);
  }

  SUBCASE("the sample mean approaches the ellipsoid mean") {
    GlobalMap one;
    one.ellipsoids.push_back(map.ellipsoids.front());
    one.stats = {1, 1, 0.0};
    const int n = 10000;
    const auto cloud = sample_point_cloud(one, n, 5);
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (const auto& p : cloud) mean += p.position;
    mean /= n;
    const auto& e = one.ellipsoids.front().e;
    for (int axis = 0; axis < 3; ++axis) {
      // The sampler floors eigenvalues, so the effective sigma does too.
      const double sigma = std::sqrt(e.covariance(axis, axis) + kEigenvalueFloor);
      CHECK(std::abs(mean(axis) - e.mean(axis)) < 5.0 * sigma / std::sqrt(n) + 1e-9);
    }
  }
}

TEST_CASE("merged output never exceeds the input count") {
  const auto scene = scenes::wall_scene(2.0, 60.0);
  std::vector<Se3Pose> poses;
  for (int i = 0; i < 4; ++i) {
    Se3Pose pose;
    pose.translation = {0.25 * i, 0.0, 0.0};
    poses.push_back(pose);
  }
  const auto graph = graph_with_keyframes(poses, scene, 80);
  const auto map = build_global_map(graph, ClusterParams{});
  CHECK(map.stats.output_count <= map.stats.input_count);
  CHECK(map.stats.output_count > 0);
}
