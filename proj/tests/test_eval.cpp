#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support/oracles.hpp"
#include "vdm/error.hpp"
#include "vdm/eval.hpp"

#include <algorithm>
#include <random>

using namespace vdm;

namespace {

std::vector<Eigen::Vector3d> random_cloud(std::mt19937_64& rng, int n,
                                          double span = 1.0) {
  std::vector<Eigen::Vector3d> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(oracles::random_point(rng, -span, span));
  return out;
}

}  // namespace

TEST_CASE("a cloud compared with itself has zero error") {
  std::mt19937_64 rng(61);
  const auto cloud = random_cloud(rng, 500);
  const auto [rmse, mean_err] = nearest_neighbor_rmse(cloud, cloud);
  CHECK(rmse == 0.0);
  CHECK(mean_err == 0.0);
}

TEST_CASE("a plane shifted along its normal scores the shift distance") {
  std::vector<Eigen::Vector3d> reference;
  for (int i = 0; i <= 200; ++i) {
    for (int j = 0; j <= 200; ++j) {
      reference.emplace_back(0.005 * i, 0.005 * j, 0.0);
    }
  }
  std::vector<Eigen::Vector3d> model;
  for (const auto& p : reference) model.push_back(p + Eigen::Vector3d(0, 0, 0.010));
  const auto [rmse, mean_err] = nearest_neighbor_rmse(model, reference);
  CHECK(rmse == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(mean_err == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("kd-tree distances match brute force on random sets") {
  std::mt19937_64 rng(62);
  for (int trial = 0; trial < 20; ++trial) {
    const auto model = random_cloud(rng, 150);
    const auto reference = random_cloud(rng, 200);
    double sum_sq = 0.0;
    double sum_abs = 0.0;
    for (const auto& p : model) {
      const double d = oracles::brute_force_nearest_distance(p, reference);
      sum_sq += d * d;
      sum_abs += d;
    }
    const double expected_rmse = std::sqrt(sum_sq / model.size()) * 1000.0;
    const double expected_mean = sum_abs / model.size() * 1000.0;
    const auto [rmse, mean_err] = nearest_neighbor_rmse(model, reference);
    CHECK(rmse == doctest::Approx(expected_rmse).epsilon(1e-9));
    CHECK(mean_err == doctest::Approx(expected_mean).epsilon(1e-9));
  }
}

TEST_CASE("kd-tree nearest agrees with exhaustive search on a larger set") {
  std::mt19937_64 rng(63);
  const auto reference = random_cloud(rng, 2000, 3.0);
  const KdTree3 tree(reference);
  for (int trial = 0; trial < 500; ++trial) {
    const Eigen::Vector3d q = oracles::random_point(rng, -3.5, 3.5);
    const auto hit = tree.nearest(q);
    const double expected = oracles::brute_force_nearest_distance(q, reference);
    CHECK(std::sqrt(hit.squared_distance) == doctest::Approx(expected).epsilon(1e-12));
    CHECK((reference[hit.index] - q).norm() ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("rmse is permutation invariant") {
  std::mt19937_64 rng(64);
  auto model = random_cloud(rng, 100);
  auto reference = random_cloud(rng, 120);
  const auto [rmse_a, mean_a] = nearest_neighbor_rmse(model, reference);
  std::shuffle(model.begin(), model.end(), rng);
  std::shuffle(reference.begin(), reference.end(), rng);
  const auto [rmse_b, mean_b] = nearest_neighbor_rmse(model, reference);
  CHECK(rmse_a == doctest::Approx(rmse_b).epsilon(1e-12));
  CHECK(mean_a == doctest::Approx(mean_b).epsilon(1e-12));
}

TEST_CASE("a far outlier increases the error") {
  std::mt19937_64 rng(65);
  auto model = random_cloud(rng, 100);
  const auto reference = random_cloud(rng, 100);
  const auto [before, mean_before] = nearest_neighbor_rmse(model, reference);
  model.emplace_back(50.0, 50.0, 50.0);
  const auto [after, mean_after] = nearest_neighbor_rmse(model, reference);
  CHECK(after > before);
  CHECK(mean_after > mean_before);
}

TEST_CASE("rmse dominates the mean absolute error") {
  std::mt19937_64 rng(66);
  const auto model = random_cloud(rng, 300);
  const auto reference = random_cloud(rng, 50);
  const auto [rmse, mean_err] = nearest_neighbor_rmse(model, reference);
  CHECK(rmse >= mean_err);
}

TEST_CASE("empty inputs are rejected") {
  std::mt19937_64 rng(67);
  const auto cloud = random_cloud(rng, 10);
  const std::vector<Eigen::Vector3d> empty;
  CHECK_THROWS_AS(nearest_neighbor_rmse(empty, cloud), EmptyInputError);
  CHECK_THROWS_AS(nearest_neighbor_rmse(cloud, empty), EmptyInputError);
  CHECK_THROWS_AS(KdTree3{empty}, EmptyInputError);
}

TEST_CASE("map statistics collect element counts") {
  const GlobalMap empty;
  const auto empty_report = map_statistics(empty);
  CHECK(empty_report.element_count == 0);
  CHECK(empty_report.method == "vd");
  CHECK(empty_report.rmse_mm < 0.0);  // no reference evaluated

  GlobalMap map;
  map.stats = {10, 4, 1.25};
  map.ellipsoids.resize(4);
  const auto report = map_statistics(map);
  CHECK(report.element_count == 4);
  CHECK(report.runtime_s == 1.25);
  CHECK(report.parameters.find("input_count=10") != std::string::npos);

  const VoxelGrid grid(0.1, Eigen::Vector3d::Zero(), VoxelMode::occupancy);
  const auto grid_report = map_statistics(grid);
  CHECK(grid_report.element_count == 0);
  CHECK(grid_report.method == "occupancy");
}

TEST_CASE("report formatting") {
  EvalReport report;
  report.method = "vd";
  report.parameters = "cell_px=5";
  report.element_count = 123;
  report.rmse_mm = 9.5;
  report.mean_err_mm = 7.25;
  report.runtime_s = 1.5;

  const std::string kv = format_report_kv(report);
  CHECK(kv.find("method=vd\n") != std::string::npos);
  CHECK(kv.find("element_count=123\n") != std::string::npos);
  CHECK(kv.find("rmse_mm=9.500000\n") != std::string::npos);
  CHECK(kv.find("runtime_s=") == std::string::npos);  // timings opt-in only
  const std::string kv_timed = format_report_kv(report, true);
  CHECK(kv_timed.find("runtime_s=1.500\n") != std::string::npos);

  EvalReport no_reference;
  no_reference.method = "occupancy";
  no_reference.element_count = 7;
  const std::string bare = format_report_kv(no_reference);
  CHECK(bare.find("rmse_mm=") == std::string::npos);

  const EvalReport reports[] = {report, no_reference};
  const std::string table = format_report_table(reports);
  CHECK(table.find("vd") != std::string::npos);
  CHECK(table.find("occupancy") != std::string::npos);
  CHECK(table.find('-') != std::string::npos);  // missing RMSE renders as '-'
}
