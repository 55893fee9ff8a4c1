#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "vdm/config.hpp"
#include "vdm/error.hpp"

#include <sstream>

using namespace vdm;

TEST_CASE("defaults validate and assemble module parameters") {
  RunConfig config;
  CHECK_NOTHROW(config.validate());
  CHECK(config.layout().offset_u == 320);
  CHECK(config.layout().offset_v == 240);
  CHECK(config.intrinsics().width == 640);
  CHECK(config.graph_options().delta_update == 0.8);
  CHECK(config.cluster_params().bandwidth == 0.25);
  CHECK(config.cluster_params().group_max_angle ==
        doctest::Approx(45.0 * M_PI / 180.0));
  CHECK(config.depth_range().min_m == 0.3);
}

TEST_CASE("dump and parse round trip") {
  RunConfig config;
  config.cell_px = 10;
  config.delta_update = 0.75;
  config.noise_a2 = 0.00213;
  config.seed = 1234567890123ull;
  const std::string dumped = config.dump();
  std::istringstream in(dumped);
  const RunConfig parsed = RunConfig::parse(in, "dump");
  CHECK(parsed.dump() == dumped);
  CHECK(parsed.cell_px == 10);
  CHECK(parsed.delta_update == 0.75);
  CHECK(parsed.noise_a2 == 0.00213);
  CHECK(parsed.seed == 1234567890123ull);
}

TEST_CASE("comments, blanks, and whitespace are tolerated") {
  std::istringstream in(
      "# a comment\n"
      "\n"
      "  cell_px = 10   # trailing comment\n"
      "\tdelta_loop=0.5\n");
  const RunConfig config = RunConfig::parse(in, "cfg");
  CHECK(config.cell_px == 10);
  CHECK(config.delta_loop == 0.5);
}

TEST_CASE("unknown keys are rejected with their location") {
  std::istringstream in("cell_px = 5\nnot_a_key = 3\n");
  try {
    RunConfig::parse(in, "cfg");
    FAIL("expected MalformedLineError");
  } catch (const MalformedLineError& e) {
    CHECK(e.line == 2);
    CHECK(std::string(e.what()).find("not_a_key") != std::string::npos);
  }
}

TEST_CASE("bad values and bad syntax are rejected") {
  std::istringstream bad_value("cell_px = five\n");
  CHECK_THROWS_AS(RunConfig::parse(bad_value, "cfg"), MalformedLineError);
  std::istringstream no_equals("cell_px 5\n");
  CHECK_THROWS_AS(RunConfig::parse(no_equals, "cfg"), MalformedLineError);
  RunConfig config;
  CHECK_THROWS_AS(config.set("stride", "1.5"), DataError);
}

TEST_CASE("cross-field invariants are enforced at load time") {
  std::istringstream indivisible("cell_px = 7\n");  // 1280 % 7 != 0
  CHECK_THROWS_AS(RunConfig::parse(indivisible, "cfg"), DataError);

  std::istringstream bad_depth("depth_min = 2.0\ndepth_max = 1.0\n");
  CHECK_THROWS_AS(RunConfig::parse(bad_depth, "cfg"), DataError);

  std::istringstream bad_threshold("delta_update = 1.3\n");
  CHECK_THROWS_AS(RunConfig::parse(bad_threshold, "cfg"), DataError);

  std::istringstream bad_support("min_support = 1\n");
  CHECK_THROWS_AS(RunConfig::parse(bad_support, "cfg"), DataError);
}
