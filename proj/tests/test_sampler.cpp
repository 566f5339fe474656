#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "helpers.hpp"
#include "hedge/rng.hpp"
#include "hedge/sampler.hpp"

using namespace hedge;

namespace {

DiffusionConfig base_config(int n, int m) {
  DiffusionConfig cfg = make_default_config(n, m, 0.4);
  cfg.gamma = 8.0;
  cfg.quad_points = 128;
  return cfg;
}

}  // namespace

TEST_CASE("base law sampling matches its moments") {
  const DiffusionConfig cfg = base_config(3, 3);
  rng::Stream stream(rng::derive(8401, "sampler/base"));
  const int draws = 20000;
  mat_t mean = mat_t::Zero(3, 3), sq = mat_t::Zero(3, 3);
  for (int k = 0; k < draws; ++k) {
    const mat_t x = init_base(cfg, 3, 3, stream);
    mean += x;
    sq += x.cwiseProduct(x);
  }
  mean /= draws;
  sq = sq / draws - mean.cwiseProduct(mean);
  const double var = cfg.tau / cfg.gamma;
  const double se_mean = std::sqrt(var / draws);
  const double se_var = var * std::sqrt(2.0 / (draws - 1.0));
  CHECK((mean - cfg.base_mean).cwiseAbs().maxCoeff() <= 4.0 * se_mean);
  CHECK((sq.array() - var).abs().maxCoeff() <= 4.0 * se_var);
}

TEST_CASE("projection validates the threshold") {
  const mat_t x = mat_t::Constant(2, 2, 0.5);
  CHECK_THROWS_AS(project_binary(x, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(project_binary(x, -0.2), std::invalid_argument);
  CHECK_THROWS_AS(project_binary(x, 1.0 + 1e-9), std::invalid_argument);
  CHECK_NOTHROW(project_binary(x, 1.0));
}

TEST_CASE("projection reproduces binary states for every valid threshold") {
  const mat_t h = testutil::worked_example().entries();
  for (const double t : {1e-6, 0.25, 0.5, 0.99, 1.0}) {
    const Projection p = project_binary(h, t);
    CHECK((p.incidence.entries() - h).norm() == 0.0);
    CHECK(p.saturation == 1.0);
  }
}

TEST_CASE("projection thresholds and measures saturation") {
  const mat_t x = testutil::mat({{0.95, 0.3}, {0.05, 0.61}});
  const Projection p = project_binary(x, 0.5);
  CHECK(p.incidence.entries()(0, 0) == 1.0);
  CHECK(p.incidence.entries()(0, 1) == 0.0);
  CHECK(p.incidence.entries()(1, 0) == 0.0);
  CHECK(p.incidence.entries()(1, 1) == 1.0);
  CHECK(p.saturation == doctest::Approx(0.5));  // 0.95 and 0.05 sit inside the bands
}

TEST_CASE("generation produces the requested batch reproducibly") {
  const int n = 5, m = 4;
  const DiffusionConfig cfg = base_config(n, m);
  DriftNet::Config ncfg;
  ncfg.widths = {1, 6, 1};
  ncfg.horizon = cfg.horizon;
  DriftNet net(ncfg, 12);
  rng::Stream noise(rng::derive(12, "sampler/perturb"));
  for (double& p : net.params()) p += 0.05 * noise.normal();

  SampleConfig scfg;
  scfg.steps = 32;
  scfg.count = 4;
  scfg.seed = rng::derive(8402, "sampler/run");

  const GenerationResult res = generate(net, cfg, n, m, scfg);
  REQUIRE(res.relaxed.size() == 4);
  REQUIRE(res.projected.size() == 4);
  REQUIRE(res.stats.size() == 4);
  CHECK(res.failures == 0);
  for (int i = 0; i < 4; ++i) {
    CHECK(res.relaxed[i].rows() == n);
    CHECK(res.relaxed[i].cols() == m);
    CHECK(res.relaxed[i].allFinite());
    REQUIRE(res.projected[i].has_value());
    CHECK(!res.stats[i].failed);

    // Stats must agree with a direct recount on the relaxed state.
    const mat_t bin =
        (res.relaxed[i].array() >= scfg.threshold).cast<double>().matrix();
    CHECK((res.projected[i]->entries() - bin).norm() == 0.0);
    int empty = 0, isolated = 0;
    for (int j = 0; j < m; ++j)
      if (bin.col(j).sum() == 0.0) ++empty;
    for (int r = 0; r < n; ++r)
      if (bin.row(r).sum() == 0.0) ++isolated;
    CHECK(res.stats[i].empty_hyperedges == empty);
    CHECK(res.stats[i].isolated_nodes == isolated);
    const double sat =
        ((res.relaxed[i].array().abs() <= 0.1) || ((res.relaxed[i].array() - 1.0).abs() <= 0.1))
            .cast<double>()
            .mean();
    CHECK(res.stats[i].saturation == doctest::Approx(sat).epsilon(1e-12));
  }

  const GenerationResult again = generate(net, cfg, n, m, scfg);
  for (int i = 0; i < 4; ++i) CHECK((again.relaxed[i] - res.relaxed[i]).norm() == 0.0);
}

TEST_CASE("sample i does not depend on the batch size") {
  const DiffusionConfig cfg = base_config(3, 3);
  const DriftNet net(DriftNet::Config{}, 5);
  SampleConfig one;
  one.steps = 16;
  one.count = 1;
  one.seed = 99;
  SampleConfig three = one;
  three.count = 3;
  const GenerationResult r1 = generate(net, cfg, 3, 3, one);
  const GenerationResult r3 = generate(net, cfg, 3, 3, three);
  CHECK((r1.relaxed[0] - r3.relaxed[0]).norm() == 0.0);
}

TEST_CASE("projection can be disabled") {
  const DiffusionConfig cfg = base_config(3, 3);
  const DriftNet net(DriftNet::Config{}, 6);
  SampleConfig scfg;
  scfg.steps = 8;
  scfg.count = 2;
  scfg.project = false;
  const GenerationResult res = generate(net, cfg, 3, 3, scfg);
  CHECK(res.relaxed.size() == 2);
  for (const auto& p : res.projected) CHECK(!p.has_value());
}

TEST_CASE("non-finite trajectories are reported, not thrown") {
  const DiffusionConfig cfg = base_config(3, 3);
  DriftNet net(DriftNet::Config{}, 7);
  for (double& p : net.params()) p = std::numeric_limits<double>::quiet_NaN();
  SampleConfig scfg;
  scfg.steps = 8;
  scfg.count = 3;
  const GenerationResult res = generate(net, cfg, 3, 3, scfg);
  CHECK(res.failures == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(res.stats[i].failed);
    CHECK(res.stats[i].failed_step >= 0);
    CHECK(!res.projected[i].has_value());
  }
}

TEST_CASE("generation validates its configuration") {
  const DiffusionConfig cfg = base_config(3, 3);
  const DriftNet net(DriftNet::Config{}, 8);
  SampleConfig scfg;
  scfg.steps = 0;
  CHECK_THROWS_AS(generate(net, cfg, 3, 3, scfg), std::invalid_argument);
  scfg.steps = 8;
  scfg.count = 0;
  CHECK_THROWS_AS(generate(net, cfg, 3, 3, scfg), std::invalid_argument);
  scfg.count = 1;
  scfg.threshold = 0.0;
  CHECK_THROWS_AS(generate(net, cfg, 3, 3, scfg), std::invalid_argument);
}
