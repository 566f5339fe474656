#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "helpers.hpp"
#include "hedge/baselines.hpp"
#include "hedge/rng.hpp"

using namespace hedge;

namespace {

std::vector<IncidenceMatrix> reference_batch(int count, int n, int m, double density,
                                             std::uint64_t seed) {
  rng::Stream stream(rng::derive(seed, "baseline-test/reference"));
  std::vector<IncidenceMatrix> out;
  for (int i = 0; i < count; ++i) out.push_back(testutil::random_incidence(n, m, density, stream));
  return out;
}

double pooled_density(const std::vector<IncidenceMatrix>& batch) {
  double nnz = 0.0, cells = 0.0;
  for (const auto& h : batch) {
    nnz += h.nnz();
    cells += static_cast<double>(h.nodes()) * h.edges();
  }
  return nnz / cells;
}

}  // namespace

TEST_CASE("density-matched baseline tracks the pooled reference density") {
  const auto reference = reference_batch(6, 10, 8, 0.35, 9001);
  const double rho = pooled_density(reference);

  const BaselineResult res = er_incidence(reference, 200, 9002);
  REQUIRE(res.samples.size() == 200);
  for (const auto& h : res.samples) {
    CHECK(h.nodes() == 10);
    CHECK(h.edges() == 8);
  }
  const double got = pooled_density(res.samples);
  // 200 * 80 Bernoulli draws: 4 standard errors around rho.
  const double se = std::sqrt(rho * (1.0 - rho) / (200.0 * 80.0));
  CHECK(std::abs(got - rho) <= 4.0 * se);

  // Redraws keep columns nonempty at this density, so no warnings.
  CHECK(res.warnings.empty());
  for (const auto& h : res.samples)
    for (int j = 0; j < h.edges(); ++j) CHECK(h.entries().col(j).sum() > 0.0);
}

TEST_CASE("density-matched baseline is deterministic in the seed") {
  const auto reference = reference_batch(3, 6, 5, 0.4, 9003);
  const BaselineResult a = er_incidence(reference, 4, 77);
  const BaselineResult b = er_incidence(reference, 4, 77);
  const BaselineResult c = er_incidence(reference, 4, 78);
  for (int i = 0; i < 4; ++i)
    CHECK((a.samples[i].entries() - b.samples[i].entries()).norm() == 0.0);
  bool any_diff = false;
  for (int i = 0; i < 4; ++i)
    any_diff = any_diff || (a.samples[i].entries() - c.samples[i].entries()).norm() != 0.0;
  CHECK(any_diff);
}

TEST_CASE("density-matched baseline validates inputs") {
  CHECK_THROWS_AS(er_incidence({}, 3, 1), std::invalid_argument);
  const auto reference = reference_batch(2, 4, 4, 0.5, 9004);
  CHECK_THROWS_AS(er_incidence(reference, 0, 1), std::invalid_argument);
}

TEST_CASE("checkerboard swaps preserve both degree sequences exactly") {
  rng::Stream stream(rng::derive(9005, "baseline-test/swaps"));
  for (int round = 0; round < 10; ++round) {
    const IncidenceMatrix h = testutil::random_incidence(9, 7, 0.4, stream);
    mat_t entries = h.entries();
    const vec_t row_before = entries.rowwise().sum();
    const vec_t col_before = entries.colwise().sum().transpose();

    const int accepted = checkerboard_swaps(entries, 300, stream);
    CHECK(accepted >= 0);
    CHECK(accepted <= 300);
    CHECK((entries.rowwise().sum() - row_before).norm() == 0.0);
    CHECK((entries.colwise().sum().transpose() - col_before).norm() == 0.0);
    for (int j = 0; j < entries.cols(); ++j)
      for (int i = 0; i < entries.rows(); ++i)
        CHECK((entries(i, j) == 0.0 || entries(i, j) == 1.0));
  }
}

TEST_CASE("swap chains mix on mixable instances") {
  // Any two ones of a permutation matrix form a valid checkerboard, so a long
  // chain must accept.
  mat_t entries = testutil::mat({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  rng::Stream stream(rng::derive(9006, "baseline-test/mix"));
  const int accepted = checkerboard_swaps(entries, 500, stream);
  CHECK(accepted > 0);
}

TEST_CASE("zero proposals is the identity chain") {
  mat_t entries = testutil::worked_example().entries();
  const mat_t before = entries;
  rng::Stream stream(rng::derive(9007, "baseline-test/noop"));
  CHECK(checkerboard_swaps(entries, 0, stream) == 0);
  CHECK((entries - before).norm() == 0.0);
}

TEST_CASE("rewiring baseline preserves the source degree profile") {
  // A single reference makes the source of every output unambiguous.
  const auto reference = reference_batch(1, 8, 6, 0.45, 9008);
  const DegreeProfile ref_prof = degree_profile(reference.front());

  const BaselineResult res = rewiring_baseline(reference, 12, 10, 9009);
  REQUIRE(res.samples.size() == 12);
  for (const auto& h : res.samples) {
    const DegreeProfile prof = degree_profile(h);
    CHECK((prof.node_degrees - ref_prof.node_degrees).norm() == 0.0);
    CHECK((prof.edge_sizes - ref_prof.edge_sizes).norm() == 0.0);
  }
}

TEST_CASE("zero swaps reproduces reference samples verbatim") {
  const auto reference = reference_batch(1, 5, 4, 0.5, 9010);
  const BaselineResult res = rewiring_baseline(reference, 3, 0, 9011);
  for (const auto& h : res.samples)
    CHECK((h.entries() - reference.front().entries()).norm() == 0.0);
}

TEST_CASE("rewiring baseline validates inputs") {
  CHECK_THROWS_AS(rewiring_baseline({}, 2, 5, 1), std::invalid_argument);
  const auto reference = reference_batch(1, 5, 4, 0.5, 9012);
  CHECK_THROWS_AS(rewiring_baseline(reference, 0, 5, 1), std::invalid_argument);
  CHECK_THROWS_AS(rewiring_baseline(reference, 2, -1, 1), std::invalid_argument);

  // A reference sample with fewer than two incidences cannot be rewired.
  std::vector<IncidenceMatrix> tiny{IncidenceMatrix(testutil::mat({{1}}))};
  CHECK_THROWS_AS(rewiring_baseline(tiny, 1, 5, 1), std::invalid_argument);
}
