#include "hedge/baselines.hpp"

#include <stdexcept>
#include <utility>

namespace hedge {

namespace {

void check_reference(const std::vector<IncidenceMatrix>& reference, int count) {
  if (reference.empty()) throw std::invalid_argument("baseline: empty reference batch");
  if (count <= 0) throw std::invalid_argument("baseline: count must be positive");
  const int n = reference.front().nodes(), m = reference.front().edges();
  for (const auto& h : reference)
    if (h.nodes() != n || h.edges() != m)
      throw std::invalid_argument("baseline: mixed shapes in reference batch");
}

}  // namespace

BaselineResult er_incidence(const std::vector<IncidenceMatrix>& reference, int count,
                            std::uint64_t seed) {
  check_reference(reference, count);
  const int n = reference.front().nodes(), m = reference.front().edges();
  double nnz = 0.0;
  for (const auto& h : reference) nnz += static_cast<double>(h.nnz());
  const double rho =
      nnz / (static_cast<double>(reference.size()) * static_cast<double>(n) * static_cast<double>(m));

  BaselineResult out;
  out.samples.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    rng::Stream stream(rng::derive(seed, "baseline/er", static_cast<std::uint64_t>(i)));
    mat_t entries(n, m);
    for (int j = 0; j < m; ++j) {
      bool nonempty = false;
      for (int attempt = 0; attempt < 100 && !nonempty; ++attempt) {
        for (int r = 0; r < n; ++r) {
          entries(r, j) = stream.uniform() < rho ? 1.0 : 0.0;
          nonempty = nonempty || entries(r, j) == 1.0;
        }
      }
      if (!nonempty)
        out.warnings.push_back("sample " + std::to_string(i) + ": column " + std::to_string(j) +
                               " empty after 100 redraws");
    }
    out.samples.emplace_back(entries,
                             IncidenceMatrix::Options{.allow_isolated_nodes = true,
                                                      .allow_empty_hyperedges = true});
  }
  return out;
}

int checkerboard_swaps(mat_t& entries, int proposals, rng::Stream& stream) {
  const int n = static_cast<int>(entries.rows());
  const int m = static_cast<int>(entries.cols());
  // Incidence list: positions of the 1-entries. Swaps rewrite two list slots,
  // so membership lookups stay O(1) through the matrix itself.
  std::vector<std::pair<int, int>> ones;
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i)
      if (entries(i, j) == 1.0) ones.emplace_back(i, j);
  if (ones.size() < 2) return 0;

  int accepted = 0;
  for (int p = 0; p < proposals; ++p) {
    const std::size_t a = stream.uniform_index(ones.size());
    const std::size_t b = stream.uniform_index(ones.size());
    if (a == b) continue;
    const auto [v1, e1] = ones[a];
    const auto [v2, e2] = ones[b];
    if (v1 == v2 || e1 == e2) continue;
    if (entries(v1, e2) == 1.0 || entries(v2, e1) == 1.0) continue;
    entries(v1, e1) = 0.0;
    entries(v2, e2) = 0.0;
    entries(v1, e2) = 1.0;
    entries(v2, e1) = 1.0;
    ones[a] = {v1, e2};
    ones[b] = {v2, e1};
    ++accepted;
  }
  return accepted;
}

BaselineResult rewiring_baseline(const std::vector<IncidenceMatrix>& reference, int count,
                                 int swaps_per_incidence, std::uint64_t seed) {
  check_reference(reference, count);
  if (swaps_per_incidence < 0)
    throw std::invalid_argument("baseline: swaps_per_incidence must be nonnegative");
  for (const auto& h : reference)
    if (h.nnz() < 2)
      throw std::invalid_argument("baseline: rewiring needs at least 2 incidences per reference sample");

  BaselineResult out;
  out.samples.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    rng::Stream stream(rng::derive(seed, "baseline/rewire", static_cast<std::uint64_t>(i)));
    const std::size_t which =
        reference.size() == 1 ? 0 : stream.uniform_index(reference.size());
    mat_t entries = reference[which].entries();
    const int proposals = swaps_per_incidence * static_cast<int>(reference[which].nnz());
    checkerboard_swaps(entries, proposals, stream);
    out.samples.emplace_back(std::move(entries), reference[which].options());
  }
  return out;
}

}  // namespace hedge
