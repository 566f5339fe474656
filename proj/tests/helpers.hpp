#pragma once

#include <initializer_list>
#include <vector>

#include "hedge/incidence.hpp"
#include "hedge/rng.hpp"

namespace testutil {

inline hedge::mat_t mat(std::initializer_list<std::initializer_list<double>> rows) {
  const int n = static_cast<int>(rows.size());
  const int m = static_cast<int>(rows.begin()->size());
  hedge::mat_t out(n, m);
  int i = 0;
  for (const auto& row : rows) {
    int j = 0;
    for (double v : row) out(i, j++) = v;
    ++i;
  }
  return out;
}

inline hedge::IncidenceMatrix inc(std::initializer_list<std::initializer_list<double>> rows) {
  return hedge::IncidenceMatrix(mat(rows));
}

// The 2x2 running example: node 0 in both hyperedges, node 1 in the first.
inline hedge::IncidenceMatrix worked_example() { return inc({{1, 1}, {1, 0}}); }

// Random incidence without empty columns or isolated rows; repairs only add
// ones, so they cannot create new violations.
inline hedge::IncidenceMatrix random_incidence(int n, int m, double density,
                                               hedge::rng::Stream& stream) {
  hedge::mat_t e(n, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i) e(i, j) = stream.uniform() < density ? 1.0 : 0.0;
  for (int j = 0; j < m; ++j)
    if (e.col(j).sum() == 0.0) e(static_cast<int>(stream.uniform_index(n)), j) = 1.0;
  for (int i = 0; i < n; ++i)
    if (e.row(i).sum() == 0.0) e(i, static_cast<int>(stream.uniform_index(m))) = 1.0;
  return hedge::IncidenceMatrix(std::move(e));
}

inline hedge::mat_t random_state(int n, int m, hedge::rng::Stream& stream) {
  hedge::mat_t x(n, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i) x(i, j) = stream.normal();
  return x;
}

// Permutation matrix sending index i to position perm[i].
inline hedge::mat_t random_permutation(int n, hedge::rng::Stream& stream) {
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(stream.uniform_index(static_cast<std::size_t>(i) + 1));
    std::swap(perm[i], perm[j]);
  }
  hedge::mat_t p = hedge::mat_t::Zero(n, n);
  for (int i = 0; i < n; ++i) p(perm[i], i) = 1.0;
  return p;
}

}  // namespace testutil
