#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hedge/incidence.hpp"
#include "hedge/rng.hpp"

namespace hedge {

struct BaselineResult {
  std::vector<IncidenceMatrix> samples;
  std::vector<std::string> warnings;
};

/// Density-matched Bernoulli incidence baseline: each entry is 1 with the
/// reference batch's pooled density. Empty columns are redrawn up to 100
/// times; a column that stays empty is kept and reported as a warning.
BaselineResult er_incidence(const std::vector<IncidenceMatrix>& reference, int count,
                            std::uint64_t seed);

/// Degree/size-preserving rewiring baseline: starts from a reference sample
/// and runs checkerboard swaps on incidence pairs. Every accepted swap moves
/// two 1-entries to the opposite corners of a 2x2 all-different pattern, so
/// node degrees and hyperedge sizes are preserved exactly.
BaselineResult rewiring_baseline(const std::vector<IncidenceMatrix>& reference, int count,
                                 int swaps_per_incidence, std::uint64_t seed);

/// The swap chain itself, exposed for reuse: runs `proposals` checkerboard
/// proposals on a 0/1 matrix in place. Returns the number accepted.
int checkerboard_swaps(mat_t& entries, int proposals, rng::Stream& stream);

}  // namespace hedge
