#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hedge/drift_net.hpp"
#include "hedge/forward.hpp"
#include "hedge/incidence.hpp"

namespace hedge {

struct SampleConfig {
  int steps = 256;        // uniform Euler-Maruyama steps over [0, horizon]
  int count = 16;
  double threshold = 0.5;
  std::uint64_t seed = 0;
  bool project = true;
};

struct SampleStats {
  bool failed = false;     // hit a non-finite entry during integration
  int failed_step = -1;
  double saturation = 0.0;  // fraction of relaxed entries within 0.1 of {0, 1}
  int empty_hyperedges = 0;
  int isolated_nodes = 0;
};

struct Projection {
  IncidenceMatrix incidence;
  double saturation = 0.0;
};

struct GenerationResult {
  std::vector<mat_t> relaxed;                          // terminal relaxed states
  std::vector<std::optional<IncidenceMatrix>> projected;  // empty on failure or project=false
  std::vector<SampleStats> stats;
  int failures = 0;
};

/// Draw from the terminal base law N(base_mean, (tau/gamma) I), entrywise.
mat_t init_base(const DiffusionConfig& cfg, int n, int m, rng::Stream& stream);

/// Threshold a relaxed state into an incidence matrix (entries >= threshold
/// become 1). Already-binary input is reproduced exactly for any threshold in
/// (0, 1]. Rows and columns may end up empty; callers inspect the stats.
Projection project_binary(const mat_t& state, double threshold = 0.5);

/// Integrate the learned reverse dynamics from the base law back to data time
/// and optionally project. Noise is keyed by (sample, step), so sample i is
/// bitwise reproducible independent of count or scheduling.
GenerationResult generate(const DriftNet& net, const DiffusionConfig& cfg, int nodes, int edges,
                          const SampleConfig& scfg);

}  // namespace hedge
