#include "hedge/sampler.hpp"

#include <cmath>
#include <stdexcept>

#include "hedge/parallel.hpp"

namespace hedge {

mat_t init_base(const DiffusionConfig& cfg, int n, int m, rng::Stream& stream) {
  if (cfg.base_mean.rows() != n || cfg.base_mean.cols() != m)
    throw std::invalid_argument("init_base: base_mean shape mismatch");
  const double sd = std::sqrt(cfg.tau / cfg.gamma);
  mat_t out(n, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i) out(i, j) = cfg.base_mean(i, j) + sd * stream.normal();
  return out;
}

Projection project_binary(const mat_t& state, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0))
    throw std::invalid_argument("project_binary: threshold must be in (0, 1]");
  mat_t bin(state.rows(), state.cols());
  int near = 0;
  for (int j = 0; j < state.cols(); ++j)
    for (int i = 0; i < state.rows(); ++i) {
      const double x = state(i, j);
      bin(i, j) = x >= threshold ? 1.0 : 0.0;
      if (std::abs(x) <= 0.1 || std::abs(x - 1.0) <= 0.1) ++near;
    }
  Projection out{IncidenceMatrix(bin, {.allow_isolated_nodes = true, .allow_empty_hyperedges = true}),
                 static_cast<double>(near) / static_cast<double>(state.size())};
  return out;
}

GenerationResult generate(const DriftNet& net, const DiffusionConfig& cfg, int nodes, int edges,
                          const SampleConfig& scfg) {
  if (scfg.steps <= 0) throw std::invalid_argument("generate: steps must be positive");
  if (scfg.count <= 0) throw std::invalid_argument("generate: count must be positive");
  // Workers must not throw; the threshold is checked before any integration.
  if (scfg.project && !(scfg.threshold > 0.0 && scfg.threshold <= 1.0))
    throw std::invalid_argument("generate: threshold must be in (0, 1]");
  cfg.validate(nodes, edges);

  GenerationResult out;
  out.relaxed.resize(static_cast<std::size_t>(scfg.count));
  out.projected.resize(static_cast<std::size_t>(scfg.count));
  out.stats.resize(static_cast<std::size_t>(scfg.count));

  const double dt = cfg.horizon / static_cast<double>(scfg.steps);
  const double sqrt_dt = std::sqrt(dt);

  parallel_for(static_cast<std::size_t>(scfg.count), [&](std::size_t i) {
    rng::Stream init_stream(rng::derive(scfg.seed, "sampler/init", static_cast<std::uint64_t>(i)));
    mat_t y = init_base(cfg, nodes, edges, init_stream);
    SampleStats stats;
    for (int k = 0; k < scfg.steps; ++k) {
      const double s = cfg.horizon - static_cast<double>(k) * dt;
      const ScheduleEval sched = schedule_eval(cfg, s);
      const double noise_scale = std::sqrt(2.0 * cfg.tau * sched.beta) * sqrt_dt;
      const mat_t drift = net.forward(y, s);
      rng::Stream noise(rng::derive(scfg.seed, "sampler/noise", static_cast<std::uint64_t>(i),
                                    static_cast<std::uint64_t>(k)));
      for (int c = 0; c < edges; ++c)
        for (int r = 0; r < nodes; ++r) y(r, c) += dt * drift(r, c) + noise_scale * noise.normal();
      if (!y.allFinite()) {
        stats.failed = true;
        stats.failed_step = k;
        break;
      }
    }
    out.relaxed[i] = y;
    if (!stats.failed) {
      int near = 0;
      for (int c = 0; c < edges; ++c)
        for (int r = 0; r < nodes; ++r)
          if (std::abs(y(r, c)) <= 0.1 || std::abs(y(r, c) - 1.0) <= 0.1) ++near;
      stats.saturation = static_cast<double>(near) / static_cast<double>(y.size());
      if (scfg.project) {
        Projection proj = project_binary(y, scfg.threshold);
        const DegreeProfile prof = degree_profile(proj.incidence);
        stats.empty_hyperedges = static_cast<int>((prof.edge_sizes.array() == 0.0).count());
        stats.isolated_nodes = static_cast<int>((prof.node_degrees.array() == 0.0).count());
        out.projected[i] = std::move(proj.incidence);
      }
    }
    out.stats[i] = stats;
  });

  for (const auto& s : out.stats)
    if (s.failed) ++out.failures;
  return out;
}

}  // namespace hedge
