#pragma once

#include <cstdint>
#include <string>

#include "hedge/dataset_io.hpp"
#include "hedge/forward.hpp"
#include "hedge/sampler.hpp"
#include "hedge/trainer.hpp"

namespace hedge {

/// Flat run configuration parsed from an INI-style file:
///   [section]
///   key = value   # comment
/// Every key has a default; unknown sections or keys are errors. The config
/// hash is computed over the canonical dump (fixed key order, defaults
/// included), so it is independent of file formatting and key order.
struct RunConfig {
  // [diffusion]
  double horizon = 1.0;
  double gamma = 12.0;
  double tau = 0.0;  // 0: auto, gamma * rho (1 - rho)
  double rho = 0.0;  // 0: auto, measured on the training batch
  std::string schedule = "linear";
  int quad_points = 512;
  // [train]
  int train_steps = 2000;
  int train_batch = 8;
  double lr = 1e-3;
  double lr_end = 1e-5;
  int clip_warmup = 200;
  double clip_quantile = 0.999;
  int log_every = 25;
  // [sample]
  int sample_steps = 256;
  int sample_count = 16;
  double threshold = 0.5;
  // [metrics]
  int spectral_k = 0;  // 0: min(n, m, 32)
  // [baseline]
  std::string baseline_kind = "er_hg";
  int swaps_per_incidence = 10;
  // [regime]
  std::string regime = "overlapping_blocks";
  int regime_n = 32;
  int regime_m = 32;
  int regime_count = 16;
  int blocks = 4;
  double p_in = 0.5;
  double p_out = 0.02;
  double plant_fraction = 0.02;
  // [subsample]
  int n_sub = 16;
  int m_sub = 16;
  int subsample_count = 16;
  int max_retries = 200;
  // [ablate]
  int ablate_seeds = 5;
  int ablate_train_count = 12;
  int ablate_eval_count = 24;
  std::string variants = "full,ou_only,node_only,edge_only";

  static RunConfig from_file(const std::string& path);
  static RunConfig from_text(const std::string& text, const std::string& label = "<config>");

  /// Canonical "section.key = value" dump, one line per key, fixed order.
  std::string canonical() const;
  /// 16 hex digits over the canonical dump.
  std::string hash() const;

  /// Resolve the diffusion block for a concrete shape. rho_hat fills the auto
  /// density; auto tau follows from the resolved density.
  DiffusionConfig diffusion_config(int n, int m, double rho_hat) const;
  TrainConfig train_config(std::uint64_t seed) const;
  SampleConfig sample_config(std::uint64_t seed) const;
  SynthConfig synth_config(std::uint64_t seed) const;
};

}  // namespace hedge
