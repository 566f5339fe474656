#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "hedge/drift_net.hpp"
#include "hedge/forward.hpp"

namespace hedge {

struct TrainConfig {
  int steps = 2000;
  int batch = 8;
  double lr = 1e-3;
  double lr_end = 1e-5;  // cosine decay target
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  // Per-sample target norm clipping: the first clip_warmup norms are buffered,
  // then the clip_quantile quantile of the buffer becomes a frozen threshold.
  int clip_warmup = 200;
  double clip_quantile = 0.999;
  int log_every = 25;
  std::uint64_t seed = 0;
};

/// One regression pair: noised state X_s and ideal reverse drift target
/// u*_{s|H}(X_s), tied to the process that produced them.
struct TrainSample {
  const ForwardProcess* proc = nullptr;
  double s = 0.0;
  mat_t state;
  mat_t target;
};

struct TrainLogEntry {
  int step = 0;
  double loss = 0.0;
  double lr = 0.0;
  double wall_ms = 0.0;
};

struct TrainReport {
  std::vector<std::pair<int, double>> loss_curve;  // (step, minibatch loss)
  double final_loss = 0.0;             // mean minibatch loss over the last window
  double zero_predictor_loss = 0.0;    // mean ||target||_F^2 over the same window
  int window = 0;                      // steps in that window
  double clip_threshold = 0.0;         // 0 while unfrozen
  std::uint64_t param_checksum = 0;
};

/// Draw X_s from the conditional law at s and attach the ideal target.
TrainSample draw_sample(const ForwardProcess& proc, double s, rng::Stream& stream);

/// Mean squared Frobenius residual of the net over an explicit batch.
double regression_loss(const DriftNet& net, const std::vector<TrainSample>& batch);

/// Denoising regression: sample (H, s, X_s), regress the net on u*, Adam with
/// cosine-decayed learning rate. Deterministic for a fixed seed and bank:
/// per-slot substreams plus a fixed-order gradient reduction keep the result
/// independent of the worker count.
TrainReport train(DriftNet& net, const std::vector<ForwardProcess>& bank, const TrainConfig& cfg,
                  const std::function<void(const TrainLogEntry&)>& log_sink = {});

std::uint64_t params_checksum(const std::vector<double>& params);

}  // namespace hedge
