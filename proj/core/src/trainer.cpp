#include "hedge/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "hedge/parallel.hpp"

namespace hedge {

namespace {

void validate(const TrainConfig& cfg, std::size_t bank_size) {
  if (bank_size == 0) throw std::invalid_argument("train: empty process bank");
  if (cfg.steps <= 0) throw std::invalid_argument("train: steps must be positive");
  if (cfg.batch <= 0) throw std::invalid_argument("train: batch must be positive");
  if (!(cfg.lr > 0.0) || !(cfg.lr_end > 0.0) || cfg.lr_end > cfg.lr)
    throw std::invalid_argument("train: need 0 < lr_end <= lr");
  if (cfg.clip_warmup < 0) throw std::invalid_argument("train: clip_warmup must be >= 0");
  if (!(cfg.clip_quantile > 0.0) || !(cfg.clip_quantile <= 1.0))
    throw std::invalid_argument("train: clip_quantile must be in (0, 1]");
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size()))) - 1;
  idx = std::min(idx, v.size() - 1);
  return v[idx];
}

}  // namespace

TrainSample draw_sample(const ForwardProcess& proc, double s, rng::Stream& stream) {
  TrainSample out;
  out.proc = &proc;
  out.s = s;
  const ConditionalMoments mom = proc.moments(s);
  out.state = proc.sample_state(mom, stream);
  out.target = proc.reverse_drift(mom, out.state);
  return out;
}

double regression_loss(const DriftNet& net, const std::vector<TrainSample>& batch) {
  if (batch.empty()) throw std::invalid_argument("regression_loss: empty batch");
  double acc = 0.0;
  for (const auto& sample : batch) acc += (net.forward(sample.state, sample.s) - sample.target).squaredNorm();
  return acc / static_cast<double>(batch.size());
}

TrainReport train(DriftNet& net, const std::vector<ForwardProcess>& bank, const TrainConfig& cfg,
                  const std::function<void(const TrainLogEntry&)>& log_sink) {
  validate(cfg, bank.size());
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t np = net.param_count();

  std::vector<double> adam_m(np, 0.0), adam_v(np, 0.0);
  std::vector<std::vector<double>> slot_grads(static_cast<std::size_t>(cfg.batch));
  std::vector<TrainSample> batch(static_cast<std::size_t>(cfg.batch));
  std::vector<double> slot_loss(static_cast<std::size_t>(cfg.batch), 0.0);
  std::vector<double> slot_target_sq(static_cast<std::size_t>(cfg.batch), 0.0);
  for (auto& g : slot_grads) g.assign(np, 0.0);

  // Clip state. Threshold stays +inf until the warmup buffer fills.
  std::vector<double> warmup_norms;
  warmup_norms.reserve(static_cast<std::size_t>(cfg.clip_warmup));
  double clip_threshold = std::numeric_limits<double>::infinity();
  bool clip_frozen = cfg.clip_warmup == 0;

  TrainReport report;
  const int window = std::max(1, cfg.steps / 20);
  double window_loss = 0.0, window_zero = 0.0;
  int window_count = 0;

  const double s_lo = kScoreTimeFloor * bank.front().config().horizon;
  const double s_hi = bank.front().config().horizon;
  const double inv_batch = 1.0 / static_cast<double>(cfg.batch);

  for (int step = 0; step < cfg.steps; ++step) {
    const double u = cfg.steps > 1 ? static_cast<double>(step) / static_cast<double>(cfg.steps - 1) : 0.0;
    const double lr_t = cfg.lr_end + 0.5 * (cfg.lr - cfg.lr_end) * (1.0 + std::cos(std::numbers::pi * u));

    // Sample the minibatch. Each slot owns a derived substream, so the draw is
    // reproducible regardless of how parallel_for schedules the slots.
    parallel_for(static_cast<std::size_t>(cfg.batch), [&](std::size_t b) {
      rng::Stream stream(rng::derive(cfg.seed, "train/sample", static_cast<std::uint64_t>(step),
                                     static_cast<std::uint64_t>(b)));
      const std::size_t which = bank.size() == 1 ? 0 : stream.uniform_index(bank.size());
      const double s = stream.uniform(s_lo, s_hi);
      batch[b] = draw_sample(bank[which], s, stream);
    });

    // Clip targets in slot order (the warmup buffer is order-sensitive).
    for (int b = 0; b < cfg.batch; ++b) {
      auto& sample = batch[static_cast<std::size_t>(b)];
      const double norm = sample.target.norm();
      if (!clip_frozen) {
        warmup_norms.push_back(norm);
        if (static_cast<int>(warmup_norms.size()) >= cfg.clip_warmup) {
          clip_threshold = quantile(warmup_norms, cfg.clip_quantile);
          clip_frozen = true;
          warmup_norms.clear();
          warmup_norms.shrink_to_fit();
        }
      } else if (std::isfinite(clip_threshold) && norm > clip_threshold) {
        sample.target *= clip_threshold / norm;
      }
    }

    parallel_for(static_cast<std::size_t>(cfg.batch), [&](std::size_t b) {
      auto& grads = slot_grads[b];
      std::fill(grads.begin(), grads.end(), 0.0);
      const auto& sample = batch[b];
      const mat_t pred = net.forward(sample.state, sample.s);
      const mat_t resid = pred - sample.target;
      slot_loss[b] = resid.squaredNorm();
      slot_target_sq[b] = sample.target.squaredNorm();
      const mat_t upstream = 2.0 * inv_batch * resid;
      net.backward(sample.state, sample.s, upstream, grads);
    });

    auto& grads = slot_grads[0];
    for (int b = 1; b < cfg.batch; ++b)
      for (std::size_t k = 0; k < np; ++k) grads[k] += slot_grads[static_cast<std::size_t>(b)][k];

    const double loss =
        inv_batch * std::accumulate(slot_loss.begin(), slot_loss.end(), 0.0);
    const double zero_loss =
        inv_batch * std::accumulate(slot_target_sq.begin(), slot_target_sq.end(), 0.0);

    auto& params = net.params();
    const double bc1 = 1.0 - std::pow(cfg.adam_beta1, step + 1);
    const double bc2 = 1.0 - std::pow(cfg.adam_beta2, step + 1);
    for (std::size_t k = 0; k < np; ++k) {
      adam_m[k] = cfg.adam_beta1 * adam_m[k] + (1.0 - cfg.adam_beta1) * grads[k];
      adam_v[k] = cfg.adam_beta2 * adam_v[k] + (1.0 - cfg.adam_beta2) * grads[k] * grads[k];
      params[k] -= lr_t * (adam_m[k] / bc1) / (std::sqrt(adam_v[k] / bc2) + cfg.adam_eps);
    }

    if (step >= cfg.steps - window) {
      window_loss += loss;
      window_zero += zero_loss;
      ++window_count;
    }
    if (cfg.log_every > 0 && (step % cfg.log_every == 0 || step == cfg.steps - 1)) {
      report.loss_curve.emplace_back(step, loss);
      if (log_sink) {
        const double wall =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        log_sink(TrainLogEntry{step, loss, lr_t, wall});
      }
    }
  }

  report.window = window_count;
  report.final_loss = window_loss / static_cast<double>(window_count);
  report.zero_predictor_loss = window_zero / static_cast<double>(window_count);
  report.clip_threshold = std::isfinite(clip_threshold) ? clip_threshold : 0.0;
  report.param_checksum = params_checksum(net.params());
  return report;
}

std::uint64_t params_checksum(const std::vector<double>& params) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double p : params) {
    std::uint64_t bits;
    std::memcpy(&bits, &p, sizeof bits);
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xffULL;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

}  // namespace hedge
