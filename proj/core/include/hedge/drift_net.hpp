#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hedge/incidence.hpp"

namespace hedge {

/// Permutation-equivariant drift field u^theta(X, s).
///
/// Every layer combines, per (input, output) channel pair, the four
/// S_n x S_m-equivariant linear basis maps of a matrix channel: identity,
/// row-mean broadcast, column-mean broadcast, and global-mean broadcast, plus
/// a constant bias per output channel. Hidden layers are tanh activated and
/// FiLM modulated by a per-channel (scale, shift) computed from a sinusoidal
/// embedding of s / horizon through a two-layer dense map. The final layer is
/// linear and zero-initialized, so an untrained net is the zero field and the
/// FiLM map starts as the identity.
///
/// Gradients are exact reverse-mode accumulations written by hand; there is no
/// autodiff framework behind this class.
class DriftNet {
 public:
  struct Config {
    std::vector<int> widths = {1, 16, 16, 16, 1};
    int time_embed_dim = 16;  // even
    int time_hidden = 32;
    double horizon = 1.0;
  };

  DriftNet(Config cfg, std::uint64_t seed);

  mat_t forward(const mat_t& x, double s) const;

  /// Accumulates d<upstream, u(X, s)> / dparams into grads (layout of params())
  /// and returns d<upstream, u(X, s)> / dX. grads must have param_count()
  /// entries; the forward pass is recomputed internally.
  mat_t backward(const mat_t& x, double s, const mat_t& upstream,
                 std::vector<double>& grads) const;

  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  std::size_t param_count() const { return params_.size(); }
  const Config& config() const { return cfg_; }

  /// Upper bound on the state Lipschitz constant at time s: the product over
  /// layers of the exact operator norm of the FiLM-scaled equivariant map
  /// (tanh is 1-Lipschitz). The four basis maps act as joint projections, so
  /// the per-layer norm is a max of four channel-matrix spectral norms.
  double lipschitz_bound(double s) const;

  /// Binary checkpoint: magic + shape header + little-endian doubles in
  /// parameter layout order.
  void save(const std::string& path) const;
  static DriftNet load(const std::string& path);

 private:
  struct Trace;
  Trace run_forward(const mat_t& x, double s) const;
  void film_at(double s, std::vector<double>& embed, std::vector<double>& hidden,
               std::vector<double>& film) const;

  Config cfg_;
  std::vector<double> params_;

  // Offsets into params_.
  struct LayerOffsets {
    std::size_t w[4];  // identity, row, col, global; each out x in, row-major
    std::size_t bias;
    int in, out;
  };
  std::vector<LayerOffsets> layers_;
  std::size_t time_w1_ = 0, time_b1_ = 0, time_w2_ = 0, time_b2_ = 0;
  int film_total_ = 0;
};

}  // namespace hedge
