#pragma once

#include <vector>

#include "hedge/rng.hpp"
#include "hedge/spectral.hpp"

namespace hedge {

/// Mixing schedules on [0, S]. linear and smoothstep satisfy alpha(0) = 1,
/// beta(0) = 0, alpha nonincreasing, alpha + beta = 1. constant_ou (alpha = 0,
/// beta = 1) carries the pure-OU oracle configurations and the OU ablation and
/// is exempt from the endpoint condition.
enum class ScheduleKind { linear, smoothstep, constant_ou };

struct ScheduleEval {
  double alpha;
  double beta;
};

struct DiffusionConfig {
  double horizon = 1.0;  // S
  double gamma = 12.0;   // mean-reversion strength
  double tau = 1.0;      // noise temperature; terminal law is N(M0, (tau/gamma) I)
  mat_t base_mean;       // M0, must be n x m; keep it permutation invariant
  ScheduleKind schedule = ScheduleKind::linear;
  int quad_points = 512;  // Simpson grid intervals, >= 64

  void validate(int n, int m) const;  // throws std::invalid_argument
};

/// Defaults keyed to an observed incidence density: M0 = rho 1 1^T and
/// tau = gamma rho (1 - rho), so the terminal entry variance is rho (1 - rho).
DiffusionConfig make_default_config(int n, int m, double rho_hat);

ScheduleEval schedule_eval(const DiffusionConfig& cfg, double s);

const char* schedule_name(ScheduleKind kind);
ScheduleKind schedule_from_name(const std::string& name);

/// Score evaluation floors: below kScoreTimeFloor * S the conditional variance
/// is too small for a stable score, and variances at or below kVarFloor are
/// rejected outright.
inline constexpr double kVarFloor = 1e-12;
inline constexpr double kScoreTimeFloor = 1e-3;

/// Per-mode conditional Gaussian law of X_s given X_0: mode (i, j) is
/// N(mean_modes(i,j), var_modes(i,j)) independently, in the spectral basis.
struct ConditionalMoments {
  double s = 0.0;
  double horizon = 0.0;
  mat_t mean_modes;
  mat_t var_modes;
};

/// Solves the per-mode moment ODEs
///   m' = -(alpha r + beta gamma) m + beta gamma m0,   m(0) = x0 mode
///   c' = -2 (alpha r + beta gamma) c + 2 tau beta,    c(0) = 0
/// by integrating factors. Cumulative integrals are tabulated once on the
/// quad_points Simpson grid (integrating factors kept in log space so large
/// gamma S cannot overflow); queries finish the bracketing interval with an
/// exact partial Simpson step, so refinement accuracy is O(h^4).
/// moments() is const and reads immutable tables: concurrent use is safe.
class MomentSolver {
 public:
  MomentSolver(const DiffusionConfig& cfg, const SpectralBasis& basis, const mat_t& x0);

  ConditionalMoments moments(double s) const;
  const DiffusionConfig& config() const { return cfg_; }

 private:
  double log_cumulative(const std::vector<double>& table, Eigen::Index mode, int k,
                        double b_u0, double b_mid, double b_s, double beta_u0, double beta_mid,
                        double beta_s, double width) const;

  DiffusionConfig cfg_;
  int grid_;       // quad_points
  double step_;    // horizon / grid_
  Eigen::Index n_ = 0, m_ = 0;
  mat_t x0_modes_;
  mat_t m0_modes_;
  mat_t rates_;
  // Cumulative alpha and beta integrals on the half grid (2 grid_ + 1 nodes).
  std::vector<double> alpha_int_;
  std::vector<double> beta_int_;
  // log of cumulative integrals of e^{B} beta and e^{2B} beta at the grid
  // nodes, one column of (grid_ + 1) values per mode, column-major.
  std::vector<double> log_c1_;
  std::vector<double> log_c2_;
};

/// Draw X_s = U (mean + sqrt(var) .* xi) V^T with standard normal xi.
mat_t sample_forward_state(const ConditionalMoments& mom, const SpectralBasis& basis,
                           rng::Stream& stream);

/// Conditional score of the Gaussian law at X:
///   score = U (-(U^T X V - mean) ./ var) V^T.
/// Throws below the time floor or when any variance is at or below kVarFloor.
mat_t conditional_score(const ConditionalMoments& mom, const SpectralBasis& basis,
                        const mat_t& x);

/// Ablation masks drop terms of the heat operator before anything else is
/// built: ou_only zeroes both Laplacians, node_only keeps L_V X, edge_only
/// keeps X L_E.
enum class OperatorMask { full, ou_only, node_only, edge_only };

const char* mask_name(OperatorMask mask);
OperatorMask mask_from_name(const std::string& name);

/// Operators, spectral basis, and moment solver for one hypergraph under one
/// diffusion config. This is the per-hypergraph unit cached by the trainer.
class ForwardProcess {
 public:
  ForwardProcess(const IncidenceMatrix& h, DiffusionConfig cfg,
                 OperatorMask mask = OperatorMask::full);

  const IncidenceMatrix& incidence() const { return h_; }
  const DiffusionConfig& config() const { return cfg_; }
  OperatorMask mask() const { return mask_; }
  const NodeLaplacian& node_op() const { return lv_; }
  const EdgeLaplacian& edge_op() const { return le_; }
  const SpectralBasis& basis() const { return basis_; }
  const ModeGrid& modes() const { return modes_; }

  ConditionalMoments moments(double s) const { return solver_.moments(s); }
  mat_t sample_state(const ConditionalMoments& mom, rng::Stream& stream) const;
  mat_t score(const ConditionalMoments& mom, const mat_t& x) const;

  /// Ideal reverse drift u*_{s|H}(X) = alpha A_H(X) + beta gamma (X - M0)
  ///                                   + 2 tau beta score_s(X).
  mat_t reverse_drift(const ConditionalMoments& mom, const mat_t& x) const;

  /// Forward drift b_s(X) = -alpha A_H(X) - beta gamma (X - M0).
  mat_t forward_drift(const ConditionalMoments& mom, const mat_t& x) const;

  /// Masked heat action.
  mat_t heat(const mat_t& x) const { return heat_apply(lv_, le_, x); }

 private:
  IncidenceMatrix h_;
  DiffusionConfig cfg_;
  OperatorMask mask_;
  NodeLaplacian lv_;
  EdgeLaplacian le_;
  SpectralBasis basis_;
  ModeGrid modes_;
  MomentSolver solver_;
};

}  // namespace hedge
