#include "hedge/forward.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace hedge {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double logaddexp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = a > b ? a : b;
  const double lo = a > b ? b : a;
  return hi + std::log1p(std::exp(lo - hi));
}

// Simpson rule for a cheap closed-form integrand.
template <typename F>
double simpson(const F& f, double a, double b) {
  return (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
}

}  // namespace

void DiffusionConfig::validate(int n, int m) const {
  if (!(horizon > 0.0)) throw std::invalid_argument("diffusion: horizon must be positive");
  if (!(gamma > 0.0)) throw std::invalid_argument("diffusion: gamma must be positive");
  if (!(tau > 0.0)) throw std::invalid_argument("diffusion: tau must be positive");
  if (quad_points < 64) throw std::invalid_argument("diffusion: quad_points must be >= 64");
  if (base_mean.rows() != n || base_mean.cols() != m) {
    throw std::invalid_argument("diffusion: base_mean must be " + std::to_string(n) + " x " +
                                std::to_string(m));
  }
  if (!base_mean.allFinite()) throw std::invalid_argument("diffusion: base_mean must be finite");
}

DiffusionConfig make_default_config(int n, int m, double rho_hat) {
  if (!(rho_hat > 0.0) || !(rho_hat < 1.0)) {
    throw std::invalid_argument("rho_hat must lie strictly inside (0, 1)");
  }
  DiffusionConfig cfg;
  cfg.base_mean = mat_t::Constant(n, m, rho_hat);
  cfg.tau = cfg.gamma * rho_hat * (1.0 - rho_hat);
  return cfg;
}

ScheduleEval schedule_eval(const DiffusionConfig& cfg, double s) {
  if (s < 0.0 || s > cfg.horizon) {
    throw std::invalid_argument("schedule_eval: s outside [0, horizon]");
  }
  const double u = s / cfg.horizon;
  switch (cfg.schedule) {
    case ScheduleKind::linear:
      return {1.0 - u, u};
    case ScheduleKind::smoothstep: {
      const double b = u * u * (3.0 - 2.0 * u);
      return {1.0 - b, b};
    }
    case ScheduleKind::constant_ou:
      return {0.0, 1.0};
  }
  throw std::logic_error("unknown schedule kind");
}

const char* schedule_name(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::linear: return "linear";
    case ScheduleKind::smoothstep: return "smoothstep";
    case ScheduleKind::constant_ou: return "constant_ou";
  }
  return "?";
}

ScheduleKind schedule_from_name(const std::string& name) {
  if (name == "linear") return ScheduleKind::linear;
  if (name == "smoothstep") return ScheduleKind::smoothstep;
  if (name == "constant_ou") return ScheduleKind::constant_ou;
  throw std::invalid_argument("unknown schedule: " + name);
}

MomentSolver::MomentSolver(const DiffusionConfig& cfg, const SpectralBasis& basis,
                           const mat_t& x0)
    : cfg_(cfg),
      grid_(cfg.quad_points),
      step_(cfg.horizon / cfg.quad_points),
      n_(x0.rows()),
      m_(x0.cols()) {
  cfg_.validate(int(n_), int(m_));
  if (basis.node_eigenvalues.size() != n_ || basis.edge_eigenvalues.size() != m_) {
    throw std::invalid_argument("moment solver: basis does not match the state shape");
  }
  x0_modes_ = to_modes(basis, x0);
  m0_modes_ = to_modes(basis, cfg_.base_mean);
  rates_ = mode_grid(basis).rates;

  const auto alpha_at = [&](double u) { return schedule_eval(cfg_, u).alpha; };
  const auto beta_at = [&](double u) { return schedule_eval(cfg_, u).beta; };

  // Cumulative schedule integrals on the half grid; each half step gets its
  // own Simpson rule with an analytic midpoint.
  const int half_nodes = 2 * grid_ + 1;
  const double half = 0.5 * step_;
  alpha_int_.assign(half_nodes, 0.0);
  beta_int_.assign(half_nodes, 0.0);
  std::vector<double> beta_nodes(half_nodes);
  beta_nodes[0] = beta_at(0.0);
  for (int k = 1; k < half_nodes; ++k) {
    const double a = (k - 1) * half;
    const double b = std::min(k * half, cfg_.horizon);
    alpha_int_[k] = alpha_int_[k - 1] + simpson(alpha_at, a, b);
    beta_int_[k] = beta_int_[k - 1] + simpson(beta_at, a, b);
    beta_nodes[k] = beta_at(b);
  }

  // Per-mode cumulative integrals of e^{B} beta and e^{2B} beta in log space,
  // B(u) = r A(u) + gamma Bi(u). Each interval is shifted by its right
  // endpoint before exponentiating, so nothing here can overflow.
  const Eigen::Index nm = n_ * m_;
  log_c1_.assign(std::size_t(nm) * (grid_ + 1), kNegInf);
  log_c2_.assign(std::size_t(nm) * (grid_ + 1), kNegInf);
  for (Eigen::Index mode = 0; mode < nm; ++mode) {
    const double r = rates_(mode % n_, mode / n_);
    double* c1 = log_c1_.data() + std::size_t(mode) * (grid_ + 1);
    double* c2 = log_c2_.data() + std::size_t(mode) * (grid_ + 1);
    for (int k = 0; k < grid_; ++k) {
      const double b0 = r * alpha_int_[2 * k] + cfg_.gamma * beta_int_[2 * k];
      const double bm = r * alpha_int_[2 * k + 1] + cfg_.gamma * beta_int_[2 * k + 1];
      const double b1 = r * alpha_int_[2 * k + 2] + cfg_.gamma * beta_int_[2 * k + 2];
      const double w = step_ / 6.0;
      const double s1 = std::exp(b0 - b1) * beta_nodes[2 * k] +
                        4.0 * std::exp(bm - b1) * beta_nodes[2 * k + 1] + beta_nodes[2 * k + 2];
      const double s2 = std::exp(2.0 * (b0 - b1)) * beta_nodes[2 * k] +
                        4.0 * std::exp(2.0 * (bm - b1)) * beta_nodes[2 * k + 1] +
                        beta_nodes[2 * k + 2];
      c1[k + 1] = logaddexp(c1[k], s1 > 0.0 ? b1 + std::log(w * s1) : kNegInf);
      c2[k + 1] = logaddexp(c2[k], s2 > 0.0 ? 2.0 * b1 + std::log(w * s2) : kNegInf);
    }
  }
}

ConditionalMoments MomentSolver::moments(double s) const {
  if (s < 0.0 || s > cfg_.horizon) {
    throw std::invalid_argument("moments: s outside [0, horizon]");
  }
  int k = int(s / step_);
  if (k > grid_) k = grid_;
  if (s < k * step_) --k;  // guard against an upward rounding of s / step_
  const double u0 = k * step_;
  const double w = std::max(s - u0, 0.0);

  const auto alpha_at = [&](double u) { return schedule_eval(cfg_, u).alpha; };
  const auto beta_at = [&](double u) { return schedule_eval(cfg_, u).beta; };

  // Partial Simpson step from the bracketing grid node to s; the nested call
  // supplies the schedule integrals at the partial midpoint.
  double a_s = alpha_int_[2 * k], bi_s = beta_int_[2 * k];
  double a_mid = a_s, bi_mid = bi_s;
  double beta0 = 0.0, beta_mid = 0.0, beta_s = 0.0;
  const double umid = u0 + 0.5 * w;
  if (w > 0.0) {
    a_s += simpson(alpha_at, u0, s);
    bi_s += simpson(beta_at, u0, s);
    a_mid += simpson(alpha_at, u0, umid);
    bi_mid += simpson(beta_at, u0, umid);
    beta0 = beta_at(u0);
    beta_mid = beta_at(umid);
    beta_s = beta_at(s);
  }

  ConditionalMoments out;
  out.s = s;
  out.horizon = cfg_.horizon;
  out.mean_modes.resize(n_, m_);
  out.var_modes.resize(n_, m_);
  const Eigen::Index nm = n_ * m_;
  for (Eigen::Index mode = 0; mode < nm; ++mode) {
    const Eigen::Index i = mode % n_, j = mode / n_;
    const double r = rates_(i, j);
    const double b_node = r * alpha_int_[2 * k] + cfg_.gamma * beta_int_[2 * k];
    const double b_s = r * a_s + cfg_.gamma * bi_s;
    const double b_mid = r * a_mid + cfg_.gamma * bi_mid;
    const double lc1 =
        log_cumulative(log_c1_, mode, k, b_node, b_mid, b_s, beta0, beta_mid, beta_s, w);
    const double lc2 = log_cumulative(log_c2_, mode, k, 2.0 * b_node, 2.0 * b_mid, 2.0 * b_s,
                                      beta0, beta_mid, beta_s, w);
    const double i1 = lc1 == kNegInf ? 0.0 : std::exp(lc1 - b_s);
    const double i2 = lc2 == kNegInf ? 0.0 : std::exp(lc2 - 2.0 * b_s);
    out.mean_modes(i, j) =
        std::exp(-b_s) * x0_modes_(i, j) + cfg_.gamma * m0_modes_(i, j) * i1;
    out.var_modes(i, j) = 2.0 * cfg_.tau * i2;
  }
  return out;
}

double MomentSolver::log_cumulative(const std::vector<double>& table, Eigen::Index mode, int k,
                                    double b_u0, double b_mid, double b_s, double beta_u0,
                                    double beta_mid, double beta_s, double width) const {
  const double stored = table[std::size_t(mode) * (grid_ + 1) + k];
  if (width <= 0.0) return stored;
  const double sum = std::exp(b_u0 - b_s) * beta_u0 + 4.0 * std::exp(b_mid - b_s) * beta_mid +
                     beta_s;
  const double partial = sum > 0.0 ? b_s + std::log(width / 6.0 * sum) : kNegInf;
  return logaddexp(stored, partial);
}

mat_t sample_forward_state(const ConditionalMoments& mom, const SpectralBasis& basis,
                           rng::Stream& stream) {
  mat_t xm(mom.mean_modes.rows(), mom.mean_modes.cols());
  // Column-major draw order, fixed so a seed reproduces the same state.
  for (Eigen::Index j = 0; j < xm.cols(); ++j) {
    for (Eigen::Index i = 0; i < xm.rows(); ++i) {
      xm(i, j) = mom.mean_modes(i, j) + std::sqrt(mom.var_modes(i, j)) * stream.normal();
    }
  }
  return from_modes(basis, xm);
}

mat_t conditional_score(const ConditionalMoments& mom, const SpectralBasis& basis,
                        const mat_t& x) {
  if (mom.s < kScoreTimeFloor * mom.horizon) {
    throw std::domain_error("conditional_score: s below the time floor " +
                            std::to_string(kScoreTimeFloor * mom.horizon));
  }
  if ((mom.var_modes.array() <= kVarFloor).any()) {
    throw std::domain_error("conditional_score: a mode variance is at or below the floor");
  }
  const mat_t centered = to_modes(basis, x) - mom.mean_modes;
  return from_modes(basis, (-centered.array() / mom.var_modes.array()).matrix());
}

const char* mask_name(OperatorMask mask) {
  switch (mask) {
    case OperatorMask::full: return "full";
    case OperatorMask::ou_only: return "ou_only";
    case OperatorMask::node_only: return "node_only";
    case OperatorMask::edge_only: return "edge_only";
  }
  return "?";
}

OperatorMask mask_from_name(const std::string& name) {
  if (name == "full") return OperatorMask::full;
  if (name == "ou_only") return OperatorMask::ou_only;
  if (name == "node_only") return OperatorMask::node_only;
  if (name == "edge_only") return OperatorMask::edge_only;
  throw std::invalid_argument("unknown operator mask: " + name);
}

namespace {

NodeLaplacian masked_node_op(const IncidenceMatrix& h, OperatorMask mask) {
  if (mask == OperatorMask::ou_only || mask == OperatorMask::edge_only) {
    return NodeLaplacian{mat_t::Zero(h.nodes(), h.nodes())};
  }
  return node_laplacian(h);
}

EdgeLaplacian masked_edge_op(const IncidenceMatrix& h, OperatorMask mask) {
  if (mask == OperatorMask::ou_only || mask == OperatorMask::node_only) {
    return EdgeLaplacian{mat_t::Zero(h.edges(), h.edges()), mat_t::Zero(h.edges(), h.edges()),
                         vec_t::Zero(h.edges())};
  }
  return edge_laplacian(h);
}

}  // namespace

ForwardProcess::ForwardProcess(const IncidenceMatrix& h, DiffusionConfig cfg, OperatorMask mask)
    : h_(h),
      cfg_(std::move(cfg)),
      mask_(mask),
      lv_(masked_node_op(h_, mask)),
      le_(masked_edge_op(h_, mask)),
      basis_(eigendecompose(lv_, le_)),
      modes_(mode_grid(basis_)),
      solver_(cfg_, basis_, h_.entries()) {}

mat_t ForwardProcess::sample_state(const ConditionalMoments& mom, rng::Stream& stream) const {
  return sample_forward_state(mom, basis_, stream);
}

mat_t ForwardProcess::score(const ConditionalMoments& mom, const mat_t& x) const {
  return conditional_score(mom, basis_, x);
}

mat_t ForwardProcess::reverse_drift(const ConditionalMoments& mom, const mat_t& x) const {
  const ScheduleEval sc = schedule_eval(cfg_, mom.s);
  return sc.alpha * heat(x) + sc.beta * cfg_.gamma * (x - cfg_.base_mean) +
         2.0 * cfg_.tau * sc.beta * score(mom, x);
}

mat_t ForwardProcess::forward_drift(const ConditionalMoments& mom, const mat_t& x) const {
  const ScheduleEval sc = schedule_eval(cfg_, mom.s);
  return -sc.alpha * heat(x) - sc.beta * cfg_.gamma * (x - cfg_.base_mean);
}

}  // namespace hedge
