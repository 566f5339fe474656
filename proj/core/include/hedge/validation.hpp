#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hedge/forward.hpp"
#include "hedge/incidence.hpp"

namespace hedge {

/// One numerical certificate. `measured` is compared against `bound` with
/// `tolerance` slack; the comparison direction is recorded in `detail` along
/// with any failure or skip explanation.
struct CheckResult {
  std::string name;
  bool passed = false;
  bool skipped = false;
  std::string detail;
  double measured = 0.0;
  double bound = 0.0;
  double tolerance = 0.0;
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  bool all_passed() const;  // skipped checks do not fail the report
  nlohmann::json to_json() const;
};

/// Heat operator certificates on one hypergraph: self-adjointness, positive
/// semidefiniteness, monotone norm decay along the flow, eigenpair rates
/// against the direct operator, generator consistency of the kernel by finite
/// differences, and the exponential convergence bound to the projected limit.
std::vector<CheckResult> check_heat_operator(const IncidenceMatrix& h, std::uint64_t seed);

struct ConditionalLawConfig {
  int paths = 20000;
  double dt = 1e-4;
  std::uint64_t seed = 0;
};

/// Conditional Gaussian law certificates: exact moments at s = 0, the
/// constant-coefficient analytic oracle, and Euler-Maruyama Monte Carlo
/// agreement of per-mode means and variances at five times within 4 SE.
std::vector<CheckResult> check_conditional_law(const IncidenceMatrix& h, const DiffusionConfig& cfg,
                                               const ConditionalLawConfig& mc);

/// Two-component mixture certificates at random probe states: the posterior-
/// weighted conditional score equals the finite-difference gradient of the
/// explicit mixture log-density, the posterior-weighted reverse drift equals
/// -(posterior-weighted forward drift) + 2 tau beta times that gradient, the
/// posterior is exactly (1/2, 1/2) for identical components, and a state near
/// one component's mean concentrates the posterior on it.
std::vector<CheckResult> check_mixture_identity(const IncidenceMatrix& h1, const IncidenceMatrix& h2,
                                                DiffusionConfig cfg, int probes, double tolerance,
                                                std::uint64_t seed);

struct EmOrderConfig {
  int paths = 256;
  std::vector<int> level_steps = {64, 128, 256, 512};
  int reference_steps = 8192;
  double noise_scale = 1.0;  // 0 degenerates to an ODE study; the check is then skipped
  std::uint64_t seed = 0;
};

/// Shared-increment refinement study of Euler-Maruyama on frozen linear
/// dynamics with additive noise. Reports the fitted log-log slope of the
/// terminal RMS error against the asserted band [0.4, 0.65] plus the mean
/// error ratio between adjacent levels.
std::vector<CheckResult> check_em_order(const EmOrderConfig& cfg);

/// Entrywise-linear drift u(X) = gain (X - center) + shift. The Jacobian is
/// gain * I, so the one-sided Lipschitz constant is exactly `gain`.
struct LinearDrift {
  double gain = -1.0;
  mat_t center;
  mat_t shift;

  mat_t operator()(const mat_t& x) const;
};

struct StabilityConfig {
  int paths = 4000;
  int steps = 500;
  int grid = 50;      // comparison times (subset of the step grid)
  double horizon = 1.0;
  double tau = 1.0;   // shared diffusion is sqrt(2 tau), constant
  std::string label;  // suffix for check names, e.g. "_const"
  double expected_error_sq = -1.0;  // >= 0: also assert E||e_r||^2 equals this exactly
  std::uint64_t seed = 0;
};

/// Synchronous-coupling certificate: two diffusions share every Brownian
/// increment and initial state; the mean-square gap must stay below the
/// Gronwall envelope exp(Lambda(t)) * int exp(-Lambda) E||e_r||^2, with
/// Lambda(t) = (2 kappa + 1) t and kappa the perturbed drift's gain.
std::vector<CheckResult> check_stability_bound(const LinearDrift& ideal, const LinearDrift& perturbed,
                                               const StabilityConfig& cfg);

/// Joint relabeling certificates: conditional means, entrywise variances,
/// scores, reverse drifts, and a freshly initialized net all commute with
/// random (P, Q) actions; a deliberately non-invariant base mean must break
/// the mean transport (negative control).
std::vector<CheckResult> check_equivariance(const IncidenceMatrix& h, std::uint64_t seed);

/// The full battery at CLI scale (lighter Monte Carlo than the acceptance
/// settings, same statistics).
ValidationReport run_validation(std::uint64_t seed);

}  // namespace hedge
