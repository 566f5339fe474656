#pragma once

// Reference implementations used only by the tests. Each oracle recomputes its
// quantity along a different route than the library (dense matrix exponentials
// instead of eigenmode factorization, finite differences instead of closed
// forms, explicit transport plans instead of quantile integration, flat loops
// instead of Eigen reductions), so agreement is evidence rather than the same
// code evaluated twice.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// vec(L X + X R) = (I_m kron L + R^T kron I_n) vec(X), column-major vec.
inline MatrixXd two_sided_matrix(const MatrixXd& l, const MatrixXd& r) {
  const Eigen::Index n = l.rows(), m = r.rows();
  const MatrixXd in = MatrixXd::Identity(n, n);
  const MatrixXd im = MatrixXd::Identity(m, m);
  MatrixXd k = Eigen::kroneckerProduct(im, l);
  k += Eigen::kroneckerProduct(r.transpose(), in);
  return k;
}

// Dense heat flow unvec(expm(-s K) vec(X0)) through the Pade-based matrix
// exponential; no eigendecomposition anywhere.
inline MatrixXd heat_flow(const MatrixXd& l, const MatrixXd& r, const MatrixXd& x0, double s) {
  const MatrixXd k = two_sided_matrix(l, r);
  const MatrixXd e = (-s * k).exp();
  const Eigen::Map<const VectorXd> v(x0.data(), x0.size());
  const VectorXd out = e * v;
  return Eigen::Map<const MatrixXd>(out.data(), x0.rows(), x0.cols());
}

// Fourth-order central difference of a scalar function at t.
template <typename F>
double central_diff(F&& f, double t, double h) {
  return (-f(t + 2.0 * h) + 8.0 * f(t + h) - 8.0 * f(t - h) + f(t - 2.0 * h)) / (12.0 * h);
}

// Entrywise gradient of a scalar function of a matrix state.
template <typename F>
MatrixXd entry_gradient(F&& f, MatrixXd x, double h) {
  MatrixXd g(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const double keep = x(i, j);
      auto slice = [&](double t) {
        x(i, j) = t;
        return f(x);
      };
      g(i, j) = central_diff(slice, keep, h);
      x(i, j) = keep;
    }
  return g;
}

// Log density of X under independent per-mode Gaussians after the orthogonal
// change of basis X -> U^T X V (unit Jacobian, so no correction term).
inline double gaussian_log_density(const MatrixXd& u, const MatrixXd& v, const MatrixXd& mean,
                                   const MatrixXd& var, const MatrixXd& x) {
  const MatrixXd xm = u.transpose() * x * v;
  double logp = 0.0;
  for (Eigen::Index j = 0; j < xm.cols(); ++j)
    for (Eigen::Index i = 0; i < xm.rows(); ++i) {
      const double d = xm(i, j) - mean(i, j);
      logp -= 0.5 * (d * d / var(i, j) + std::log(2.0 * std::numbers::pi * var(i, j)));
    }
  return logp;
}

inline double logsumexp(const std::vector<double>& terms) {
  double top = -std::numeric_limits<double>::infinity();
  for (double t : terms) top = std::max(top, t);
  if (!std::isfinite(top)) return top;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - top);
  return top + std::log(acc);
}

// Exact 1-Wasserstein by equal-mass atom replication: with L = lcm(na, nb)
// copies every atom has mass 1/L on both sides, and on the line the sorted
// matching of equal-mass atoms is an optimal plan (monotone rearrangement).
inline double w1_replicate_sorted(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("w1 oracle: empty sample");
  const std::size_t l = std::lcm(a.size(), b.size());
  std::vector<double> ar, br;
  ar.reserve(l);
  br.reserve(l);
  for (double x : a) ar.insert(ar.end(), l / a.size(), x);
  for (double x : b) br.insert(br.end(), l / b.size(), x);
  std::sort(ar.begin(), ar.end());
  std::sort(br.begin(), br.end());
  double total = 0.0;
  for (std::size_t i = 0; i < l; ++i) total += std::abs(ar[i] - br[i]);
  return total / static_cast<double>(l);
}

// Exact LP optimum for equal-size uniform marginals: extreme points of the
// transport polytope are permutation matrices, so minimizing over every
// permutation solves the LP outright. Factorial cost; sizes <= 8 only.
inline double w1_enumerate_plans(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty() || a.size() > 8)
    throw std::invalid_argument("w1 enumeration oracle: need equal sizes in [1, 8]");
  std::vector<std::size_t> idx(a.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  double best = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) cost += std::abs(a[i] - b[idx[i]]);
    best = std::min(best, cost);
  } while (std::next_permutation(idx.begin(), idx.end()));
  return best / static_cast<double>(a.size());
}

// Unbiased RBF MMD recomputed with flat double loops: standardize both clouds
// by the first cloud's population statistics (unit scale on constant
// coordinates), bandwidth = upper median of pooled pairwise distances (1 when
// that is zero), k = exp(-d^2 / (2 h^2)), sqrt of the clamped unbiased
// estimate.
inline double mmd_double_sum(const std::vector<std::vector<double>>& real_feats,
                             const std::vector<std::vector<double>>& gen_feats) {
  const std::size_t nx = real_feats.size(), ny = gen_feats.size();
  if (nx < 2 || ny < 2) throw std::invalid_argument("mmd oracle: need >= 2 samples per side");
  const std::size_t dim = real_feats.front().size();

  std::vector<double> mu(dim, 0.0), var(dim, 0.0), scale(dim, 1.0);
  for (const auto& f : real_feats)
    for (std::size_t d = 0; d < dim; ++d) mu[d] += f[d];
  for (std::size_t d = 0; d < dim; ++d) mu[d] /= static_cast<double>(nx);
  for (const auto& f : real_feats)
    for (std::size_t d = 0; d < dim; ++d) var[d] += (f[d] - mu[d]) * (f[d] - mu[d]);
  for (std::size_t d = 0; d < dim; ++d) {
    var[d] /= static_cast<double>(nx);
    if (var[d] > 0.0) scale[d] = 1.0 / std::sqrt(var[d]);
  }

  std::vector<std::vector<double>> pool;
  pool.reserve(nx + ny);
  for (const auto& f : real_feats) {
    std::vector<double> z(dim);
    for (std::size_t d = 0; d < dim; ++d) z[d] = (f[d] - mu[d]) * scale[d];
    pool.push_back(std::move(z));
  }
  for (const auto& f : gen_feats) {
    std::vector<double> z(dim);
    for (std::size_t d = 0; d < dim; ++d) z[d] = (f[d] - mu[d]) * scale[d];
    pool.push_back(std::move(z));
  }

  auto dist2 = [&](std::size_t i, std::size_t j) {
    double acc = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      const double delta = pool[i][d] - pool[j][d];
      acc += delta * delta;
    }
    return acc;
  };

  std::vector<double> dists;
  for (std::size_t i = 0; i < pool.size(); ++i)
    for (std::size_t j = i + 1; j < pool.size(); ++j) dists.push_back(std::sqrt(dist2(i, j)));
  std::sort(dists.begin(), dists.end());
  double h = dists[dists.size() / 2];
  if (!(h > 0.0)) h = 1.0;

  auto kern = [&](std::size_t i, std::size_t j) { return std::exp(-dist2(i, j) / (2.0 * h * h)); };
  double kxx = 0.0, kyy = 0.0, kxy = 0.0;
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < nx; ++j)
      if (i != j) kxx += kern(i, j);
  for (std::size_t i = 0; i < ny; ++i)
    for (std::size_t j = 0; j < ny; ++j)
      if (i != j) kyy += kern(nx + i, nx + j);
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j) kxy += kern(i, nx + j);

  const double dnx = static_cast<double>(nx), dny = static_cast<double>(ny);
  const double mmd2 = kxx / (dnx * (dnx - 1.0)) + kyy / (dny * (dny - 1.0)) - 2.0 * kxy / (dnx * dny);
  return std::sqrt(std::max(0.0, mmd2));
}

}  // namespace oracle
