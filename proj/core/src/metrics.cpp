#include "hedge/metrics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hedge/spectral.hpp"

namespace hedge {

double wasserstein_1d(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("wasserstein_1d: empty sample set");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const std::size_t na = a.size(), nb = b.size();
  if (na == nb) {
    double acc = 0.0;
    for (std::size_t i = 0; i < na; ++i) acc += std::abs(a[i] - b[i]);
    return acc / static_cast<double>(na);
  }
  // Integrate |F_a^{-1}(q) - F_b^{-1}(q)| dq; both inverses are step functions
  // with breakpoints at i/na and j/nb.
  double acc = 0.0, q = 0.0;
  std::size_t ia = 0, ib = 0;
  while (ia < na && ib < nb) {
    const double qa = static_cast<double>(ia + 1) / static_cast<double>(na);
    const double qb = static_cast<double>(ib + 1) / static_cast<double>(nb);
    const double qn = std::min(qa, qb);
    acc += (qn - q) * std::abs(a[ia] - b[ib]);
    if (qa <= qn + 1e-15) ++ia;
    if (qb <= qn + 1e-15) ++ib;
    q = qn;
  }
  return acc;
}

std::vector<double> intersection_sizes(const IncidenceMatrix& h) {
  const int m = h.edges();
  if (m < 2) throw std::invalid_argument("intersection_sizes: need at least 2 hyperedges");
  const mat_t gram = h.entries().transpose() * h.entries();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m) * static_cast<std::size_t>(m - 1) / 2);
  for (int j = 0; j < m; ++j)
    for (int k = j + 1; k < m; ++k) out.push_back(gram(j, k));
  return out;
}

double intersection_tail_fraction(const IncidenceMatrix& h) {
  const std::vector<double> sizes = intersection_sizes(h);
  std::size_t tail = 0;
  for (double s : sizes)
    if (s >= 2.0) ++tail;
  return static_cast<double>(tail) / static_cast<double>(sizes.size());
}

std::vector<double> laplacian_spectrum(const IncidenceMatrix& h, bool want_node, int k) {
  const mat_t lap = want_node ? node_laplacian(h).matrix : edge_laplacian(h).matrix;
  Eigen::SelfAdjointEigenSolver<mat_t> solver(lap, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("laplacian_spectrum: eigensolver failed");
  const vec_t ev = solver.eigenvalues();
  const int take = std::min<int>(k, static_cast<int>(ev.size()));
  std::vector<double> out(ev.data(), ev.data() + take);
  return out;
}

namespace {

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

MeanStd mean_std(const vec_t& v) {
  MeanStd out;
  out.mean = v.mean();
  out.std = std::sqrt(std::max(0.0, v.array().square().mean() - out.mean * out.mean));
  return out;
}

double mean_of(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

double max_of(const std::vector<double>& v) {
  double best = v.front();
  for (double x : v) best = std::max(best, x);
  return best;
}

}  // namespace

vec_t structural_features(const IncidenceMatrix& h) {
  const DegreeProfile prof = degree_profile(h);
  const MeanStd deg = mean_std(prof.node_degrees);
  const MeanStd size = mean_std(prof.edge_sizes);
  const std::vector<double> inter = intersection_sizes(h);
  const int k = std::min({h.nodes(), h.edges(), 32});
  const std::vector<double> node_spec = laplacian_spectrum(h, true, k);
  const std::vector<double> edge_spec = laplacian_spectrum(h, false, k);

  vec_t f(12);
  f(0) = h.density();
  f(1) = deg.mean;
  f(2) = deg.std;
  f(3) = size.mean;
  f(4) = size.std;
  f(5) = intersection_tail_fraction(h);
  f(6) = mean_of(inter);
  f(7) = max_of(inter);
  f(8) = mean_of(node_spec);
  f(9) = max_of(node_spec);
  f(10) = mean_of(edge_spec);
  f(11) = max_of(edge_spec);
  return f;
}

double feature_mmd(const std::vector<vec_t>& real_features, const std::vector<vec_t>& gen_features) {
  const std::size_t nx = real_features.size(), ny = gen_features.size();
  if (nx < 2 || ny < 2) throw std::invalid_argument("feature_mmd: need at least 2 samples per batch");
  const Eigen::Index dim = real_features.front().size();
  for (const auto& f : real_features)
    if (f.size() != dim) throw std::invalid_argument("feature_mmd: inconsistent feature dimension");
  for (const auto& f : gen_features)
    if (f.size() != dim) throw std::invalid_argument("feature_mmd: inconsistent feature dimension");

  // Standardize both clouds by the real batch's statistics so no coordinate
  // dominates the kernel through its raw scale.
  vec_t mu = vec_t::Zero(dim), var = vec_t::Zero(dim);
  for (const auto& f : real_features) mu += f;
  mu /= static_cast<double>(nx);
  for (const auto& f : real_features) var += (f - mu).array().square().matrix();
  var /= static_cast<double>(nx);
  vec_t scale(dim);
  for (Eigen::Index d = 0; d < dim; ++d) scale(d) = var(d) > 0.0 ? 1.0 / std::sqrt(var(d)) : 1.0;

  std::vector<vec_t> xs(nx), ys(ny);
  for (std::size_t i = 0; i < nx; ++i) xs[i] = (real_features[i] - mu).cwiseProduct(scale);
  for (std::size_t i = 0; i < ny; ++i) ys[i] = (gen_features[i] - mu).cwiseProduct(scale);

  std::vector<double> dists;
  dists.reserve((nx + ny) * (nx + ny - 1) / 2);
  auto at = [&](std::size_t i) -> const vec_t& { return i < nx ? xs[i] : ys[i - nx]; };
  for (std::size_t i = 0; i < nx + ny; ++i)
    for (std::size_t j = i + 1; j < nx + ny; ++j) dists.push_back((at(i) - at(j)).norm());
  std::sort(dists.begin(), dists.end());
  double bandwidth = dists[dists.size() / 2];
  if (!(bandwidth > 0.0)) bandwidth = 1.0;
  const double inv2h2 = 1.0 / (2.0 * bandwidth * bandwidth);
  auto kernel = [&](const vec_t& u, const vec_t& v) { return std::exp(-(u - v).squaredNorm() * inv2h2); };

  double kxx = 0.0, kyy = 0.0, kxy = 0.0;
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < nx; ++j)
      if (i != j) kxx += kernel(xs[i], xs[j]);
  for (std::size_t i = 0; i < ny; ++i)
    for (std::size_t j = 0; j < ny; ++j)
      if (i != j) kyy += kernel(ys[i], ys[j]);
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j) kxy += kernel(xs[i], ys[j]);

  const double dnx = static_cast<double>(nx), dny = static_cast<double>(ny);
  const double mmd2 = kxx / (dnx * (dnx - 1.0)) + kyy / (dny * (dny - 1.0)) - 2.0 * kxy / (dnx * dny);
  return std::sqrt(std::max(0.0, mmd2));
}

nlohmann::json MetricReport::to_json() const {
  return nlohmann::json{{"density_gap", density_gap},
                        {"degree_gap", degree_gap},
                        {"size_gap", size_gap},
                        {"degree_w1", degree_w1},
                        {"size_w1", size_w1},
                        {"node_spectral_w1", node_spectral_w1},
                        {"edge_spectral_w1", edge_spectral_w1},
                        {"intersection_tail_gap", intersection_tail_gap},
                        {"intersection_w1", intersection_w1},
                        {"feature_mmd", feature_mmd}};
}

namespace {

struct Pooled {
  std::vector<double> degrees, sizes, node_spec, edge_spec, inter;
  double density_mean = 0.0, tail_mean = 0.0;
  std::vector<vec_t> features;
};

Pooled pool(const std::vector<IncidenceMatrix>& batch, int spectral_k) {
  Pooled out;
  for (const auto& h : batch) {
    const DegreeProfile prof = degree_profile(h);
    out.degrees.insert(out.degrees.end(), prof.node_degrees.data(), prof.node_degrees.data() + h.nodes());
    out.sizes.insert(out.sizes.end(), prof.edge_sizes.data(), prof.edge_sizes.data() + h.edges());
    const auto ns = laplacian_spectrum(h, true, spectral_k);
    const auto es = laplacian_spectrum(h, false, spectral_k);
    out.node_spec.insert(out.node_spec.end(), ns.begin(), ns.end());
    out.edge_spec.insert(out.edge_spec.end(), es.begin(), es.end());
    const auto inter = intersection_sizes(h);
    out.inter.insert(out.inter.end(), inter.begin(), inter.end());
    out.density_mean += h.density();
    out.tail_mean += intersection_tail_fraction(h);
    out.features.push_back(structural_features(h));
  }
  const double count = static_cast<double>(batch.size());
  out.density_mean /= count;
  out.tail_mean /= count;
  return out;
}

}  // namespace

MetricReport evaluate_batches(const std::vector<IncidenceMatrix>& real_batch,
                              const std::vector<IncidenceMatrix>& gen_batch, const MetricOptions& opts) {
  if (real_batch.empty() || gen_batch.empty())
    throw std::invalid_argument("evaluate_batches: empty batch");
  const int n = real_batch.front().nodes(), m = real_batch.front().edges();
  for (const auto& h : real_batch)
    if (h.nodes() != n || h.edges() != m)
      throw std::invalid_argument("evaluate_batches: mixed shapes in reference batch");
  for (const auto& h : gen_batch)
    if (h.nodes() != n || h.edges() != m)
      throw std::invalid_argument("evaluate_batches: generated batch shape differs from reference");
  if (m < 2) throw std::invalid_argument("evaluate_batches: need at least 2 hyperedges");

  const int k = opts.spectral_k > 0 ? std::min({opts.spectral_k, n, m}) : std::min({n, m, 32});
  const Pooled real = pool(real_batch, k);
  const Pooled gen = pool(gen_batch, k);

  MetricReport rep;
  rep.density_gap = std::abs(gen.density_mean - real.density_mean);
  rep.degree_gap = std::abs(mean_of(gen.degrees) - mean_of(real.degrees));
  rep.size_gap = std::abs(mean_of(gen.sizes) - mean_of(real.sizes));
  rep.degree_w1 = wasserstein_1d(real.degrees, gen.degrees);
  rep.size_w1 = wasserstein_1d(real.sizes, gen.sizes);
  rep.node_spectral_w1 = wasserstein_1d(real.node_spec, gen.node_spec);
  rep.edge_spectral_w1 = wasserstein_1d(real.edge_spec, gen.edge_spec);
  rep.intersection_tail_gap = std::abs(gen.tail_mean - real.tail_mean);
  rep.intersection_w1 = wasserstein_1d(real.inter, gen.inter);
  rep.feature_mmd = feature_mmd(real.features, gen.features);
  return rep;
}

}  // namespace hedge
