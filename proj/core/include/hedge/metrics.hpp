#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hedge/incidence.hpp"

namespace hedge {

/// Exact 1-Wasserstein distance between two empirical distributions on R.
/// Equal sizes reduce to the mean absolute difference of sorted samples;
/// unequal sizes integrate |F_a^{-1} - F_b^{-1}| over the merged quantile grid.
double wasserstein_1d(std::vector<double> a, std::vector<double> b);

/// Pairwise hyperedge intersection sizes |e_j ∩ e_k|, j < k, as a flat vector.
std::vector<double> intersection_sizes(const IncidenceMatrix& h);

/// Fraction of hyperedge pairs sharing at least two nodes.
double intersection_tail_fraction(const IncidenceMatrix& h);

/// Ascending eigenvalues of the node (want_node=true) or hyperedge Laplacian,
/// truncated to the first k.
std::vector<double> laplacian_spectrum(const IncidenceMatrix& h, bool want_node, int k);

/// 12-dim structural summary: density, degree mean/std, size mean/std,
/// intersection tail fraction, intersection mean/max, node spectrum mean/max,
/// edge spectrum mean/max.
vec_t structural_features(const IncidenceMatrix& h);

/// Unbiased-estimator RBF MMD between feature clouds, standardized by the
/// real batch's per-coordinate statistics; bandwidth = median pooled pairwise
/// distance. Returns sqrt(max(0, MMD^2)). Needs >= 2 samples per side.
double feature_mmd(const std::vector<vec_t>& real_features, const std::vector<vec_t>& gen_features);

struct MetricReport {
  double density_gap = 0.0;          // |mean density gap|
  double degree_gap = 0.0;           // |pooled mean degree gap|
  double size_gap = 0.0;             // |pooled mean hyperedge size gap|
  double degree_w1 = 0.0;            // W1 between pooled degree samples
  double size_w1 = 0.0;              // W1 between pooled size samples
  double node_spectral_w1 = 0.0;     // W1 between pooled truncated node spectra
  double edge_spectral_w1 = 0.0;     // W1 between pooled truncated edge spectra
  double intersection_tail_gap = 0.0;  // |mean tail-fraction gap|
  double intersection_w1 = 0.0;      // W1 between pooled intersection sizes
  double feature_mmd = 0.0;

  nlohmann::json to_json() const;
};

struct MetricOptions {
  int spectral_k = 0;  // 0: min(n, m, 32)
};

/// Full report comparing a generated batch against a reference batch of the
/// same shape. Throws on empty batches, shape mismatches, or m < 2.
MetricReport evaluate_batches(const std::vector<IncidenceMatrix>& real_batch,
                              const std::vector<IncidenceMatrix>& gen_batch,
                              const MetricOptions& opts = {});

}  // namespace hedge
