#pragma once

#include <Eigen/Dense>

namespace hedge {

using mat_t = Eigen::MatrixXd;
using vec_t = Eigen::VectorXd;

/// Real n x m state evolved by the diffusion. Entries are unconstrained;
/// binary incidence matrices embed as {0,1}-valued states.
using RelaxedState = mat_t;

/// Node degrees d_V = H 1_m and hyperedge sizes d_E = H^T 1_n. Counts are
/// exact small integers stored in double precision.
struct DegreeProfile {
  vec_t node_degrees;
  vec_t edge_sizes;
};

/// Binary node x hyperedge incidence matrix.
///
/// Invariants checked at construction: every entry is exactly 0 or 1; no
/// hyperedge (column) is empty unless allow_empty_hyperedges; no node (row) is
/// isolated unless allow_isolated_nodes. Generator output is constructed
/// permissively because empty hyperedges must be reported, not repaired.
class IncidenceMatrix {
 public:
  struct Options {
    bool allow_isolated_nodes = false;
    bool allow_empty_hyperedges = false;
  };

  explicit IncidenceMatrix(mat_t entries, Options opt);
  explicit IncidenceMatrix(mat_t entries) : IncidenceMatrix(std::move(entries), Options()) {}

  int nodes() const { return int(entries_.rows()); }
  int edges() const { return int(entries_.cols()); }
  const mat_t& entries() const { return entries_; }
  const Options& options() const { return opt_; }
  /// Number of incidences (ones).
  int nnz() const { return int(entries_.sum() + 0.5); }
  /// Incidence density rho = nnz / (n m).
  double density() const { return entries_.sum() / double(entries_.size()); }

 private:
  mat_t entries_;
  Options opt_;
};

/// Symmetric normalized node Laplacian
///   L_V = I - D_V^{-1/2} H D_E^{-1} H^T D_V^{-1/2}.
/// Rows of isolated nodes equal the corresponding identity rows.
struct NodeLaplacian {
  mat_t matrix;
};

/// Symmetric normalized hyperedge Laplacian built from the off-diagonal
/// normalized overlap matrix
///   A_E = offdiag(D_E^{-1/2} H^T H D_E^{-1/2}),
///   L_E = I - D_ov^{-1/2} A_E D_ov^{-1/2},  D_ov = diag(A_E 1_m).
struct EdgeLaplacian {
  mat_t matrix;
  mat_t overlap;
  vec_t overlap_degrees;
};

/// Entrywise d_i^p with the convention 0^p = 0 for p < 0: zero degrees never
/// receive an epsilon, they stay exactly zero in the normalizations.
vec_t degree_inv_pow(const vec_t& d, double exponent);

DegreeProfile degree_profile(const IncidenceMatrix& h);
NodeLaplacian node_laplacian(const IncidenceMatrix& h);
EdgeLaplacian edge_laplacian(const IncidenceMatrix& h);

/// Two-sided heat action A_H(X) = L_V X + X L_E.
mat_t heat_apply(const NodeLaplacian& lv, const EdgeLaplacian& le, const mat_t& x);

}  // namespace hedge
