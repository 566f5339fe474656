#include "hedge/incidence.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hedge {

IncidenceMatrix::IncidenceMatrix(mat_t entries, Options opt)
    : entries_(std::move(entries)), opt_(opt) {
  if (entries_.rows() < 1 || entries_.cols() < 1) {
    throw std::invalid_argument("incidence matrix must have at least one node and one hyperedge");
  }
  for (Eigen::Index j = 0; j < entries_.cols(); ++j) {
    for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
      const double v = entries_(i, j);
      if (v != 0.0 && v != 1.0) {
        throw std::invalid_argument("incidence entry (" + std::to_string(i) + "," +
                                    std::to_string(j) + ") is not exactly 0 or 1");
      }
    }
  }
  if (!opt_.allow_empty_hyperedges) {
    for (Eigen::Index j = 0; j < entries_.cols(); ++j) {
      if (entries_.col(j).sum() == 0.0) {
        throw std::invalid_argument("hyperedge " + std::to_string(j) + " is empty");
      }
    }
  }
  if (!opt_.allow_isolated_nodes) {
    for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
      if (entries_.row(i).sum() == 0.0) {
        throw std::invalid_argument("node " + std::to_string(i) + " is isolated");
      }
    }
  }
}

vec_t degree_inv_pow(const vec_t& d, double exponent) {
  vec_t out(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    out[i] = d[i] == 0.0 ? 0.0 : std::pow(d[i], exponent);
  }
  return out;
}

DegreeProfile degree_profile(const IncidenceMatrix& h) {
  return DegreeProfile{h.entries().rowwise().sum(), h.entries().colwise().sum().transpose()};
}

NodeLaplacian node_laplacian(const IncidenceMatrix& h) {
  const DegreeProfile deg = degree_profile(h);
  const vec_t dv_isqrt = degree_inv_pow(deg.node_degrees, -0.5);
  const vec_t de_inv = degree_inv_pow(deg.edge_sizes, -1.0);
  const mat_t hn = dv_isqrt.asDiagonal() * h.entries() * de_inv.asDiagonal();
  mat_t l = mat_t::Identity(h.nodes(), h.nodes()) -
            hn * h.entries().transpose() * dv_isqrt.asDiagonal();
  l = 0.5 * (l + l.transpose()).eval();
  return NodeLaplacian{std::move(l)};
}

EdgeLaplacian edge_laplacian(const IncidenceMatrix& h) {
  const DegreeProfile deg = degree_profile(h);
  const vec_t de_isqrt = degree_inv_pow(deg.edge_sizes, -0.5);
  mat_t overlap = de_isqrt.asDiagonal() * (h.entries().transpose() * h.entries()).eval() *
                  de_isqrt.asDiagonal();
  overlap.diagonal().setZero();
  overlap = 0.5 * (overlap + overlap.transpose()).eval();
  const vec_t dov = overlap.rowwise().sum();
  const vec_t dov_isqrt = degree_inv_pow(dov, -0.5);
  mat_t l = mat_t::Identity(h.edges(), h.edges()) -
            dov_isqrt.asDiagonal() * overlap * dov_isqrt.asDiagonal();
  l = 0.5 * (l + l.transpose()).eval();
  return EdgeLaplacian{std::move(l), std::move(overlap), dov};
}

mat_t heat_apply(const NodeLaplacian& lv, const EdgeLaplacian& le, const mat_t& x) {
  if (lv.matrix.rows() != x.rows() || le.matrix.rows() != x.cols()) {
    throw std::invalid_argument("heat_apply: state shape does not match the Laplacians");
  }
  return lv.matrix * x + x * le.matrix;
}

}  // namespace hedge
