#pragma once

#include <vector>

#include "windlab/domain.hpp"
#include "windlab/metric.hpp"

namespace windlab {

/// Discrete weighted exterior calculus on the staggered periodic grid.
///
/// Scalar fields live on nodes, 1-form components on the half-step edge
/// midpoints. The differential is the forward difference; every weighted
/// codifferential is the exact negative adjoint of the gradient pairing under
/// the given node measure, so integration by parts holds to round-off for
/// any positive weights. Weighted inner products of 1-forms use node
/// samples of the inverse metric with the adjacent edge products averaged
/// per axis; cross terms (constant metrics only) are node-collocated.
class DiscreteCalculus {
 public:
  DiscreteCalculus(TorusDomain domain, MetricField metric);

  const TorusDomain& domain() const { return dom_; }
  const MetricField& metric() const { return metric_; }
  int dim() const { return dom_.dim(); }
  int64_t nodes() const { return dom_.nodes(); }

  // Quadrature weights for the Riemannian volume (sqrt|g| * cell volume).
  const Vec& volume_weights() const { return vol_w_; }
  double total_volume() const { return vol_w_.sum(); }
  double min_metric_eigenvalue() const { return min_metric_eig_; }

  // Node samples of the inverse metric diagonal and sqrt|g|.
  const Mat& ginv_diag() const { return ginv_diag_; }
  const Vec& sqrt_det() const { return sqrtdet_; }
  // Edge-midpoint samples (arithmetic average of the adjacent nodes).
  Mat edge_ginv() const;
  Mat edge_sqrt_det() const;

  int64_t up(int64_t idx, int k) const { return up_[size_t(k)][size_t(idx)]; }
  int64_t dn(int64_t idx, int k) const { return dn_[size_t(k)][size_t(idx)]; }

  // d: forward difference per axis, kernel exactly the constants.
  OneForm differential(const ScalarField& f) const;

  // d*_mu, defined by mu(f d*_mu w) = -mu(<grad f, w>) for all f.
  ScalarField codifferential(const Vec& weights, const OneForm& w) const;

  double integrate(const Vec& weights, const ScalarField& f) const;
  double inner1(const Vec& weights, const OneForm& a, const OneForm& b) const;
  // Same bilinear pairing with the edge measure divided by the node density
  // rho (edge-averaged); used for current-energy quadratures.
  double inner1_over_density(const Vec& weights, const ScalarField& rho, const OneForm& a,
                             const OneForm& b) const;

  // <g^-1 a, b> as a node field; integrate() of it reproduces inner1 exactly.
  ScalarField pointwise_pair(const OneForm& a, const OneForm& b) const;
  ScalarField norm2_node(const OneForm& a) const { return pointwise_pair(a, a); }

  // Metric-free duality pairing <v, w> of a node vector field and a 1-form.
  ScalarField vector_pair(const NodeVectorField& v, const OneForm& w) const;

  NodeVectorField sharp(const OneForm& w) const;  // g^-1 with edge averaging
  OneForm flat(const NodeVectorField& v) const;   // g at nodes, then edge averaging

  OneForm constant_form(const Vec& c) const;

  // max |loop integral around an elementary plaquette| over all plaquettes
  double plaquette_residual(const OneForm& w) const;
  // per-axis loop integrals of a closed form; deviation across parallel loops
  Vec loop_class(const OneForm& w, double* max_deviation = nullptr) const;
  // potential v with dv = w, for w with zero class and zero plaquette sums;
  // mean-zero, built by path integration (exact for discretely exact forms)
  ScalarField exact_potential(const OneForm& w) const;

  // Per-axis edge weights W_k(x) = avg of mu*ginv_kk over the edge's nodes.
  Mat edge_weights(const Vec& weights) const;

 private:
  TorusDomain dom_;
  MetricField metric_;
  Vec sqrtdet_;
  Mat ginv_diag_;  // nodes x dim
  Vec vol_w_;
  double min_metric_eig_ = 0.0;
  bool has_cross_ = false;
  Mat gram_inv_;  // constant metrics
  std::vector<std::vector<int64_t>> up_, dn_;

  Mat node_average(const OneForm& w) const;  // per-axis edge-to-node average
};

void check_positive_weights(const Vec& w, const char* what);

}  // namespace windlab
