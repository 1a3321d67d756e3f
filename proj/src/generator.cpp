#include "windlab/generator.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <vector>

namespace windlab {

SparseMat forward_difference_matrix(const DiscreteCalculus& calc, int axis) {
  const int64_t N = calc.nodes();
  const double nk = double(calc.domain().n(axis));
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(size_t(2 * N));
  for (int64_t i = 0; i < N; ++i) {
    t.emplace_back(i, i, -nk);
    t.emplace_back(i, calc.up(i, axis), nk);
  }
  SparseMat D(N, N);
  D.setFromTriplets(t.begin(), t.end());
  return D;
}

SparseMat edge_to_node_average(const DiscreteCalculus& calc, int axis) {
  const int64_t N = calc.nodes();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(size_t(2 * N));
  for (int64_t i = 0; i < N; ++i) {
    t.emplace_back(i, i, 0.5);
    t.emplace_back(i, calc.dn(i, axis), 0.5);
  }
  SparseMat A(N, N);
  A.setFromTriplets(t.begin(), t.end());
  return A;
}

SparseMat advection_matrix(const DiscreteCalculus& calc, const NodeVectorField& v) {
  const int64_t N = calc.nodes();
  SparseMat adv(N, N);
  for (int k = 0; k < calc.dim(); ++k) {
    SparseMat centered = edge_to_node_average(calc, k) * forward_difference_matrix(calc, k);
    adv += SparseMat(v.comp.col(k).asDiagonal()) * centered;
  }
  return adv;
}

SparseMat half_laplacian_matrix(const DiscreteCalculus& calc, const Vec& mu) {
  check_positive_weights(mu, "half_laplacian_matrix");
  const int64_t N = calc.nodes();
  const int d = calc.dim();
  Mat W = calc.edge_weights(mu);
  SparseMat S(N, N);
  for (int k = 0; k < d; ++k) {
    SparseMat Dk = forward_difference_matrix(calc, k);
    S += Dk.transpose() * SparseMat(W.col(k).asDiagonal()) * Dk;
  }
  if (calc.metric().constant() && d > 1) {
    const Mat& Gi = calc.metric().gram_inv();
    for (int k = 0; k < d; ++k)
      for (int l = 0; l < d; ++l) {
        if (l == k || Gi(k, l) == 0.0) continue;
        SparseMat Ck = edge_to_node_average(calc, k) * forward_difference_matrix(calc, k);
        SparseMat Cl = edge_to_node_average(calc, l) * forward_difference_matrix(calc, l);
        S += Gi(k, l) * (Ck.transpose() * SparseMat(mu.asDiagonal()) * Cl);
      }
  }
  Vec inv_mu = mu.cwiseInverse();
  return SparseMat(inv_mu.asDiagonal()) * S * (-0.5);
}

GeneratorMatrix assemble_generator(const DiscreteCalculus& calc, const NodeVectorField& b) {
  GeneratorMatrix gen;
  gen.b = b;
  gen.L = half_laplacian_matrix(calc, calc.volume_weights()) + advection_matrix(calc, b);
  gen.L.makeCompressed();

  // pin the row sums to exact zero (they cancel analytically; the sparse
  // product leaves eps * ||row|| dust that the spectral checks would see)
  Vec rs = gen.L * Vec::Ones(calc.nodes());
  for (int64_t i = 0; i < calc.nodes(); ++i) gen.L.coeffRef(i, i) -= rs[i];

  double peclet = 0.0;
  for (int k = 0; k < calc.dim(); ++k)
    peclet = std::max(peclet, b.comp.col(k).cwiseAbs().maxCoeff() * calc.domain().dx(k));
  gen.diagnostics.peclet = peclet;
  gen.diagnostics.peclet_warning = peclet > 2.0;

  double min_off = 0.0;
  for (int c = 0; c < gen.L.outerSize(); ++c)
    for (SparseMat::InnerIterator it(gen.L, c); it; ++it)
      if (it.row() != it.col()) min_off = std::min(min_off, it.value());
  gen.diagnostics.min_offdiag = min_off;
  return gen;
}

namespace {

// Replace one row of A by the weight row (deflation); solve; refine.
Vec deflated_solve(const SparseMat& A, int64_t pin_row, const Vec& row_weights, double rhs_value,
                   bool* used_dense = nullptr) {
  const int64_t N = A.rows();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(size_t(A.nonZeros() + N));
  for (int c = 0; c < A.outerSize(); ++c)
    for (SparseMat::InnerIterator it(A, c); it; ++it)
      if (it.row() != pin_row) t.emplace_back(it.row(), it.col(), it.value());
  for (int64_t j = 0; j < N; ++j)
    if (row_weights[j] != 0.0) t.emplace_back(pin_row, j, row_weights[j]);
  SparseMat M(N, N);
  M.setFromTriplets(t.begin(), t.end());
  M.makeCompressed();

  Vec rhs = Vec::Zero(N);
  rhs[pin_row] = rhs_value;

  Eigen::SparseLU<SparseMat> lu(M);
  if (lu.info() != Eigen::Success) {
    if (N <= 4096) {
      if (used_dense) *used_dense = true;
      Mat Md(M);
      Eigen::PartialPivLU<Mat> dlu(Md);
      Vec x = dlu.solve(rhs);
      Vec res = rhs - Md * x;
      x += dlu.solve(res);
      return x;
    }
    throw Error("deflated_solve: sparse factorization failed");
  }
  Vec x = lu.solve(rhs);
  for (int pass = 0; pass < 2; ++pass) {
    Vec res = rhs - M * x;
    x += lu.solve(res);
  }
  return x;
}

}  // namespace

ScalarField solve_singular(const SparseMat& A, const ScalarField& rhs, const Vec& mean_weights,
                           double* residual) {
  const int64_t N = A.rows();
  std::vector<Eigen::Triplet<double>> t;
  for (int c = 0; c < A.outerSize(); ++c)
    for (SparseMat::InnerIterator it(A, c); it; ++it)
      if (it.row() != 0) t.emplace_back(it.row(), it.col(), it.value());
  t.emplace_back(0, 0, 1.0);
  SparseMat M(N, N);
  M.setFromTriplets(t.begin(), t.end());
  M.makeCompressed();
  Vec b = rhs;
  b[0] = 0.0;

  Eigen::SparseLU<SparseMat> lu(M);
  if (lu.info() != Eigen::Success) throw Error("solve_singular: factorization failed");
  Vec x = lu.solve(b);
  for (int pass = 0; pass < 2; ++pass) {
    Vec res = b - M * x;
    x += lu.solve(res);
  }
  double wsum = mean_weights.sum();
  x.array() -= mean_weights.dot(x) / wsum;
  if (residual) *residual = (A * x - rhs).norm();
  return x;
}

InvariantMeasure invariant_measure(const DiscreteCalculus& calc, const GeneratorMatrix& gen,
                                   bool check_simple) {
  const int64_t N = calc.nodes();
  SparseMat Lt = SparseMat(gen.L.transpose());
  Vec ones = Vec::Ones(N);

  Vec m = deflated_solve(Lt, 0, ones, 1.0);
  double mnorm = m.norm();
  double resid = (Lt * m).norm() / mnorm;
  if (resid > 1e-10)
    throw Error("invariant_measure: stationarity residual " + std::to_string(resid) +
                " exceeds 1e-10");

  double mmax = m.maxCoeff();
  double mmin = m.minCoeff();
  if (mmin < -1e-12 * mmax || mmin <= 0.0)
    throw Error("invariant_measure: non-positive stationary density (min " +
                std::to_string(mmin) + ") — increase resolution");

  if (check_simple && N >= 2) {
    Vec m2 = deflated_solve(Lt, N / 2, ones, 1.0);
    if ((m - m2).cwiseAbs().maxCoeff() > 1e-6 * mmax)
      throw Error("invariant_measure: stationary null space is not simple");
  }

  m /= m.sum();

  InvariantMeasure inv;
  inv.m = m;
  inv.stationarity_residual = (Lt * m).norm() / m.norm();
  inv.rho_vol = m.cwiseQuotient(calc.volume_weights());
  inv.V = -inv.rho_vol.array().log();

  OneForm dV = calc.differential(inv.V);
  NodeVectorField gradV = calc.sharp(dV);
  inv.r = gen.b;
  inv.r.comp += 0.5 * gradV.comp;
  inv.gr_edges = calc.flat(inv.r);
  inv.rr_residual = calc.codifferential(m, inv.gr_edges).cwiseAbs().maxCoeff();
  return inv;
}

}  // namespace windlab
