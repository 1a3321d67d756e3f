#include "windlab/calculus.hpp"

#include <cmath>

namespace windlab {

void check_positive_weights(const Vec& w, const char* what) {
  for (int64_t i = 0; i < w.size(); ++i)
    if (!(w[i] > 0.0) || !std::isfinite(w[i]))
      throw Error(std::string(what) + ": non-positive weight at node " + std::to_string(i));
}

DiscreteCalculus::DiscreteCalculus(TorusDomain domain, MetricField metric)
    : dom_(domain), metric_(std::move(metric)) {
  const int d = dom_.dim();
  const int64_t N = dom_.nodes();
  if (metric_.dim() != 0 && metric_.dim() != d)
    throw Error("build_calculus: metric dimension does not match domain");

  up_.assign(size_t(d), std::vector<int64_t>(size_t(N)));
  dn_.assign(size_t(d), std::vector<int64_t>(size_t(N)));
  for (int k = 0; k < d; ++k)
    for (int64_t i = 0; i < N; ++i) {
      up_[size_t(k)][size_t(i)] = dom_.shift(i, k, +1);
      dn_[size_t(k)][size_t(i)] = dom_.shift(i, k, -1);
    }

  sqrtdet_.resize(N);
  ginv_diag_.resize(N, d);
  min_metric_eig_ = std::numeric_limits<double>::infinity();
  if (metric_.constant()) {
    gram_inv_ = metric_.gram_inv();
    Eigen::SelfAdjointEigenSolver<Mat> es(metric_.gram());
    min_metric_eig_ = es.eigenvalues().minCoeff();
    for (int k = 1; k < d && !has_cross_; ++k)
      for (int l = 0; l < k; ++l)
        if (gram_inv_(k, l) != 0.0) has_cross_ = true;
  }
  for (int64_t i = 0; i < N; ++i) {
    auto pos = dom_.node_pos(i);
    std::array<double, 3> p{pos[0], pos[1], pos[2]};
    for (int k = 0; k < d; ++k) {
      double gkk = metric_.g_kk(p, k);
      if (!(gkk > 0.0) || !std::isfinite(gkk))
        throw Error("build_calculus: metric not positive definite at node " + std::to_string(i) +
                    " (axis " + std::to_string(k) + ", g_kk=" + std::to_string(gkk) + ")");
      if (!metric_.constant()) min_metric_eig_ = std::min(min_metric_eig_, gkk);
      ginv_diag_(i, k) = metric_.ginv_kk(p, k);
    }
    sqrtdet_[i] = metric_.sqrt_det(p, d);
  }
  vol_w_ = sqrtdet_ * dom_.cell_volume();
}

Mat DiscreteCalculus::edge_ginv() const {
  const int d = dim();
  const int64_t N = nodes();
  Mat e(N, d);
  for (int k = 0; k < d; ++k)
    for (int64_t i = 0; i < N; ++i)
      e(i, k) = 0.5 * (ginv_diag_(i, k) + ginv_diag_(up(i, k), k));
  return e;
}

Mat DiscreteCalculus::edge_sqrt_det() const {
  const int d = dim();
  const int64_t N = nodes();
  Mat e(N, d);
  for (int k = 0; k < d; ++k)
    for (int64_t i = 0; i < N; ++i) e(i, k) = 0.5 * (sqrtdet_[i] + sqrtdet_[up(i, k)]);
  return e;
}

OneForm DiscreteCalculus::differential(const ScalarField& f) const {
  const int d = dim();
  const int64_t N = nodes();
  OneForm w(N, d);
  for (int k = 0; k < d; ++k) {
    const double nk = double(dom_.n(k));
    for (int64_t i = 0; i < N; ++i) w.comp(i, k) = nk * (f[up(i, k)] - f[i]);
  }
  return w;
}

Mat DiscreteCalculus::edge_weights(const Vec& mu) const {
  const int d = dim();
  const int64_t N = nodes();
  Mat W(N, d);
  for (int k = 0; k < d; ++k)
    for (int64_t i = 0; i < N; ++i)
      W(i, k) = 0.5 * (mu[i] * ginv_diag_(i, k) + mu[up(i, k)] * ginv_diag_(up(i, k), k));
  return W;
}

Mat DiscreteCalculus::node_average(const OneForm& w) const {
  const int d = dim();
  const int64_t N = nodes();
  Mat a(N, d);
  for (int k = 0; k < d; ++k)
    for (int64_t i = 0; i < N; ++i) a(i, k) = 0.5 * (w.comp(i, k) + w.comp(dn(i, k), k));
  return a;
}

ScalarField DiscreteCalculus::codifferential(const Vec& mu, const OneForm& w) const {
  check_positive_weights(mu, "codifferential");
  const int d = dim();
  const int64_t N = nodes();
  Mat Z = edge_weights(mu).cwiseProduct(w.comp);
  if (has_cross_) {
    Mat t = node_average(w);
    for (int k = 0; k < d; ++k) {
      ScalarField s = ScalarField::Zero(N);
      for (int l = 0; l < d; ++l)
        if (l != k) s += gram_inv_(k, l) * t.col(l);
      s = s.cwiseProduct(mu);
      for (int64_t i = 0; i < N; ++i) Z(i, k) += 0.5 * (s[i] + s[up(i, k)]);
    }
  }
  ScalarField out(N);
  for (int64_t i = 0; i < N; ++i) {
    double acc = 0.0;
    for (int k = 0; k < d; ++k) acc += double(dom_.n(k)) * (Z(i, k) - Z(dn(i, k), k));
    out[i] = acc / mu[i];
  }
  return out;
}

double DiscreteCalculus::integrate(const Vec& mu, const ScalarField& f) const {
  return mu.dot(f);
}

double DiscreteCalculus::inner1(const Vec& mu, const OneForm& a, const OneForm& b) const {
  double acc = (edge_weights(mu).cwiseProduct(a.comp).cwiseProduct(b.comp)).sum();
  if (has_cross_) {
    Mat ta = node_average(a), tb = node_average(b);
    const int d = dim();
    for (int k = 0; k < d; ++k)
      for (int l = 0; l < d; ++l)
        if (l != k) acc += gram_inv_(k, l) * (mu.cwiseProduct(ta.col(k)).dot(tb.col(l)));
  }
  return acc;
}

double DiscreteCalculus::inner1_over_density(const Vec& mu, const ScalarField& rho,
                                             const OneForm& a, const OneForm& b) const {
  check_positive_weights(rho, "inner1_over_density");
  Vec scaled = mu.cwiseQuotient(rho);
  return inner1(scaled, a, b);
}

ScalarField DiscreteCalculus::pointwise_pair(const OneForm& a, const OneForm& b) const {
  const int d = dim();
  const int64_t N = nodes();
  ScalarField out = ScalarField::Zero(N);
  for (int k = 0; k < d; ++k)
    for (int64_t i = 0; i < N; ++i) {
      int64_t j = dn(i, k);
      out[i] += ginv_diag_(i, k) * 0.5 * (a.comp(i, k) * b.comp(i, k) + a.comp(j, k) * b.comp(j, k));
    }
  if (has_cross_) {
    Mat ta = node_average(a), tb = node_average(b);
    for (int k = 0; k < d; ++k)
      for (int l = 0; l < d; ++l)
        if (l != k) out += gram_inv_(k, l) * ta.col(k).cwiseProduct(tb.col(l));
  }
  return out;
}

ScalarField DiscreteCalculus::vector_pair(const NodeVectorField& v, const OneForm& w) const {
  const int d = dim();
  const int64_t N = nodes();
  ScalarField out = ScalarField::Zero(N);
  for (int k = 0; k < d; ++k)
    for (int64_t i = 0; i < N; ++i)
      out[i] += v.comp(i, k) * 0.5 * (w.comp(i, k) + w.comp(dn(i, k), k));
  return out;
}

NodeVectorField DiscreteCalculus::sharp(const OneForm& w) const {
  const int d = dim();
  const int64_t N = nodes();
  Mat avg = node_average(w);
  NodeVectorField v(N, d);
  if (metric_.constant()) {
    v.comp = avg * gram_inv_.transpose();
  } else {
    v.comp = avg.cwiseProduct(ginv_diag_);
  }
  return v;
}

OneForm DiscreteCalculus::flat(const NodeVectorField& v) const {
  const int d = dim();
  const int64_t N = nodes();
  Mat gv(N, d);
  if (metric_.constant()) {
    gv = v.comp * metric_.gram().transpose();
  } else {
    for (int k = 0; k < d; ++k)
      gv.col(k) = v.comp.col(k).cwiseQuotient(ginv_diag_.col(k));
  }
  OneForm w(N, d);
  for (int k = 0; k < d; ++k)
    for (int64_t i = 0; i < N; ++i) w.comp(i, k) = 0.5 * (gv(i, k) + gv(up(i, k), k));
  return w;
}

OneForm DiscreteCalculus::constant_form(const Vec& c) const {
  if (c.size() != dim()) throw Error("constant_form: coefficient size mismatch");
  OneForm w(nodes(), dim());
  for (int k = 0; k < dim(); ++k) w.comp.col(k).setConstant(c[k]);
  return w;
}

double DiscreteCalculus::plaquette_residual(const OneForm& w) const {
  const int d = dim();
  const int64_t N = nodes();
  double worst = 0.0;
  for (int k = 0; k < d; ++k)
    for (int l = k + 1; l < d; ++l) {
      const double hk = dom_.dx(k), hl = dom_.dx(l);
      for (int64_t i = 0; i < N; ++i) {
        double loop = w.comp(i, k) * hk + w.comp(up(i, k), l) * hl - w.comp(up(i, l), k) * hk -
                      w.comp(i, l) * hl;
        worst = std::max(worst, std::abs(loop));
      }
    }
  return worst;
}

Vec DiscreteCalculus::loop_class(const OneForm& w, double* max_deviation) const {
  const int d = dim();
  const int64_t N = nodes();
  Vec c(d);
  double dev = 0.0;
  for (int k = 0; k < d; ++k) {
    // loop integral along axis k for every transverse start, then average
    int64_t loops = N / dom_.n(k);
    std::vector<double> vals;
    vals.reserve(size_t(loops));
    std::vector<char> seen(size_t(N), 0);
    const double hk = dom_.dx(k);
    for (int64_t i = 0; i < N; ++i) {
      if (seen[size_t(i)]) continue;
      double acc = 0.0;
      int64_t j = i;
      do {
        seen[size_t(j)] = 1;
        acc += w.comp(j, k) * hk;
        j = up(j, k);
      } while (j != i);
      vals.push_back(acc);
    }
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= double(vals.size());
    for (double v : vals) dev = std::max(dev, std::abs(v - mean));
    c[k] = mean;
  }
  if (max_deviation) *max_deviation = dev;
  return c;
}

ScalarField DiscreteCalculus::exact_potential(const OneForm& w) const {
  const int d = dim();
  ScalarField v = ScalarField::Zero(nodes());
  // integrate along axis 0, then broadcast along the remaining axes
  auto n = [&](int k) { return dom_.n(k); };
  for (int i2 = 0; i2 < (d > 2 ? n(2) : 1); ++i2) {
    for (int i1 = 0; i1 < (d > 1 ? n(1) : 1); ++i1) {
      if (i1 == 0 && i2 > 0) {
        int64_t prev = dom_.index(0, 0, i2 - 1);
        v[dom_.index(0, 0, i2)] = v[prev] + w.comp(prev, 2) * dom_.dx(2);
      } else if (i1 > 0) {
        int64_t prev = dom_.index(0, i1 - 1, i2);
        v[dom_.index(0, i1, i2)] = v[prev] + w.comp(prev, 1) * dom_.dx(1);
      }
      for (int i0 = 1; i0 < n(0); ++i0) {
        int64_t prev = dom_.index(i0 - 1, i1, i2);
        v[dom_.index(i0, i1, i2)] = v[prev] + w.comp(prev, 0) * dom_.dx(0);
      }
    }
  }
  v.array() -= v.mean();
  return v;
}

}  // namespace windlab
