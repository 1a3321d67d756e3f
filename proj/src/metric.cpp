#include "windlab/metric.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace windlab {

MetricField MetricField::flat(const Mat& gram) {
  if (gram.rows() != gram.cols() || gram.rows() < 1 || gram.rows() > 3)
    throw Error("flat metric: gram must be square, d in {1,2,3}");
  if (!gram.isApprox(gram.transpose(), 1e-12)) throw Error("flat metric: gram must be symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(gram);
  if (es.eigenvalues().minCoeff() <= 0.0) throw Error("flat metric: gram must be positive definite");
  MetricField m;
  m.kind_ = Kind::Flat;
  m.dim_ = int(gram.rows());
  m.gram_ = gram;
  m.gram_inv_ = gram.inverse();
  m.sqrt_det_flat_ = std::sqrt(gram.determinant());
  return m;
}

MetricField MetricField::diagonal(std::vector<ExprPtr> gkk) {
  if (gkk.empty() || gkk.size() > 3) throw Error("diag metric: need 1..3 diagonal entries");
  MetricField m;
  m.kind_ = Kind::Diagonal;
  m.dim_ = int(gkk.size());
  m.gkk_ = std::move(gkk);
  return m;
}

MetricField MetricField::conformal(ExprPtr phi) {
  MetricField m;
  m.kind_ = Kind::Conformal;
  m.dim_ = 0;  // any
  m.phi_ = std::move(phi);
  return m;
}

MetricField MetricField::identity(int dim) { return flat(Mat::Identity(dim, dim)); }

double MetricField::g_kk(const std::array<double, 3>& p, int k) const {
  switch (kind_) {
    case Kind::Flat: return gram_(k, k);
    case Kind::Diagonal: return gkk_[size_t(k)]->eval(p);
    case Kind::Conformal: return std::exp(2.0 * phi_->eval(p));
  }
  return 1.0;
}

double MetricField::ginv_kk(const std::array<double, 3>& p, int k) const {
  switch (kind_) {
    case Kind::Flat: return gram_inv_(k, k);
    case Kind::Diagonal: return 1.0 / gkk_[size_t(k)]->eval(p);
    case Kind::Conformal: return std::exp(-2.0 * phi_->eval(p));
  }
  return 1.0;
}

double MetricField::sqrt_det(const std::array<double, 3>& p, int d) const {
  switch (kind_) {
    case Kind::Flat: return sqrt_det_flat_;
    case Kind::Diagonal: {
      double prod = 1.0;
      for (int k = 0; k < d; ++k) prod *= gkk_[size_t(k)]->eval(p);
      return std::sqrt(prod);
    }
    case Kind::Conformal: return std::exp(double(d) * phi_->eval(p));
  }
  return 1.0;
}

const Mat& MetricField::gram() const {
  if (kind_ != Kind::Flat) throw Error("gram(): metric is not constant");
  return gram_;
}

const Mat& MetricField::gram_inv() const {
  if (kind_ != Kind::Flat) throw Error("gram_inv(): metric is not constant");
  return gram_inv_;
}

std::string MetricField::describe() const {
  switch (kind_) {
    case Kind::Flat: return "flat";
    case Kind::Diagonal: return "diag";
    case Kind::Conformal: return "conformal(phi=" + phi_->str() + ")";
  }
  return "?";
}

}  // namespace windlab
