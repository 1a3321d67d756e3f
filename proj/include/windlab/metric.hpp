#pragma once

#include <optional>
#include <vector>

#include "windlab/domain.hpp"
#include "windlab/expr.hpp"

namespace windlab {

/// Riemannian metric on the torus: either a constant SPD Gram matrix (full
/// cross terms allowed) or a position-dependent diagonal one; conformal
/// metrics e^{2 phi} I are a special case of the latter.
class MetricField {
 public:
  enum class Kind { Flat, Diagonal, Conformal };

  static MetricField flat(const Mat& gram);
  static MetricField diagonal(std::vector<ExprPtr> gkk);
  static MetricField conformal(ExprPtr phi);
  static MetricField identity(int dim);

  Kind kind() const { return kind_; }
  bool constant() const { return kind_ == Kind::Flat; }
  int dim() const { return dim_; }  // 0 = deduced from domain at build time

  // Pointwise samples. p is a point on the torus.
  double g_kk(const std::array<double, 3>& p, int k) const;
  double ginv_kk(const std::array<double, 3>& p, int k) const;
  double sqrt_det(const std::array<double, 3>& p, int d) const;

  const Mat& gram() const;      // Flat only
  const Mat& gram_inv() const;  // Flat only

  std::string describe() const;

 private:
  MetricField() = default;
  Kind kind_ = Kind::Flat;
  int dim_ = 0;
  Mat gram_, gram_inv_;
  double sqrt_det_flat_ = 1.0;
  std::vector<ExprPtr> gkk_;  // Diagonal
  ExprPtr phi_;               // Conformal
};

}  // namespace windlab
