#pragma once

#include <optional>

#include "windlab/calculus.hpp"
#include "windlab/expr.hpp"

namespace windlab {

/// Tangent drift field b. Four constructor variants:
///   constant(v)            b = v
///   stream(hbar, psi)      d=2, b = hbar + (d_y psi, -d_x psi)
///   gradient(V0)           b = -1/2 grad V0 (reversible Langevin form)
///   sharp_closed(eta)      b = g^-1 eta for a constant-coefficient eta
///
/// Grid samples of the stream variant use centered differences of the
/// node-sampled stream function, which makes the discrete flat divergence
/// vanish identically; pointwise evaluation (used by the path simulator)
/// uses the analytic curl.
class DriftField {
 public:
  enum class Kind { Constant, Stream, Gradient, SharpClosed };

  static DriftField constant(const Vec& v);
  static DriftField stream(const Vec& hbar, ExprPtr psi);
  static DriftField gradient(ExprPtr V0);
  static DriftField sharp_closed(const Vec& eta);

  Kind kind() const { return kind_; }

  NodeVectorField sample(const DiscreteCalculus& calc) const;

  // Pointwise drift for the SDE integrator; constant metrics only.
  Vec at_point(const std::array<double, 3>& p, const Mat& gram_inv) const;

  // Cohomology class of the 1-form g b when it is closed by construction:
  // sharp_closed -> eta, gradient -> 0, constant on a flat metric -> G v.
  std::optional<Vec> closed_flat_class(const MetricField& metric, int dim) const;

  std::string describe() const;

 private:
  Kind kind_ = Kind::Constant;
  Vec v_;        // Constant / SharpClosed coefficients
  Vec hbar_;     // Stream
  ExprPtr psi_;  // Stream
  ExprPtr dpsi_[2] = {nullptr, nullptr};
  ExprPtr V0_;   // Gradient
  ExprPtr dV0_[3] = {nullptr, nullptr, nullptr};
};

}  // namespace windlab
