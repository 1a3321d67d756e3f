#include "windlab/drift.hpp"

#include <cmath>

namespace windlab {

DriftField DriftField::constant(const Vec& v) {
  DriftField d;
  d.kind_ = Kind::Constant;
  d.v_ = v;
  return d;
}

DriftField DriftField::stream(const Vec& hbar, ExprPtr psi) {
  if (hbar.size() != 2) throw Error("stream drift: requires d = 2");
  DriftField d;
  d.kind_ = Kind::Stream;
  d.hbar_ = hbar;
  d.psi_ = psi;
  d.dpsi_[0] = psi->derivative(0);
  d.dpsi_[1] = psi->derivative(1);
  return d;
}

DriftField DriftField::gradient(ExprPtr V0) {
  DriftField d;
  d.kind_ = Kind::Gradient;
  d.V0_ = V0;
  for (int k = 0; k < 3; ++k) d.dV0_[k] = V0->derivative(k);
  return d;
}

DriftField DriftField::sharp_closed(const Vec& eta) {
  DriftField d;
  d.kind_ = Kind::SharpClosed;
  d.v_ = eta;
  return d;
}

NodeVectorField DriftField::sample(const DiscreteCalculus& calc) const {
  const auto& dom = calc.domain();
  const int d = dom.dim();
  const int64_t N = dom.nodes();
  NodeVectorField b(N, d);
  switch (kind_) {
    case Kind::Constant: {
      if (v_.size() != d) throw Error("constant drift: dimension mismatch");
      for (int k = 0; k < d; ++k) b.comp.col(k).setConstant(v_[k]);
      break;
    }
    case Kind::Stream: {
      if (d != 2) throw Error("stream drift: requires d = 2");
      ScalarField psi(N);
      for (int64_t i = 0; i < N; ++i) {
        auto pos = dom.node_pos(i);
        psi[i] = psi_->eval({pos[0], pos[1], pos[2]});
      }
      // centered differences commute, so the discrete divergence is exactly 0
      for (int64_t i = 0; i < N; ++i) {
        double dpsidy = 0.5 * dom.n(1) * (psi[calc.up(i, 1)] - psi[calc.dn(i, 1)]);
        double dpsidx = 0.5 * dom.n(0) * (psi[calc.up(i, 0)] - psi[calc.dn(i, 0)]);
        b.comp(i, 0) = hbar_[0] + dpsidy;
        b.comp(i, 1) = hbar_[1] - dpsidx;
      }
      double div = 0.0, scale = 1.0;
      for (int64_t i = 0; i < N; ++i) {
        double acc = 0.0;
        for (int k = 0; k < d; ++k) {
          acc += 0.5 * dom.n(k) * (b.comp(calc.up(i, k), k) - b.comp(calc.dn(i, k), k));
          scale = std::max(scale, std::abs(b.comp(i, k)) * dom.n(k));
        }
        div = std::max(div, std::abs(acc));
      }
      if (div > 1e-10 * scale) throw Error("stream drift: discrete divergence residual too large");
      break;
    }
    case Kind::Gradient: {
      const auto& ginv = calc.ginv_diag();
      for (int64_t i = 0; i < N; ++i) {
        auto pos = dom.node_pos(i);
        std::array<double, 3> p{pos[0], pos[1], pos[2]};
        if (calc.metric().constant()) {
          Vec dv(d);
          for (int k = 0; k < d; ++k) dv[k] = dV0_[k]->eval(p);
          Vec gb = -0.5 * (calc.metric().gram_inv() * dv);
          for (int k = 0; k < d; ++k) b.comp(i, k) = gb[k];
        } else {
          for (int k = 0; k < d; ++k) b.comp(i, k) = -0.5 * ginv(i, k) * dV0_[k]->eval(p);
        }
      }
      break;
    }
    case Kind::SharpClosed: {
      if (v_.size() != d) throw Error("sharp_closed drift: dimension mismatch");
      const auto& ginv = calc.ginv_diag();
      if (calc.metric().constant()) {
        Vec gb = calc.metric().gram_inv() * v_;
        for (int k = 0; k < d; ++k) b.comp.col(k).setConstant(gb[k]);
      } else {
        for (int k = 0; k < d; ++k) b.comp.col(k) = ginv.col(k) * v_[k];
      }
      break;
    }
  }
  return b;
}

Vec DriftField::at_point(const std::array<double, 3>& p, const Mat& gram_inv) const {
  const int d = int(gram_inv.rows());
  Vec b = Vec::Zero(d);
  switch (kind_) {
    case Kind::Constant: b = v_.head(d); break;
    case Kind::Stream:
      b[0] = hbar_[0] + dpsi_[1]->eval(p);
      b[1] = hbar_[1] - dpsi_[0]->eval(p);
      break;
    case Kind::Gradient: {
      Vec dv(d);
      for (int k = 0; k < d; ++k) dv[k] = dV0_[k]->eval(p);
      b = -0.5 * (gram_inv * dv);
      break;
    }
    case Kind::SharpClosed: b = gram_inv * v_.head(d); break;
  }
  return b;
}

std::optional<Vec> DriftField::closed_flat_class(const MetricField& metric, int dim) const {
  switch (kind_) {
    case Kind::SharpClosed: return v_;
    case Kind::Gradient: return Vec::Zero(dim).eval();
    case Kind::Constant:
      if (metric.constant()) return (metric.gram() * v_).eval();
      return std::nullopt;
    case Kind::Stream: return std::nullopt;
  }
  return std::nullopt;
}

std::string DriftField::describe() const {
  switch (kind_) {
    case Kind::Constant: return "constant";
    case Kind::Stream: return "stream(psi=" + psi_->str() + ")";
    case Kind::Gradient: return "gradient(V0=" + V0_->str() + ")";
    case Kind::SharpClosed: return "sharp_closed";
  }
  return "?";
}

}  // namespace windlab
