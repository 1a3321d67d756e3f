#pragma once

#include "windlab/hodge.hpp"

namespace windlab {

/// Tilted operator for the homology cumulant generating function:
/// A_w = L + advection by g^-1 w + diag(L w + 1/2 |w|^2) assembled at the
/// constant-coform representative w = sum c_k dx^k. A general closed
/// representative w = c.dx + dv yields the exactly conjugated matrix
/// D(e^-v) A_{c.dx} D(e^v), so the spectrum depends on the class only.
struct TiltedOperator {
  SparseMat A;
  Vec c;             // class in the dx basis
  ScalarField gauge; // v; empty when the representative is c.dx itself
  std::string rep_tag = "dx-basis";
};

struct ScgfEvaluation {
  Vec c;
  double lambda = 0.0;
  ScalarField phi_right;  // positive, max-normalized
  ScalarField phi_left;
  Vec grad;               // Hellmann-Feynman gradient of Lambda at c
  double residual = 0.0;
  int iterations = 0;
};

struct RateResult {
  Vec h;
  double G = 0.0;
  Vec c_star;
  int iterations = 0;
  bool hessian_spd = false;
};

struct SpectralOptions {
  double eig_tol = 1e-10;       // ||A phi - lambda phi|| <= tol * ||phi|| * max(1,|lambda|)
  double newton_tol = 1e-8;     // ||h - grad Lambda||_inf
  double c_max = 20.0;          // tilt trust region
  double fd_step = 1e-3;        // Hessian finite differences
  int newton_max_iter = 100;
  int matvec_budget_factor = 50;  // budget 50*sqrt(N)
};

class ScgfSolver {
 public:
  ScgfSolver(const DiscreteCalculus& calc, const GeneratorMatrix& gen,
             SpectralOptions opts = {});

  const SpectralOptions& options() const { return opts_; }
  SpectralOptions& options() { return opts_; }

  TiltedOperator assemble_tilted(const Vec& c) const;
  // Decomposes a closed representative into class + exact part and conjugates.
  TiltedOperator assemble_tilted_representative(const OneForm& rep) const;

  ScgfEvaluation evaluate(const Vec& c) const;         // warm-started internally
  double principal_eigenvalue(const TiltedOperator& op) const;
  ScgfEvaluation principal_eigen(const TiltedOperator& op) const;

  Mat hessian(const Vec& c) const;  // central differences of the gradient
  Mat hessian0() const { return hessian(Vec::Zero(calc_.dim())); }
  double last_hessian_asymmetry() const { return last_hessian_asym_; }

  RateResult legendre_rate(const Vec& h, const HarmonicBasis& basis) const;

  // Lambda(c) - Lambda(-c - 2 cbar)
  double gc_defect(const Vec& c, const Vec& cbar) const;

  void reset_warm_start() const;

 private:
  const DiscreteCalculus& calc_;
  const GeneratorMatrix& gen_;
  SpectralOptions opts_;
  std::vector<SparseMat> adv_axis_;       // advection by g^-1 e_k
  std::vector<ScalarField> pot_lin_;      // lifted generator of dx^k
  mutable ScalarField warm_right_, warm_left_;
  mutable bool have_warm_ = false;
  mutable double last_hessian_asym_ = 0.0;

  ScalarField potential(const Vec& c) const;
  ScalarField potential_derivative(const Vec& c, int i) const;
  ScgfEvaluation eigensolve(const SparseMat& A, const Vec& c, bool want_left) const;
};

}  // namespace windlab
