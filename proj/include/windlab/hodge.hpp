#pragma once

#include "windlab/generator.hpp"

namespace windlab {

/// Harmonic representatives of the coordinate cohomology basis.
/// eta_i = dx^i + d f_i is m-harmonic (closed, d*_m eta_i = 0);
/// omega_i = eta_i + d u_i makes the lifted generator constant on it.
/// A and B are the corresponding Gram matrices in L^2(m), hbar the rotation
/// number m(<r, eta_i>).
struct HarmonicBasis {
  std::vector<OneForm> eta;
  std::vector<ScalarField> f;
  Mat A, A_inv;
  std::vector<OneForm> omega;
  std::vector<ScalarField> u;
  Mat B, B_inv;
  Vec hbar;
  double m_harmonic_residual = 0.0;   // max_i sup |d*_m eta_i|
  double l_constancy_residual = 0.0;  // max_i sup |L omega_i - hbar_i|
};

// Lifted generator on 1-forms: (L w)(x) = 1/2 (d* w)(x) + <b, w>(x), with the
// codifferential taken against the volume weights.
ScalarField lifted_apply(const DiscreteCalculus& calc, const NodeVectorField& b, const OneForm& w);

// Solve the weighted Poisson problem Lap_m f = rhs (rhs must integrate to
// zero against m); conjugate gradients on the symmetric form, mean-zero gauge.
ScalarField weighted_poisson(const DiscreteCalculus& calc, const Vec& m, const ScalarField& rhs);

struct MHarmonicPart {
  std::vector<OneForm> eta;
  std::vector<ScalarField> f;
  Mat A;
  double residual;
};
MHarmonicPart m_harmonic_basis(const DiscreteCalculus& calc, const Vec& m);

HarmonicBasis build_harmonic_basis(const DiscreteCalculus& calc, const GeneratorMatrix& gen,
                                   const InvariantMeasure& inv);

Vec rotation_number(const DiscreteCalculus& calc, const InvariantMeasure& inv,
                    const std::vector<OneForm>& eta);

// Q(h) = 1/2 (h - hbar)^T A^{-1} (h - hbar)
double q_rate(const Vec& h, const HarmonicBasis& basis);

OneForm eta_of_homology(const Vec& h, const HarmonicBasis& basis);
OneForm omega_of_homology(const Vec& h, const HarmonicBasis& basis);

struct ConstantLengthDiagnostic {
  Vec var_length;   // per class: Var_m |eta_i|^2
  Vec var_pairing;  // per class: Var_m <r, eta_i>
  double max_var_length = 0.0;
  double max_var_pairing = 0.0;
};
ConstantLengthDiagnostic constant_length_diagnostic(const DiscreteCalculus& calc,
                                                    const InvariantMeasure& inv,
                                                    const HarmonicBasis& basis);

struct ReversibilityFlags {
  bool reversible = false;
  bool quasi_reversible = false;
  bool homologically_reversible = false;
  bool typically_reversible = false;
  double nonexact_gr_norm = 0.0;  // relative L^2(m) norm of the non-exact part of g r
  double gb_curl = 0.0;           // max plaquette curl of g b
  double pairing_std = 0.0;       // max_i m-weighted std of <r, eta_i>
  double hbar_norm = 0.0;         // sup norm of the rotation number
};
ReversibilityFlags classify_reversibility(const DiscreteCalculus& calc, const GeneratorMatrix& gen,
                                          const InvariantMeasure& inv, const HarmonicBasis& basis,
                                          double tol = 1e-6);

}  // namespace windlab
