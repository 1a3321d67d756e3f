#pragma once

#include "windlab/hodge.hpp"

namespace windlab {

/// Measure/current pair (mu, j) with mu = rho m and j = mu g^-1 v for an
/// edge 1-form v (the flat of the current velocity). Currents pair with
/// 1-forms through the weighted inner product, j(w) = (v, w)_mu, so the
/// closedness defect is exactly d*_mu v.
struct MeasureCurrentPair {
  ScalarField rho;  // positive, m-mean 1
  OneForm velocity; // v
  double closedness_residual = 0.0;  // sup |d*_mu v|
  Vec rotation;                      // pairings with the harmonic basis
};

// omega_bar_rho = -1/2 d log rho + g r (edges)
OneForm typical_velocity(const DiscreteCalculus& calc, const InvariantMeasure& inv,
                         const ScalarField& rho);

// I(mu, j) = 1/2 || v - omega_bar_rho ||^2_mu
double evaluate_I(const DiscreteCalculus& calc, const InvariantMeasure& inv,
                  const MeasureCurrentPair& pair);

// j(w) = (v, w)_mu
double pair_current(const DiscreteCalculus& calc, const InvariantMeasure& inv,
                    const MeasureCurrentPair& pair, const OneForm& w);

MeasureCurrentPair make_pair(const DiscreteCalculus& calc, const InvariantMeasure& inv,
                             const HarmonicBasis& basis, ScalarField rho, OneForm velocity);

// rho = 1, v = g r + eta^{h - hbar}; the minimizer of I(m, .) at rotation h.
MeasureCurrentPair minimal_gaussian_current(const DiscreteCalculus& calc,
                                            const InvariantMeasure& inv,
                                            const HarmonicBasis& basis, const Vec& h);

struct PerturbationPair {
  MeasureCurrentPair pair;
  ScalarField u;           // adjoint-generator cell solution, m-mean zero
  OneForm omega_h;         // L-harmonic representative of h
  double adjoint_residual = 0.0;   // ||L^dagger u - d*_m omega_h|| relative
  Vec lifted_rotation;     // nu(L omega_i) + eps (omega_h, omega_i)_m
  // closed-form energy (eps^2/2) int |omega_h|^2 / (1 + eps u) dm
  double closed_form_energy = 0.0;
};

// nu = (1 + eps u) m with L^dagger u = d*_m omega^h; velocity
// v = typical_velocity(nu) + eps omega^h / rho (edge-averaged density).
PerturbationPair perturbation_pair(const DiscreteCalculus& calc, const GeneratorMatrix& gen,
                                   const InvariantMeasure& inv, const HarmonicBasis& basis,
                                   const Vec& h, double eps);

// mu-weighted Helmholtz projection onto divergence-free 1-forms; used to
// build random closed currents in tests.
OneForm project_divergence_free(const DiscreteCalculus& calc, const Vec& mu, const OneForm& w);

}  // namespace windlab
