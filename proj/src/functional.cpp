#include "windlab/functional.hpp"

#include <cmath>

namespace windlab {

OneForm typical_velocity(const DiscreteCalculus& calc, const InvariantMeasure& inv,
                         const ScalarField& rho) {
  check_positive_weights(rho, "typical_velocity");
  ScalarField logr = rho.array().log();
  OneForm v = calc.differential(logr);
  v.comp *= -0.5;
  v.comp += inv.gr_edges.comp;
  return v;
}

double evaluate_I(const DiscreteCalculus& calc, const InvariantMeasure& inv,
                  const MeasureCurrentPair& pair) {
  Vec mu = inv.m.cwiseProduct(pair.rho);
  OneForm delta = pair.velocity;
  delta.comp -= typical_velocity(calc, inv, pair.rho).comp;
  return 0.5 * calc.inner1(mu, delta, delta);
}

double pair_current(const DiscreteCalculus& calc, const InvariantMeasure& inv,
                    const MeasureCurrentPair& pair, const OneForm& w) {
  Vec mu = inv.m.cwiseProduct(pair.rho);
  return calc.inner1(mu, pair.velocity, w);
}

MeasureCurrentPair make_pair(const DiscreteCalculus& calc, const InvariantMeasure& inv,
                             const HarmonicBasis& basis, ScalarField rho, OneForm velocity) {
  check_positive_weights(rho, "make_pair");
  MeasureCurrentPair pair;
  double mass = calc.integrate(inv.m, rho);
  pair.rho = rho / mass;
  pair.velocity = std::move(velocity);
  Vec mu = inv.m.cwiseProduct(pair.rho);
  pair.closedness_residual = calc.codifferential(mu, pair.velocity).cwiseAbs().maxCoeff();
  pair.rotation.resize(calc.dim());
  for (int i = 0; i < calc.dim(); ++i)
    pair.rotation[i] = calc.inner1(mu, pair.velocity, basis.eta[size_t(i)]);
  return pair;
}

MeasureCurrentPair minimal_gaussian_current(const DiscreteCalculus& calc,
                                            const InvariantMeasure& inv,
                                            const HarmonicBasis& basis, const Vec& h) {
  OneForm v = inv.gr_edges;
  v.comp += eta_of_homology(h - basis.hbar, basis).comp;
  return make_pair(calc, inv, basis, ScalarField::Ones(calc.nodes()), std::move(v));
}

PerturbationPair perturbation_pair(const DiscreteCalculus& calc, const GeneratorMatrix& gen,
                                   const InvariantMeasure& inv, const HarmonicBasis& basis,
                                   const Vec& h, double eps) {
  const int64_t N = calc.nodes();
  PerturbationPair out;
  out.omega_h = omega_of_homology(h, basis);

  // L^dagger u = d*_m omega^h, i.e. L^T (m u) = m d*_m omega^h
  ScalarField q = calc.codifferential(inv.m, out.omega_h);
  ScalarField rhs = inv.m.cwiseProduct(q);
  SparseMat Lt = SparseMat(gen.L.transpose());
  double resid = 0.0;
  ScalarField y = solve_singular(Lt, rhs, Vec::Ones(N), &resid);
  out.adjoint_residual = resid;
  if (resid > 1e-8 * std::max(1.0, rhs.norm()))
    throw Error("perturbation_pair: adjoint solve residual " + std::to_string(resid));
  out.u = y.cwiseQuotient(inv.m);
  out.u.array() -= inv.m.dot(out.u);  // m-mean zero

  double umax = out.u.cwiseAbs().maxCoeff();
  if (eps * umax >= 1.0)
    throw Error("perturbation_pair: eps too large (eps*max|u| = " + std::to_string(eps * umax) + ")");

  ScalarField rho = (1.0 + eps * out.u.array()).matrix();
  OneForm v = typical_velocity(calc, inv, rho);
  OneForm scaled = out.omega_h;
  for (int k = 0; k < calc.dim(); ++k)
    for (int64_t i = 0; i < N; ++i) {
      double rho_edge = 0.5 * (rho[i] + rho[calc.up(i, k)]);
      scaled.comp(i, k) *= eps / rho_edge;
    }
  v.comp += scaled.comp;

  out.pair = make_pair(calc, inv, basis, rho, std::move(v));

  // paper-style rotation check against the L-harmonic basis
  Vec nu = inv.m.cwiseProduct(out.pair.rho);
  out.lifted_rotation.resize(calc.dim());
  for (int i = 0; i < calc.dim(); ++i) {
    double a = calc.integrate(nu, lifted_apply(calc, gen.b, basis.omega[size_t(i)]));
    double b = calc.inner1(inv.m, out.omega_h, basis.omega[size_t(i)]);
    out.lifted_rotation[i] = a + eps * b;
  }
  out.closed_form_energy =
      0.5 * eps * eps * calc.inner1_over_density(inv.m, out.pair.rho, out.omega_h, out.omega_h);
  return out;
}

OneForm project_divergence_free(const DiscreteCalculus& calc, const Vec& mu, const OneForm& w) {
  ScalarField div = calc.codifferential(mu, w);
  ScalarField pot = weighted_poisson(calc, mu, div);
  OneForm out = w;
  out.comp -= calc.differential(pot).comp;
  return out;
}

}  // namespace windlab
