#include "windlab/hodge.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <cmath>

namespace windlab {

ScalarField lifted_apply(const DiscreteCalculus& calc, const NodeVectorField& b, const OneForm& w) {
  return 0.5 * calc.codifferential(calc.volume_weights(), w) + calc.vector_pair(b, w);
}

ScalarField weighted_poisson(const DiscreteCalculus& calc, const Vec& m, const ScalarField& rhs) {
  const int64_t N = calc.nodes();
  // stiffness S = -diag(m) Lap_m, SPD with kernel = constants
  SparseMat S = SparseMat(m.asDiagonal()) * half_laplacian_matrix(calc, m) * (-2.0);
  S.makeCompressed();
  Vec b = m.cwiseProduct(rhs) * (-1.0);  // S f = -diag(m) rhs
  double consistency = std::abs(b.sum());
  if (consistency > 1e-10 * (b.cwiseAbs().sum() + 1e-300))
    throw Error("weighted_poisson: right-hand side not orthogonal to constants");

  Eigen::ConjugateGradient<SparseMat, Eigen::Lower | Eigen::Upper> cg;
  cg.setMaxIterations(10 * N);
  cg.setTolerance(1e-13);
  cg.compute(S);
  ScalarField f = cg.solve(b);
  if (cg.info() != Eigen::Success && cg.error() > 1e-9)
    throw Error("weighted_poisson: conjugate gradient did not converge (error " +
                std::to_string(cg.error()) + ")");
  f.array() -= m.dot(f) / m.sum();
  return f;
}

MHarmonicPart m_harmonic_basis(const DiscreteCalculus& calc, const Vec& m) {
  check_positive_weights(m, "m_harmonic_basis");
  const int d = calc.dim();
  MHarmonicPart out;
  out.residual = 0.0;
  Vec e = Vec::Zero(d);
  for (int i = 0; i < d; ++i) {
    e.setZero();
    e[i] = 1.0;
    OneForm dxi = calc.constant_form(e);
    ScalarField rhs = -calc.codifferential(m, dxi);
    ScalarField fi = weighted_poisson(calc, m, rhs);
    OneForm eta = dxi;
    eta.comp += calc.differential(fi).comp;
    out.residual = std::max(out.residual, calc.codifferential(m, eta).cwiseAbs().maxCoeff());
    out.eta.push_back(std::move(eta));
    out.f.push_back(std::move(fi));
  }
  out.A.resize(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j <= i; ++j) {
      out.A(i, j) = calc.inner1(m, out.eta[size_t(i)], out.eta[size_t(j)]);
      out.A(j, i) = out.A(i, j);
    }
  Eigen::LLT<Mat> llt(out.A);
  if (llt.info() != Eigen::Success) throw Error("m_harmonic_basis: Gram matrix A not SPD");
  if (out.residual > 1e-9)
    throw Error("m_harmonic_basis: d*_m eta residual " + std::to_string(out.residual));
  return out;
}

Vec rotation_number(const DiscreteCalculus& calc, const InvariantMeasure& inv,
                    const std::vector<OneForm>& eta) {
  const int d = calc.dim();
  Vec hbar(d);
  for (int i = 0; i < d; ++i)
    hbar[i] = calc.integrate(inv.m, calc.vector_pair(inv.r, eta[size_t(i)]));
  return hbar;
}

HarmonicBasis build_harmonic_basis(const DiscreteCalculus& calc, const GeneratorMatrix& gen,
                                   const InvariantMeasure& inv) {
  const int d = calc.dim();
  HarmonicBasis basis;
  MHarmonicPart mh = m_harmonic_basis(calc, inv.m);
  basis.eta = std::move(mh.eta);
  basis.f = std::move(mh.f);
  basis.A = std::move(mh.A);
  basis.m_harmonic_residual = mh.residual;
  basis.A_inv = basis.A.inverse();
  basis.hbar = rotation_number(calc, inv, basis.eta);

  basis.l_constancy_residual = 0.0;
  for (int i = 0; i < d; ++i) {
    ScalarField q = calc.vector_pair(inv.r, basis.eta[size_t(i)]);
    q.array() -= basis.hbar[i];
    // -L u = <r, eta_i> - m(<r, eta_i>), mean-zero in m
    double resid = 0.0;
    ScalarField ui = solve_singular(gen.L, (-q).eval(), inv.m, &resid);
    if (resid > 1e-8 * std::max(1.0, q.norm()))
      throw Error("l_harmonic_basis: cell-problem residual " + std::to_string(resid));
    OneForm om = basis.eta[size_t(i)];
    om.comp += calc.differential(ui).comp;
    ScalarField lom = lifted_apply(calc, gen.b, om);
    basis.l_constancy_residual =
        std::max(basis.l_constancy_residual, (lom.array() - basis.hbar[i]).abs().maxCoeff());
    basis.omega.push_back(std::move(om));
    basis.u.push_back(std::move(ui));
  }
  basis.B.resize(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j <= i; ++j) {
      basis.B(i, j) = calc.inner1(inv.m, basis.omega[size_t(i)], basis.omega[size_t(j)]);
      basis.B(j, i) = basis.B(i, j);
    }
  Eigen::LLT<Mat> llt(basis.B);
  if (llt.info() != Eigen::Success) throw Error("build_harmonic_basis: Gram matrix B not SPD");
  basis.B_inv = basis.B.inverse();
  return basis;
}

double q_rate(const Vec& h, const HarmonicBasis& basis) {
  Vec dh = h - basis.hbar;
  return 0.5 * dh.dot(basis.A_inv * dh);
}

namespace {
OneForm combine(const std::vector<OneForm>& forms, const Vec& coeff) {
  OneForm out = forms[0];
  out.comp *= coeff[0];
  for (int i = 1; i < coeff.size(); ++i) out.comp += coeff[i] * forms[size_t(i)].comp;
  return out;
}
}  // namespace

OneForm eta_of_homology(const Vec& h, const HarmonicBasis& basis) {
  return combine(basis.eta, basis.A_inv * h);
}

OneForm omega_of_homology(const Vec& h, const HarmonicBasis& basis) {
  return combine(basis.omega, basis.B_inv * h);
}

ConstantLengthDiagnostic constant_length_diagnostic(const DiscreteCalculus& calc,
                                                    const InvariantMeasure& inv,
                                                    const HarmonicBasis& basis) {
  const int d = calc.dim();
  ConstantLengthDiagnostic diag;
  diag.var_length.resize(d);
  diag.var_pairing.resize(d);
  for (int i = 0; i < d; ++i) {
    ScalarField len = calc.norm2_node(basis.eta[size_t(i)]);
    double mean = calc.integrate(inv.m, len);
    diag.var_length[i] = calc.integrate(inv.m, (len.array() - mean).square().matrix());
    ScalarField pr = calc.vector_pair(inv.r, basis.eta[size_t(i)]);
    double pmean = calc.integrate(inv.m, pr);
    diag.var_pairing[i] = calc.integrate(inv.m, (pr.array() - pmean).square().matrix());
  }
  diag.max_var_length = diag.var_length.maxCoeff();
  diag.max_var_pairing = diag.var_pairing.maxCoeff();
  return diag;
}

ReversibilityFlags classify_reversibility(const DiscreteCalculus& calc, const GeneratorMatrix& gen,
                                          const InvariantMeasure& inv, const HarmonicBasis& basis,
                                          double tol) {
  ReversibilityFlags flags;
  const Vec& m = inv.m;

  // (a) project g r onto the complement of exact forms in L^2(m)
  double gr_norm = std::sqrt(calc.inner1(m, inv.gr_edges, inv.gr_edges));
  ScalarField div = calc.codifferential(m, inv.gr_edges);
  ScalarField pot = weighted_poisson(calc, m, div);
  OneForm nonexact = inv.gr_edges;
  nonexact.comp -= calc.differential(pot).comp;
  flags.nonexact_gr_norm =
      std::sqrt(std::max(0.0, calc.inner1(m, nonexact, nonexact))) / std::max(1.0, gr_norm);
  flags.reversible = flags.nonexact_gr_norm < tol;

  // (b) discrete curl of g b over elementary plaquettes
  OneForm gb = calc.flat(gen.b);
  double loop = calc.plaquette_residual(gb);
  double area = 1.0;
  if (calc.dim() >= 2) area = calc.domain().dx(0) * calc.domain().dx(1);
  flags.gb_curl = calc.dim() >= 2 ? loop / area : 0.0;
  flags.quasi_reversible = flags.gb_curl < tol;

  // (c) m-weighted standard deviation of <r, eta_i>
  ConstantLengthDiagnostic diag = constant_length_diagnostic(calc, inv, basis);
  flags.pairing_std = std::sqrt(diag.max_var_pairing);
  flags.homologically_reversible = flags.pairing_std < tol;

  // (d) rotation number
  flags.hbar_norm = basis.hbar.cwiseAbs().maxCoeff();
  flags.typically_reversible = flags.hbar_norm < tol;
  return flags;
}

}  // namespace windlab
