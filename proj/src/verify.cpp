#include "windlab/verify.hpp"

#include <cmath>
#include <numbers>

namespace windlab {

namespace {

constexpr double kBesselI0_1 = 1.2660658777520084;  // I_0(1)

Check leq(const std::string& name, double value, double tol, const std::string& note = "") {
  return Check{name, value, tol, value <= tol, note};
}

Check geq(const std::string& name, double value, double threshold, const std::string& note = "") {
  return Check{name, value, threshold, value >= threshold, note};
}

Lab lab_at(const std::string& name, int res_per_axis = 0) {
  Scenario s = builtin_scenario(name);
  if (res_per_axis > 0)
    for (int k = 0; k < s.dim; ++k) s.resolution[size_t(k)] = res_per_axis;
  return build_lab(s);
}

// Deterministic homology samples around hbar, kept inside the tilt trust
// region via the Gaussian warm-start map.
std::vector<Vec> sample_homologies(const Lab& lab, int count, uint64_t seed, double rmax) {
  GaussianStream g(seed);
  const int d = lab.scenario.dim;
  std::vector<Vec> out;
  while (int(out.size()) < count) {
    Vec dir(d);
    for (int k = 0; k < d; ++k) dir[k] = g.next();
    double n = dir.norm();
    if (n < 1e-8) continue;
    dir /= n;
    double radius = 0.1 + (rmax - 0.1) * g.uniform();
    Vec h = lab.basis.hbar + radius * dir;
    Vec c0 = lab.basis.A_inv * (h - lab.basis.hbar);
    if (c0.norm() > 0.5 * lab.scenario.solver.c_max) continue;
    out.push_back(h);
  }
  return out;
}

ScalarField random_smooth_field(const DiscreteCalculus& calc, uint64_t seed, double amplitude) {
  GaussianStream g(seed);
  const auto& dom = calc.domain();
  ScalarField f = ScalarField::Zero(calc.nodes());
  const double tau = 2.0 * std::numbers::pi;
  for (int mode = 0; mode < 4; ++mode) {
    Vec k(dom.dim());
    for (int a = 0; a < dom.dim(); ++a) k[a] = std::floor(3.0 * g.uniform()) + 1.0;
    double amp = amplitude * g.next() / (1.0 + k.squaredNorm());
    double phase = tau * g.uniform();
    for (int64_t i = 0; i < calc.nodes(); ++i) {
      auto p = dom.node_pos(i);
      double arg = phase;
      for (int a = 0; a < dom.dim(); ++a) arg += tau * k[a] * p[a];
      f[i] += amp * std::cos(arg);
    }
  }
  return f;
}

double max_G_minus_Q(const Lab& lab, int n_samples, uint64_t seed, double rmax) {
  auto hs = sample_homologies(lab, n_samples, seed, rmax);
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& h : hs) {
    RateResult rr = lab.scgf->legendre_rate(h, lab.basis);
    worst = std::max(worst, rr.G - q_rate(h, lab.basis));
  }
  return worst;
}

double max_abs_G_minus_Q(const Lab& lab, int n_samples, uint64_t seed, double rmax) {
  auto hs = sample_homologies(lab, n_samples, seed, rmax);
  double worst = 0.0;
  for (const auto& h : hs) {
    RateResult rr = lab.scgf->legendre_rate(h, lab.basis);
    worst = std::max(worst, std::abs(rr.G - q_rate(h, lab.basis)));
  }
  return worst;
}

std::vector<Check> criterion_1(int) {
  Lab lab = lab_at("S1");
  std::vector<Check> out;
  for (double k : {-2.0, -1.0, 1.0, 2.0}) {
    Vec c(1);
    c[0] = k;
    lab.scgf->reset_warm_start();
    double lam = lab.scgf->evaluate(c).lambda;
    double expect = 0.3 * k + 0.5 * k * k;
    out.push_back(leq("c1.lambda_error(k=" + std::to_string(int(k)) + ")",
                      std::abs(lam - expect), 1e-5));
  }
  Vec h0 = Vec::Zero(1);
  RateResult g0 = lab.scgf->legendre_rate(h0, lab.basis);
  out.push_back(leq("c1.G(0)_error", std::abs(g0.G - 0.045), 1e-5));
  RateResult gh = lab.scgf->legendre_rate(lab.basis.hbar, lab.basis);
  out.push_back(leq("c1.G(hbar)", std::abs(gh.G), 1e-8));
  return out;
}

std::vector<Check> criterion_2(int) {
  std::vector<Check> out;
  struct Item { const char* name; int res; double rmax; };
  for (auto [name, res, rmax] : {Item{"S1", 0, 1.5}, Item{"S2", 64, 1.5}, Item{"S3", 64, 1.5},
                                 Item{"S4", 64, 1.5}}) {
    Lab lab = lab_at(name, res);
    double worst = max_G_minus_Q(lab, 20, 0xC2u * 1000 + uint64_t(res), rmax);
    out.push_back(leq(std::string("c2.max(G-Q).") + name, worst, 1e-6));
  }
  return out;
}

std::vector<Check> criterion_3(int) {
  Lab lab = lab_at("S2");  // 128 x 128
  std::vector<Check> out;
  const double b11 = 1.0 + 1.0 / (2.0 * std::numbers::pi * std::numbers::pi);

  Mat target = Mat::Identity(2, 2);
  target(0, 0) = b11;
  Mat H = lab.scgf->hessian0();
  out.push_back(leq("c3.hess_lambda0_error", (H - target).cwiseAbs().maxCoeff(), 1e-2));
  out.push_back(leq("c3.B_error", (lab.basis.B - target).cwiseAbs().maxCoeff(), 1e-4));

  Vec h = Vec::Zero(2);
  h[0] = 1.0;
  double r_mid = 0.0, r_fine = 0.0;
  for (double eps : {0.1, 0.05}) {
    PerturbationPair pp = perturbation_pair(*lab.calc, lab.gen, lab.inv, lab.basis, h, eps);
    double ratio = evaluate_I(*lab.calc, lab.inv, pp.pair) / (eps * eps);
    (eps == 0.1 ? r_mid : r_fine) = ratio;
  }
  double extrap = 2.0 * r_fine - r_mid;
  double limit = 0.5 / b11;
  out.push_back(leq("c3.perturbation_eps_limit_error", std::abs(extrap - limit), 2e-2));
  return out;
}

std::vector<Check> criterion_4(int) {
  std::vector<Check> out;
  {
    Lab flat = lab_at("flat-constant");
    out.push_back(leq("c4.flat_constant.max|G-Q|", max_abs_G_minus_Q(flat, 20, 0xC4, 1.5), 1e-4));
    auto diag = constant_length_diagnostic(*flat.calc, flat.inv, flat.basis);
    out.push_back(leq("c4.flat_constant.var_length", diag.max_var_length, 1e-12));
  }
  {
    Lab s1 = lab_at("S1");
    auto diag = constant_length_diagnostic(*s1.calc, s1.inv, s1.basis);
    out.push_back(leq("c4.S1.var_length", diag.max_var_length, 1e-12));
  }
  {
    Lab s3 = lab_at("S3");  // 128 x 128
    Vec h = Vec::Zero(2);
    h[0] = 2.0;
    double Q = q_rate(h, s3.basis);
    out.push_back(leq("c4.S3.Q((2,0))_error", std::abs(Q - 2.0 * kBesselI0_1), 1e-6));
    RateResult rr = s3.scgf->legendre_rate(h, s3.basis);
    out.push_back(geq("c4.S3.gap((2,0))", Q - rr.G, 1e-7, "10x solver tolerance"));
    auto diag = constant_length_diagnostic(*s3.calc, s3.inv, s3.basis);
    out.push_back(geq("c4.S3.var_length", diag.max_var_length, 0.1));
  }
  return out;
}

std::vector<Check> criterion_5(int) {
  std::vector<Check> out;
  {
    Lab s4 = lab_at("S4");  // 128 x 128
    double worst = 0.0;
    for (const auto& c : s4.scenario.rate.tilts)
      worst = std::max(worst, std::abs(s4.scgf->gc_defect(c, s4.cbar)));
    out.push_back(leq("c5.S4.max_gc_defect", worst, 1e-4));
  }
  {
    Lab s2 = lab_at("S2");
    Vec c = Vec::Zero(2);
    c[0] = 1.0;
    double defect = std::abs(s2.scgf->gc_defect(c, s2.cbar));
    out.push_back(geq("c5.S2.gc_defect(c=(1,0))", defect, 1e-2));
  }
  return out;
}

std::vector<Check> criterion_6(int) {
  std::vector<Check> out;
  struct Item { const char* name; int res; };
  for (auto [name, res] : {Item{"S1", 0}, Item{"S2", 64}, Item{"S3", 64}, Item{"S4", 64}}) {
    Lab lab = lab_at(name, res);
    auto hs = sample_homologies(lab, 10, 0xC6, 1.5);
    double worst = 0.0;
    for (const auto& h : hs) {
      auto pair = minimal_gaussian_current(*lab.calc, lab.inv, lab.basis, h);
      worst = std::max(worst,
                       std::abs(evaluate_I(*lab.calc, lab.inv, pair) - q_rate(h, lab.basis)));
    }
    out.push_back(leq(std::string("c6.|I(min_gauss)-Q|.") + name, worst, 1e-6));

    Vec e1 = Vec::Zero(lab.scenario.dim);
    e1[0] = 1.0;
    const double eps = 0.1;
    PerturbationPair pp = perturbation_pair(*lab.calc, lab.gen, lab.inv, lab.basis, e1, eps);
    double I = evaluate_I(*lab.calc, lab.inv, pp.pair);
    out.push_back(leq(std::string("c6.|I(pert)-closed_form|.") + name,
                      std::abs(I - pp.closed_form_energy), 1e-8));
    RateResult rr = lab.scgf->legendre_rate(lab.basis.hbar + eps * e1, lab.basis);
    out.push_back(leq(std::string("c6.G(hbar+eps h)-I(pert).") + name, rr.G - I, 1e-6));
  }
  return out;
}

std::vector<Check> criterion_7(int threads) {
  std::vector<Check> out;
  const int64_t n_paths = 4000;
  const double T = 200.0, dt = 5e-3;
  const uint64_t seed = 2026;
  const double b11 = 1.0 + 1.0 / (2.0 * std::numbers::pi * std::numbers::pi);

  Scenario sx = builtin_scenario("flat-constant");
  Scenario sy = builtin_scenario("S2");
  Vec x0 = Vec::Zero(2);
  McStatistics X = mc_batch(sx.metric, sx.drift, 2, n_paths, T, dt, seed, x0, 4, threads);
  McStatistics Y = mc_batch(sy.metric, sy.drift, 2, n_paths, T, dt, seed, x0, 4, threads);

  for (int k = 0; k < 2; ++k) {
    double target = k == 0 ? 0.2 : 0.0;
    out.push_back(leq("c7.X.mean_h" + std::to_string(k + 1) + "_sigmas",
                      std::abs(X.mean[k] - target) / X.se_mean[k], 3.0));
    out.push_back(leq("c7.Y.mean_h" + std::to_string(k + 1) + "_sigmas",
                      std::abs(Y.mean[k] - target) / Y.se_mean[k], 3.0));
  }
  out.push_back(leq("c7.X.covT11_sigmas", std::abs(X.cov_T(0, 0) - 1.0) / X.se_cov_T(0, 0), 3.0));
  out.push_back(leq("c7.Y.covT11_sigmas", std::abs(Y.cov_T(0, 0) - b11) / Y.se_cov_T(0, 0), 3.0));
  PairedGap gap = paired_covariance_gap(X, Y, 0);
  out.push_back(geq("c7.gap_significance_sigmas", gap.gap / gap.se, 3.0,
                    "gap " + std::to_string(gap.gap) + " expected " +
                        std::to_string(b11 - 1.0)));
  return out;
}

std::vector<Check> criterion_8(int threads) {
  std::vector<Check> out;

  {  // adjointness on a curved metric with random weights
    Scenario s = builtin_scenario("S3");
    s.resolution = {32, 32, 1};
    DiscreteCalculus calc(s.domain(), s.metric);
    GaussianStream g(0xADu);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      Vec mu(calc.nodes());
      for (int64_t i = 0; i < calc.nodes(); ++i) mu[i] = 0.5 + g.uniform();
      mu /= mu.sum();
      ScalarField f(calc.nodes());
      OneForm w(calc.nodes(), 2);
      for (int64_t i = 0; i < calc.nodes(); ++i) {
        f[i] = g.next();
        w.comp(i, 0) = g.next();
        w.comp(i, 1) = g.next();
      }
      double lhs = calc.integrate(mu, f.cwiseProduct(calc.codifferential(mu, w)));
      double rhs = -calc.inner1(mu, calc.differential(f), w);
      double scale = std::abs(lhs) + std::abs(rhs) + 1.0;
      worst = std::max(worst, std::abs(lhs - rhs) / scale);
    }
    out.push_back(leq("c8.adjointness", worst, 1e-12));
  }

  for (const char* name : {"S2", "S3"}) {  // gauge invariance of the scgf
    Lab lab = lab_at(name, 64);
    Vec c(2);
    c << 0.7, -0.4;
    lab.scgf->reset_warm_start();
    double lam = lab.scgf->evaluate(c).lambda;
    double worst = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
      ScalarField f = random_smooth_field(*lab.calc, 0x6A00 + uint64_t(trial), 0.4);
      OneForm rep = lab.calc->constant_form(c);
      rep.comp += lab.calc->differential(f).comp;
      TiltedOperator op = lab.scgf->assemble_tilted_representative(rep);
      lab.scgf->reset_warm_start();
      double lam2 = lab.scgf->principal_eigenvalue(op);
      worst = std::max(worst, std::abs(lam2 - lam));
    }
    out.push_back(leq(std::string("c8.gauge_invariance.") + name, worst, 1e-8));
  }

  {  // cross-module consistency and residuals
    double worst_grad = 0.0, worst_stat = 0.0, worst_rr = 0.0;
    struct Item { const char* name; int res; };
    for (auto [name, res] : {Item{"S1", 0}, Item{"S2", 64}, Item{"S3", 64}, Item{"S4", 64}}) {
      Lab lab = lab_at(name, res);
      lab.scgf->reset_warm_start();
      Vec grad0 = lab.scgf->evaluate(Vec::Zero(lab.scenario.dim)).grad;
      worst_grad = std::max(worst_grad, (grad0 - lab.basis.hbar).cwiseAbs().maxCoeff());
      worst_stat = std::max(worst_stat, lab.inv.stationarity_residual);
      worst_rr = std::max(worst_rr, lab.inv.rr_residual);
    }
    out.push_back(leq("c8.gradLambda0_vs_hbar", worst_grad, 1e-6));
    out.push_back(leq("c8.stationarity_residual", worst_stat, 1e-8));
    out.push_back(leq("c8.rr_residual", worst_rr, 1e-8));
  }

  {  // thread-count determinism of the sample dumps
    Scenario s = builtin_scenario("S2");
    Vec x0 = Vec::Zero(2);
    McStatistics a = mc_batch(s.metric, s.drift, 2, 64, 5.0, 5e-3, 99, x0, 4, 1);
    McStatistics b = mc_batch(s.metric, s.drift, 2, 64, 5.0, 5e-3, 99, x0, 4, std::max(3, threads));
    bool same = samples_csv(a) == samples_csv(b) && histogram_csv(a) == histogram_csv(b);
    out.push_back(Check{"c8.mc_determinism", same ? 0.0 : 1.0, 0.0, same, "byte-identical CSV"});
  }
  return out;
}

}  // namespace

std::string acceptance_criterion_name(int k) {
  switch (k) {
    case 1: return "analytic Gaussian oracle (S1)";
    case 2: return "quadratic bound G <= Q";
    case 3: return "Hessian identity and small-fluctuation limit (S2)";
    case 4: return "rigidity dichotomy";
    case 5: return "Gallavotti-Cohen symmetry";
    case 6: return "upper-bound oracles";
    case 7: return "Monte Carlo covariance counterexample";
    case 8: return "structural invariants";
  }
  return "?";
}

std::vector<Check> acceptance_criterion(int k, int threads) {
  switch (k) {
    case 1: return criterion_1(threads);
    case 2: return criterion_2(threads);
    case 3: return criterion_3(threads);
    case 4: return criterion_4(threads);
    case 5: return criterion_5(threads);
    case 6: return criterion_6(threads);
    case 7: return criterion_7(threads);
    case 8: return criterion_8(threads);
  }
  throw Error("acceptance_criterion: k must be 1..8");
}

bool all_pass(const std::vector<Check>& checks) {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

std::vector<Check> verify_scenario(const Scenario& scen) {
  std::vector<Check> out;
  Lab lab = build_lab(scen);
  const DiscreteCalculus& calc = *lab.calc;
  const int d = scen.dim;

  {  // adjointness with the invariant measure weights
    GaussianStream g(0x5EEDu);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      ScalarField f(calc.nodes());
      OneForm w(calc.nodes(), d);
      for (int64_t i = 0; i < calc.nodes(); ++i) {
        f[i] = g.next();
        for (int k = 0; k < d; ++k) w.comp(i, k) = g.next();
      }
      double lhs = calc.integrate(lab.inv.m, f.cwiseProduct(calc.codifferential(lab.inv.m, w)));
      double rhs = -calc.inner1(lab.inv.m, calc.differential(f), w);
      worst = std::max(worst, std::abs(lhs - rhs) / (std::abs(lhs) + std::abs(rhs) + 1.0));
    }
    out.push_back(leq("adjointness", worst, 1e-12));
  }

  out.push_back(leq("generator_rowsums",
                    (lab.gen.L * Vec::Ones(calc.nodes())).cwiseAbs().maxCoeff(),
                    1e-12 * std::max(1.0, lab.gen.L.coeffs().abs().maxCoeff())));
  out.push_back(leq("stationarity_residual", lab.inv.stationarity_residual, 1e-8));
  out.push_back(leq("rr_residual", lab.inv.rr_residual, 1e-8));
  out.push_back(leq("m_harmonic_residual", lab.basis.m_harmonic_residual, 1e-9));
  out.push_back(leq("l_constancy_residual", lab.basis.l_constancy_residual, 1e-8));

  {  // B - A is the Gram matrix of the exact parts
    Mat BA = lab.basis.B - lab.basis.A;
    Eigen::SelfAdjointEigenSolver<Mat> es(BA);
    out.push_back(geq("B_minus_A_psd", es.eigenvalues().minCoeff(), -1e-10));
    Mat gram(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        OneForm dui = calc.differential(lab.basis.u[size_t(i)]);
        OneForm duj = calc.differential(lab.basis.u[size_t(j)]);
        gram(i, j) = calc.inner1(lab.inv.m, dui, duj);
      }
    out.push_back(leq("B_minus_A_gram_identity", (BA - gram).cwiseAbs().maxCoeff(), 1e-8));
  }

  {  // homology-cohomology pairing of the harmonic isomorphisms
    GaussianStream g(0xABCDu);
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      Vec h(d), c(d);
      for (int k = 0; k < d; ++k) {
        h[k] = g.next();
        c[k] = g.next();
      }
      OneForm etah = eta_of_homology(h, lab.basis);
      OneForm etac(calc.nodes(), d);
      etac.comp.setZero();
      for (int k = 0; k < d; ++k) etac.comp += c[k] * lab.basis.eta[size_t(k)].comp;
      double got = calc.inner1(lab.inv.m, etah, etac);
      worst = std::max(worst, std::abs(got - h.dot(c)));
    }
    out.push_back(leq("pairing_duality", worst, 1e-10));
  }

  out.push_back(leq("Q(hbar)", std::abs(q_rate(lab.basis.hbar, lab.basis)), 1e-14));

  lab.scgf->reset_warm_start();
  ScgfEvaluation ev0 = lab.scgf->evaluate(Vec::Zero(d));
  out.push_back(leq("Lambda(0)", std::abs(ev0.lambda), 1e-12));
  out.push_back(leq("gradLambda(0)_vs_hbar", (ev0.grad - lab.basis.hbar).cwiseAbs().maxCoeff(),
                    1e-6));

  {  // gauge invariance, one random exact perturbation
    Vec c = Vec::Zero(d);
    c[0] = 0.5;
    lab.scgf->reset_warm_start();
    double lam = lab.scgf->evaluate(c).lambda;
    ScalarField f = random_smooth_field(calc, 0xF00Du, 0.3);
    OneForm rep = calc.constant_form(c);
    rep.comp += calc.differential(f).comp;
    lab.scgf->reset_warm_start();
    double lam2 = lab.scgf->principal_eigenvalue(lab.scgf->assemble_tilted_representative(rep));
    out.push_back(leq("gauge_invariance", std::abs(lam2 - lam), 1e-8));
  }

  RateResult ghbar = lab.scgf->legendre_rate(lab.basis.hbar, lab.basis);
  out.push_back(leq("G(hbar)", std::abs(ghbar.G), 1e-8));
  out.push_back(leq("max(G-Q)_sampled", max_G_minus_Q(lab, 5, 0x77u, 1.2), 1e-6));

  {  // minimal Gaussian current realizes Q
    auto hs = sample_homologies(lab, 3, 0x99u, 1.2);
    double worst = 0.0;
    for (const auto& h : hs) {
      auto pair = minimal_gaussian_current(calc, lab.inv, lab.basis, h);
      worst = std::max(worst, std::abs(evaluate_I(calc, lab.inv, pair) - q_rate(h, lab.basis)));
      worst = std::max(worst, pair.closedness_residual);
    }
    out.push_back(leq("minimal_gaussian_current", worst, 1e-6));
  }

  if (scen.cbar && scen.cbar->size() == d) {
    Vec c = Vec::Zero(d);
    c[0] = 1.0;
    out.push_back(leq("gc_defect", std::abs(lab.scgf->gc_defect(c, *scen.cbar)), 1e-4));
  }
  return out;
}

}  // namespace windlab
