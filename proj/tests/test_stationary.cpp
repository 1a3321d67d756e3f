#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "windlab/mc.hpp"
#include "windlab/scenario.hpp"

using namespace windlab;
constexpr double tau = 2.0 * std::numbers::pi;

TEST_CASE("generator: symmetric half Laplacian for zero drift") {
  DiscreteCalculus calc(TorusDomain(2, {16, 16, 1}), MetricField::identity(2));
  auto gen = assemble_generator(calc, NodeVectorField(calc.nodes(), 2));
  Mat L(gen.L);
  CHECK((L - L.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::SelfAdjointEigenSolver<Mat> es(L);
  CHECK(es.eigenvalues().maxCoeff() < 1e-10);  // negative semidefinite
  // 1/2 of the standard stencil
  int64_t i = calc.domain().index(3, 5);
  CHECK(L(i, calc.up(i, 0)) == doctest::Approx(0.5 * 256.0).epsilon(1e-14));
  CHECK(L(i, i) == doctest::Approx(-2.0 * 256.0).epsilon(1e-14));
}

TEST_CASE("generator: advection against an analytic field on the circle") {
  DiscreteCalculus calc(TorusDomain(1, {256, 1, 1}), MetricField::identity(1));
  NodeVectorField b(calc.nodes(), 1);
  b.comp.setConstant(0.3);
  auto gen = assemble_generator(calc, b);
  ScalarField f(calc.nodes());
  for (int64_t i = 0; i < calc.nodes(); ++i)
    f[i] = std::sin(tau * calc.domain().node_pos(i)[0]);
  ScalarField Lf = gen.L * f;
  // at x = 0 the diffusion term vanishes and the advection gives 0.3 * 2 pi
  CHECK(std::abs(Lf[0] - 0.3 * tau) < 1e-3);
  // constants are annihilated exactly
  CHECK((gen.L * Vec::Ones(calc.nodes())).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("generator: Peclet warning on under-resolved drift") {
  DiscreteCalculus calc(TorusDomain(1, {8, 1, 1}), MetricField::identity(1));
  NodeVectorField b(calc.nodes(), 1);
  b.comp.setConstant(30.0);
  auto gen = assemble_generator(calc, b);
  CHECK(gen.diagnostics.peclet == doctest::Approx(30.0 / 8.0));
  CHECK(gen.diagnostics.peclet_warning);
  CHECK(gen.diagnostics.min_offdiag < 0.0);
}

TEST_CASE("invariant measure: uniform for divergence-free drifts") {
  // S2-style shear: m is exactly uniform, V constant, r = b
  Scenario s = builtin_scenario("S2");
  s.resolution = {32, 32, 1};
  Lab lab = build_lab(s);
  const int64_t N = lab.calc->nodes();
  CHECK((lab.inv.m.array() - 1.0 / double(N)).abs().maxCoeff() < 1e-10 / double(N));
  CHECK((lab.inv.V.array() - lab.inv.V.mean()).abs().maxCoeff() < 1e-9);
  CHECK((lab.inv.r.comp - lab.gen.b.comp).cwiseAbs().maxCoeff() < 1e-7);
  CHECK(lab.inv.stationarity_residual < 1e-10);
}

TEST_CASE("invariant measure: Riemannian volume for b = 0") {
  Scenario s = builtin_scenario("S3");
  s.resolution = {48, 48, 1};
  Lab lab = build_lab(s);
  Vec vol = lab.calc->volume_weights() / lab.calc->total_volume();
  CHECK((lab.inv.m - vol).cwiseAbs().maxCoeff() < 1e-13);
  // rho_vol is constant 1/Vol(M), r = 0
  CHECK((lab.inv.rho_vol.array() * lab.calc->total_volume() - 1.0).abs().maxCoeff() < 1e-10);
  CHECK(lab.inv.r.comp.cwiseAbs().maxCoeff() < 1e-8);
  CHECK(lab.inv.rr_residual < 1e-8);
}

TEST_CASE("stationarity: m(Lf) = 0 for random smooth fields") {
  Scenario s = builtin_scenario("S4");
  s.resolution = {48, 48, 1};
  Lab lab = build_lab(s);
  GaussianStream g(11);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    ScalarField f(lab.calc->nodes());
    for (int64_t i = 0; i < lab.calc->nodes(); ++i) f[i] = g.next();
    worst = std::max(worst, std::abs(lab.inv.m.dot(lab.gen.L * f)) / f.norm());
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("two generator assemblies agree on the built-in scenarios") {
  // 1/2 Lap + <b, df> versus 1/2 Lap_m + <r, df> with the computed measure
  for (const char* name : {"S1", "S2", "S3", "S4"}) {
    Scenario s = builtin_scenario(name);
    for (int k = 0; k < s.dim; ++k) s.resolution[size_t(k)] = s.dim == 1 ? 128 : 48;
    Lab lab = build_lab(s);
    SparseMat Lm = half_laplacian_matrix(*lab.calc, lab.inv.m) +
                   advection_matrix(*lab.calc, lab.inv.r);
    GaussianStream g(19);
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
      ScalarField f(lab.calc->nodes());
      for (int64_t i = 0; i < lab.calc->nodes(); ++i) f[i] = g.next();
      f /= f.norm();
      worst = std::max(worst, ((lab.gen.L - Lm) * f).cwiseAbs().maxCoeff() /
                                  (lab.gen.L * f).cwiseAbs().maxCoeff());
    }
    CHECK_MESSAGE(worst < 1e-8, name);
  }
}

TEST_CASE("e:rr-style residual stays below 1e-8 at n >= 128 per axis") {
  for (const char* name : {"S1", "S2", "S3", "S4"}) {
    Lab lab = build_lab(builtin_scenario(name));  // default resolutions >= 128
    CHECK_MESSAGE(lab.inv.rr_residual < 1e-8, name);
  }
}

TEST_CASE("invariant measure failure modes") {
  // strong under-resolved drift drives the adjoint null vector negative
  DiscreteCalculus calc(TorusDomain(1, {8, 1, 1}), MetricField::identity(1));
  NodeVectorField b(calc.nodes(), 1);
  for (int64_t i = 0; i < calc.nodes(); ++i)
    b.comp(i, 0) = 60.0 * std::sin(tau * calc.domain().node_pos(i)[0]);
  auto gen = assemble_generator(calc, b);
  CHECK(gen.diagnostics.peclet_warning);
  CHECK_THROWS_AS(invariant_measure(calc, gen), Error);
}

TEST_CASE("drift constructors") {
  DiscreteCalculus calc(TorusDomain(2, {24, 24, 1}), MetricField::identity(2));

  // stream: discrete divergence vanishes identically
  Vec hbar(2);
  hbar << 0.1, -0.2;
  auto psi = parse_expression("0.3*sin(2*pi*x)*cos(2*pi*2*y)", 2);
  DriftField stream = DriftField::stream(hbar, psi);
  NodeVectorField bs = stream.sample(calc);  // would throw on nonzero divergence
  double div_worst = 0.0;
  for (int64_t i = 0; i < calc.nodes(); ++i) {
    double acc = 0.0;
    for (int k = 0; k < 2; ++k)
      acc += 0.5 * 24.0 * (bs.comp(calc.up(i, k), k) - bs.comp(calc.dn(i, k), k));
    div_worst = std::max(div_worst, std::abs(acc));
  }
  CHECK(div_worst < 1e-10);

  // gradient drift of V0 on the flat torus: b = -1/2 grad V0, analytic samples
  auto V0 = parse_expression("0.5*cos(2*pi*x)", 2);
  DriftField grad = DriftField::gradient(V0);
  NodeVectorField bg = grad.sample(calc);
  for (int64_t i : {int64_t(0), calc.domain().index(7, 3)}) {
    double x = calc.domain().node_pos(i)[0];
    CHECK(bg.comp(i, 0) == doctest::Approx(0.5 * 0.5 * tau * std::sin(tau * x)).epsilon(1e-12));
    CHECK(bg.comp(i, 1) == 0.0);
  }

  // sharp_closed on a conformal metric: b = e^{-2 phi} eta
  DiscreteCalculus conf(TorusDomain(2, {24, 24, 1}),
                        MetricField::conformal(parse_expression("0.5*cos(2*pi*x)", 2)));
  Vec eta(2);
  eta << 0.4, 0.0;
  NodeVectorField bc = DriftField::sharp_closed(eta).sample(conf);
  for (int64_t i : {int64_t(3), conf.domain().index(11, 9)}) {
    double x = conf.domain().node_pos(i)[0];
    CHECK(bc.comp(i, 0) ==
          doctest::Approx(0.4 * std::exp(-std::cos(tau * x))).epsilon(1e-12));
  }

  // closed classes from the drift specs
  CHECK((*DriftField::sharp_closed(eta).closed_flat_class(conf.metric(), 2) - eta).norm() == 0.0);
  CHECK(!stream.closed_flat_class(calc.metric(), 2).has_value());
}

TEST_CASE("reversibility flags on the built-ins") {
  {
    Lab lab = build_lab(builtin_scenario("S1"));
    auto flags = classify_reversibility(*lab.calc, lab.gen, lab.inv, lab.basis, 1e-6);
    CHECK(!flags.reversible);
    CHECK(flags.quasi_reversible);          // every 1-form on T^1 is closed
    CHECK(flags.homologically_reversible);  // <r, dtheta> = 0.3 constant
    CHECK(!flags.typically_reversible);     // hbar = 0.3
  }
  {
    Scenario s = builtin_scenario("S2");
    s.resolution = {48, 48, 1};
    Lab lab = build_lab(s);
    auto flags = classify_reversibility(*lab.calc, lab.gen, lab.inv, lab.basis, 1e-6);
    CHECK(!flags.quasi_reversible);  // curl of (0.2 + sin 2 pi y) dx
    CHECK(!flags.homologically_reversible);
    CHECK(flags.pairing_std == doctest::Approx(std::sqrt(0.5)).epsilon(1e-3));
    CHECK(!flags.typically_reversible);
  }
  {
    Scenario s = builtin_scenario("S3");
    s.resolution = {48, 48, 1};
    Lab lab = build_lab(s);
    auto flags = classify_reversibility(*lab.calc, lab.gen, lab.inv, lab.basis, 1e-6);
    CHECK(flags.reversible);
    CHECK(flags.quasi_reversible);
    CHECK(flags.homologically_reversible);
    CHECK(flags.typically_reversible);
  }
}
