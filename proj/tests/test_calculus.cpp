#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "windlab/calculus.hpp"
#include "windlab/mc.hpp"

using namespace windlab;
constexpr double tau = 2.0 * std::numbers::pi;

namespace {

DiscreteCalculus flat_calc(int dim, int n) {
  return DiscreteCalculus(TorusDomain(dim, {n, n, n}), MetricField::identity(dim));
}

DiscreteCalculus conformal_calc(int n, const char* phi = "0.5*cos(2*pi*x)") {
  return DiscreteCalculus(TorusDomain(2, {n, n, 1}), MetricField::conformal(parse_expression(phi, 2)));
}

ScalarField sampled(const DiscreteCalculus& calc, const std::function<double(double, double)>& f) {
  ScalarField out(calc.nodes());
  for (int64_t i = 0; i < calc.nodes(); ++i) {
    auto p = calc.domain().node_pos(i);
    out[i] = f(p[0], p[1]);
  }
  return out;
}

}  // namespace

TEST_CASE("volume weights: flat circle and conformal torus") {
  auto c1 = flat_calc(1, 64);
  CHECK(c1.volume_weights().minCoeff() == doctest::Approx(1.0 / 64).epsilon(1e-15));
  CHECK(c1.total_volume() == doctest::Approx(1.0).epsilon(1e-15));

  // total volume of e^{2 phi} I with phi = 0.5 cos(2 pi x) is int e^{cos} = I0(1)
  auto c2 = conformal_calc(32);
  double i0 = oracles::periodic_quadrature([](double x) { return std::exp(std::cos(tau * x)); });
  CHECK(std::abs(i0 - oracles::bessel_I0(1.0)) < 1e-12);  // oracle self-check
  CHECK(c2.total_volume() == doctest::Approx(oracles::bessel_I0(1.0)).epsilon(1e-6));
}

TEST_CASE("metric must be SPD at every node") {
  // g_xx crosses zero: 1 + cos vanishes at x = 1/2
  auto gxx = parse_expression("1 + cos(2*pi*x)", 2);
  auto gyy = parse_expression("1", 2);
  CHECK_THROWS_WITH_AS(DiscreteCalculus(TorusDomain(2, {16, 16, 1}),
                                        MetricField::diagonal({gxx, gyy})),
                       doctest::Contains("positive definite"), Error);
  CHECK_THROWS_AS(MetricField::flat(Mat::Zero(2, 2)), Error);
}

TEST_CASE("differential: constants, smooth fields, loop telescoping") {
  auto calc = flat_calc(2, 16);
  ScalarField c3 = ScalarField::Constant(calc.nodes(), 3.0);
  CHECK(calc.differential(c3).comp.cwiseAbs().maxCoeff() == 0.0);

  // midpoint-centered forward difference of sin(2 pi x) at n = 128
  auto cal = flat_calc(1, 128);
  ScalarField f(cal.nodes());
  for (int64_t i = 0; i < cal.nodes(); ++i) f[i] = std::sin(tau * cal.domain().node_pos(i)[0]);
  OneForm df = cal.differential(f);
  double worst = 0.0;
  for (int64_t i = 0; i < cal.nodes(); ++i) {
    double xm = cal.domain().node_pos(i)[0] + 0.5 / 128;
    worst = std::max(worst, std::abs(df.comp(i, 0) - tau * std::cos(tau * xm)));
  }
  double taylor_bound = std::pow(tau, 3) / 24.0 / (128.0 * 128.0);
  CHECK(worst <= taylor_bound * 1.01);
  CHECK(worst <= 0.002);

  // summing df line integrals around any coordinate loop telescopes to zero
  auto c2d = flat_calc(2, 16);
  ScalarField g = sampled(c2d, [](double x, double y) { return std::sin(tau * x) + x * 0.0 + y; });
  OneForm dg = c2d.differential(g);
  double loop0 = 0.0;
  for (int i = 0; i < 16; ++i) loop0 += dg.comp(c2d.domain().index(i, 3), 0) / 16.0;
  CHECK(std::abs(loop0) < 1e-14);
  CHECK(c2d.plaquette_residual(dg) < 1e-13);
}

TEST_CASE("codifferential: stencil, constants, adjointness") {
  auto calc = flat_calc(2, 16);
  Vec uniform = Vec::Constant(calc.nodes(), 1.0 / double(calc.nodes()));

  // d*_m(df) is the standard (2d+1)-point Laplacian under uniform weights
  GaussianStream rng(7);
  ScalarField f(calc.nodes());
  for (int64_t i = 0; i < calc.nodes(); ++i) f[i] = rng.next();
  ScalarField lap = calc.codifferential(uniform, calc.differential(f));
  const double n2 = 16.0 * 16.0;
  for (int64_t i = 0; i < calc.nodes(); ++i) {
    double expect = 0.0;
    for (int k = 0; k < 2; ++k)
      expect += n2 * (f[calc.up(i, k)] - 2.0 * f[i] + f[calc.dn(i, k)]);
    CHECK(lap[i] == doctest::Approx(expect).epsilon(1e-12));
  }

  // constant coordinate coform has zero divergence
  Vec e1 = Vec::Zero(2);
  e1[0] = 1.0;
  CHECK(calc.codifferential(uniform, calc.constant_form(e1)).cwiseAbs().maxCoeff() < 1e-13);

  // non-positive weights rejected
  Vec bad = uniform;
  bad[3] = -bad[3];
  CHECK_THROWS_AS(calc.codifferential(bad, calc.constant_form(e1)), Error);
}

TEST_CASE("adjointness holds to round-off for arbitrary positive weights") {
  GaussianStream rng(123);
  auto run = [&](const DiscreteCalculus& calc, int trials) {
    double worst = 0.0;
    const int d = calc.dim();
    for (int t = 0; t < trials; ++t) {
      Vec mu(calc.nodes());
      for (int64_t i = 0; i < calc.nodes(); ++i) mu[i] = 0.25 + rng.uniform();
      ScalarField f(calc.nodes());
      OneForm w(calc.nodes(), d);
      for (int64_t i = 0; i < calc.nodes(); ++i) {
        f[i] = rng.next();
        for (int k = 0; k < d; ++k) w.comp(i, k) = rng.next();
      }
      double lhs = calc.integrate(mu, f.cwiseProduct(calc.codifferential(mu, w)));
      double rhs = -calc.inner1(mu, calc.differential(f), w);
      worst = std::max(worst, std::abs(lhs - rhs) / (std::abs(lhs) + std::abs(rhs) + 1.0));
    }
    return worst;
  };
  CHECK(run(flat_calc(1, 64), 25) < 1e-12);
  CHECK(run(conformal_calc(16), 50) < 1e-12);
  // constant metric with cross terms
  Mat gram(2, 2);
  gram << 2.0, 0.6, 0.6, 1.0;
  DiscreteCalculus skew(TorusDomain(2, {16, 16, 1}), MetricField::flat(gram));
  CHECK(run(skew, 25) < 1e-12);
}

TEST_CASE("weighted inner products") {
  auto calc = flat_calc(2, 32);
  Vec uniform = Vec::Constant(calc.nodes(), 1.0 / double(calc.nodes()));
  Vec e1 = Vec::Zero(2), e2 = Vec::Zero(2);
  e1[0] = 1.0;
  e2[1] = 1.0;
  OneForm dx = calc.constant_form(e1);
  CHECK(calc.inner1(uniform, dx, dx) == doctest::Approx(1.0).epsilon(1e-14));

  // ||dx||^2 under the conformal invariant probability is 1/I0(1)
  auto conf = conformal_calc(64);
  Vec m = conf.volume_weights() / conf.total_volume();
  OneForm dxc = conf.constant_form(e1);
  CHECK(conf.inner1(m, dxc, dxc) ==
        doctest::Approx(1.0 / oracles::bessel_I0(1.0)).epsilon(1e-9));

  // Cauchy-Schwarz on random forms
  GaussianStream rng(5);
  for (int t = 0; t < 20; ++t) {
    OneForm a(calc.nodes(), 2), b(calc.nodes(), 2);
    for (int64_t i = 0; i < calc.nodes(); ++i)
      for (int k = 0; k < 2; ++k) {
        a.comp(i, k) = rng.next();
        b.comp(i, k) = rng.next();
      }
    double ab = calc.inner1(uniform, a, b);
    double aa = calc.inner1(uniform, a, a), bb = calc.inner1(uniform, b, b);
    CHECK(ab * ab <= aa * bb * (1.0 + 1e-12));
  }

  // integrate(pointwise_pair) reproduces inner1 exactly
  Mat gram(2, 2);
  gram << 1.5, -0.4, -0.4, 0.8;
  DiscreteCalculus skew(TorusDomain(2, {16, 16, 1}), MetricField::flat(gram));
  GaussianStream rng2(17);
  Vec mu(skew.nodes());
  OneForm a(skew.nodes(), 2), b(skew.nodes(), 2);
  for (int64_t i = 0; i < skew.nodes(); ++i) {
    mu[i] = 0.5 + rng2.uniform();
    for (int k = 0; k < 2; ++k) {
      a.comp(i, k) = rng2.next();
      b.comp(i, k) = rng2.next();
    }
  }
  double direct = skew.inner1(mu, a, b);
  double via_nodes = skew.integrate(mu, skew.pointwise_pair(a, b));
  CHECK(direct == doctest::Approx(via_nodes).epsilon(1e-13));
}

TEST_CASE("kernel of d is exactly the constants (discrete symbol check)") {
  auto calc = flat_calc(1, 64);
  Vec uniform = Vec::Constant(calc.nodes(), 1.0 / 64.0);
  // kernel direction
  CHECK(calc.differential(ScalarField::Ones(64)).comp.cwiseAbs().maxCoeff() == 0.0);
  // every nonzero mode sees the exact stencil symbol, hence is not in the kernel
  for (int k = 1; k <= 32; ++k) {
    ScalarField f(64);
    for (int64_t i = 0; i < 64; ++i) f[i] = std::cos(tau * k * double(i) / 64.0);
    ScalarField lap = calc.codifferential(uniform, calc.differential(f));
    double sym = oracles::laplacian_symbol(k, 64);
    CHECK((lap - sym * f).cwiseAbs().maxCoeff() < 1e-9 * std::abs(sym));
  }
}

TEST_CASE("quadrature of smooth periodic integrands converges spectrally") {
  auto coarse = conformal_calc(8);
  auto mid = conformal_calc(16);
  double ref = oracles::bessel_I0(1.0);
  double e_coarse = std::abs(coarse.total_volume() - ref);
  double e_mid = std::abs(mid.total_volume() - ref);
  CHECK(e_coarse / std::max(e_mid, 1e-16) > 4.0);
}

TEST_CASE("loop classes and exact potentials") {
  auto calc = flat_calc(2, 24);
  GaussianStream rng(31);
  ScalarField f(calc.nodes());
  for (int64_t i = 0; i < calc.nodes(); ++i) f[i] = rng.next();
  Vec cls(2);
  cls << 1.25, -0.5;
  OneForm w = calc.constant_form(cls);
  w.comp += calc.differential(f).comp;

  double dev = 0.0;
  Vec got = calc.loop_class(w, &dev);
  CHECK((got - cls).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(dev < 1e-12);

  OneForm exact = w;
  exact.comp -= calc.constant_form(cls).comp;
  ScalarField v = calc.exact_potential(exact);
  CHECK((calc.differential(v).comp - exact.comp).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("sharp and flat round-trip on constant fields") {
  Mat gram(2, 2);
  gram << 2.0, 0.5, 0.5, 1.25;
  DiscreteCalculus calc(TorusDomain(2, {12, 12, 1}), MetricField::flat(gram));
  Vec c(2);
  c << 0.7, -0.3;
  NodeVectorField v = calc.sharp(calc.constant_form(c));
  Vec expect = gram.inverse() * c;
  for (int k = 0; k < 2; ++k) CHECK(v.comp(0, k) == doctest::Approx(expect[k]).epsilon(1e-13));
  OneForm back = calc.flat(v);
  for (int k = 0; k < 2; ++k) CHECK(back.comp(5, k) == doctest::Approx(c[k]).epsilon(1e-13));
}
