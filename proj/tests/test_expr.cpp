#include <doctest.h>

#include <cmath>
#include <numbers>

#include "windlab/expr.hpp"

using namespace windlab;
constexpr double tau = 2.0 * std::numbers::pi;

TEST_CASE("expression parsing and evaluation") {
  auto e = parse_expression("0.5*cos(2*pi*x)");
  CHECK(eval_at(e, 0.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(eval_at(e, 0.25) == doctest::Approx(0.0).epsilon(1e-14));

  auto s = parse_expression("1 + 2*sin(2*pi*3*y) - exp(0.1*cos(2*pi*x))");
  double x = 0.3, y = 0.7;
  double expect = 1 + 2 * std::sin(tau * 3 * y) - std::exp(0.1 * std::cos(tau * x));
  CHECK(eval_at(s, x, y) == doctest::Approx(expect).epsilon(1e-14));

  // division by constants folds into the product
  auto d = parse_expression("-cos(2*pi*y)/(2*pi)");
  CHECK(eval_at(d, 0.0, 0.0) == doctest::Approx(-1.0 / tau).epsilon(1e-14));
}

TEST_CASE("expression derivatives are exact") {
  auto e = parse_expression("exp(0.5*cos(2*pi*x))*sin(2*pi*2*y)");
  auto dx = e->derivative(0);
  auto dy = e->derivative(1);
  for (double x : {0.1, 0.37}) {
    for (double y : {0.22, 0.81}) {
      double fx = std::exp(0.5 * std::cos(tau * x));
      double expect_dx = fx * (-0.5 * tau * std::sin(tau * x)) * std::sin(tau * 2 * y);
      double expect_dy = fx * tau * 2 * std::cos(tau * 2 * y);
      CHECK(eval_at(dx, x, y) == doctest::Approx(expect_dx).epsilon(1e-12));
      CHECK(eval_at(dy, x, y) == doctest::Approx(expect_dy).epsilon(1e-12));
    }
  }
}

TEST_CASE("expression grammar rejects non-periodic input") {
  CHECK_THROWS_AS(parse_expression("x"), ParseError);
  CHECK_THROWS_AS(parse_expression("sin(3*x)"), ParseError);     // not 2*pi*integer
  CHECK_THROWS_AS(parse_expression("sin(2*pi*x*y)"), ParseError);
  CHECK_THROWS_AS(parse_expression("1/sin(2*pi*x)"), ParseError);  // non-constant divisor
  CHECK_THROWS_AS(parse_expression("foo(2)"), ParseError);
  CHECK_THROWS_AS(parse_expression("sin(2*pi*z)", 2), ParseError);  // beyond domain dim
  // error carries a column
  try {
    parse_expression("1 + bar");
  } catch (const ParseError& e) {
    CHECK(e.column >= 5);
  }
}
