#pragma once

#include <array>
#include <memory>
#include <string>

#include "windlab/domain.hpp"

namespace windlab {

/// Closed expression set for config files: constants, pi, sums, products,
/// exp(..), and sin/cos whose phase is 2*pi*(integer)*coordinate with
/// coordinate in {x,y,z}. Division is accepted only by constant
/// subexpressions. Everything in the set is smooth and 1-periodic per axis,
/// and the set is closed under partial derivatives.
class Expr {
 public:
  virtual ~Expr() = default;
  virtual double eval(const std::array<double, 3>& p) const = 0;
  virtual std::shared_ptr<Expr> derivative(int axis) const = 0;
  virtual bool constant() const = 0;
  virtual std::string str() const = 0;
};

using ExprPtr = std::shared_ptr<Expr>;

struct ParseError : Error {
  ParseError(const std::string& msg, int column)
      : Error("expression parse error at column " + std::to_string(column) + ": " + msg),
        column(column) {}
  int column;
};

ExprPtr parse_expression(const std::string& text, int max_axis = 3);
ExprPtr expr_constant(double v);

inline double eval_at(const ExprPtr& e, double x, double y = 0.0, double z = 0.0) {
  return e->eval({x, y, z});
}

}  // namespace windlab
