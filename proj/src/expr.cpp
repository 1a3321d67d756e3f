#include "windlab/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

namespace windlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct ConstExpr final : Expr {
  double v;
  explicit ConstExpr(double v) : v(v) {}
  double eval(const std::array<double, 3>&) const override { return v; }
  ExprPtr derivative(int) const override { return std::make_shared<ConstExpr>(0.0); }
  bool constant() const override { return true; }
  std::string str() const override { return std::to_string(v); }
};

// sin or cos of 2*pi*k*x_axis, k integer
struct WaveExpr final : Expr {
  bool is_sin;
  long k;
  int axis;
  WaveExpr(bool is_sin, long k, int axis) : is_sin(is_sin), k(k), axis(axis) {}
  double eval(const std::array<double, 3>& p) const override {
    double ph = kTwoPi * double(k) * p[size_t(axis)];
    return is_sin ? std::sin(ph) : std::cos(ph);
  }
  ExprPtr derivative(int a) const override;
  bool constant() const override { return k == 0; }
  std::string str() const override {
    return std::string(is_sin ? "sin" : "cos") + "(2*pi*" + std::to_string(k) + "*" +
           std::string(1, char('x' + axis)) + ")";
  }
};

struct SumExpr final : Expr {
  std::vector<ExprPtr> terms;
  std::vector<double> signs;
  double eval(const std::array<double, 3>& p) const override {
    double s = 0;
    for (size_t i = 0; i < terms.size(); ++i) s += signs[i] * terms[i]->eval(p);
    return s;
  }
  ExprPtr derivative(int a) const override {
    auto d = std::make_shared<SumExpr>();
    for (size_t i = 0; i < terms.size(); ++i) {
      d->terms.push_back(terms[i]->derivative(a));
      d->signs.push_back(signs[i]);
    }
    return d;
  }
  bool constant() const override {
    for (auto& t : terms)
      if (!t->constant()) return false;
    return true;
  }
  std::string str() const override {
    std::string s;
    for (size_t i = 0; i < terms.size(); ++i) {
      if (i) s += signs[i] > 0 ? " + " : " - ";
      else if (signs[i] < 0) s += "-";
      s += terms[i]->str();
    }
    return s;
  }
};

struct ProductExpr final : Expr {
  std::vector<ExprPtr> factors;
  double eval(const std::array<double, 3>& p) const override {
    double s = 1;
    for (auto& f : factors) s *= f->eval(p);
    return s;
  }
  ExprPtr derivative(int a) const override {
    auto d = std::make_shared<SumExpr>();
    for (size_t i = 0; i < factors.size(); ++i) {
      auto term = std::make_shared<ProductExpr>();
      for (size_t j = 0; j < factors.size(); ++j)
        term->factors.push_back(j == i ? factors[j]->derivative(a) : factors[j]);
      d->terms.push_back(term);
      d->signs.push_back(1.0);
    }
    return d;
  }
  bool constant() const override {
    for (auto& f : factors)
      if (!f->constant()) return false;
    return true;
  }
  std::string str() const override {
    std::string s;
    for (size_t i = 0; i < factors.size(); ++i) {
      if (i) s += "*";
      s += "(" + factors[i]->str() + ")";
    }
    return s;
  }
};

struct ExpExpr final : Expr {
  ExprPtr arg;
  explicit ExpExpr(ExprPtr a) : arg(std::move(a)) {}
  double eval(const std::array<double, 3>& p) const override { return std::exp(arg->eval(p)); }
  ExprPtr derivative(int a) const override {
    auto prod = std::make_shared<ProductExpr>();
    prod->factors.push_back(arg->derivative(a));
    prod->factors.push_back(std::make_shared<ExpExpr>(arg));
    return prod;
  }
  bool constant() const override { return arg->constant(); }
  std::string str() const override { return "exp(" + arg->str() + ")"; }
};

ExprPtr WaveExpr::derivative(int a) const {
  if (a != axis || k == 0) return std::make_shared<ConstExpr>(0.0);
  auto prod = std::make_shared<ProductExpr>();
  double amp = kTwoPi * double(k) * (is_sin ? 1.0 : -1.0);
  prod->factors.push_back(std::make_shared<ConstExpr>(amp));
  prod->factors.push_back(std::make_shared<WaveExpr>(!is_sin, k, axis));
  return prod;
}

class Parser {
 public:
  Parser(const std::string& text, int max_axis) : s_(text), max_axis_(max_axis) {}

  ExprPtr parse() {
    auto e = parse_sum();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  const std::string& s_;
  size_t pos_ = 0;
  int max_axis_;

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, int(pos_) + 1); }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  ExprPtr parse_sum() {
    auto sum = std::make_shared<SumExpr>();
    double sign = 1.0;
    if (eat('-')) sign = -1.0;
    else eat('+');
    sum->terms.push_back(parse_product());
    sum->signs.push_back(sign);
    while (true) {
      if (eat('+')) sign = 1.0;
      else if (eat('-')) sign = -1.0;
      else break;
      sum->terms.push_back(parse_product());
      sum->signs.push_back(sign);
    }
    if (sum->terms.size() == 1 && sum->signs[0] > 0) return sum->terms[0];
    return sum;
  }

  ExprPtr parse_product() {
    auto prod = std::make_shared<ProductExpr>();
    prod->factors.push_back(parse_atom());
    while (true) {
      if (eat('*')) {
        prod->factors.push_back(parse_atom());
      } else if (eat('/')) {
        size_t at = pos_;
        auto divisor = parse_atom();
        if (!divisor->constant()) {
          pos_ = at;
          fail("division only allowed by constant subexpressions");
        }
        double v = divisor->eval({0, 0, 0});
        if (v == 0.0) {
          pos_ = at;
          fail("division by zero");
        }
        prod->factors.push_back(std::make_shared<ConstExpr>(1.0 / v));
      } else {
        break;
      }
    }
    if (prod->factors.size() == 1) return prod->factors[0];
    return prod;
  }

  ExprPtr parse_atom() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      auto e = parse_sum();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (c == '-') {
      ++pos_;
      auto prod = std::make_shared<ProductExpr>();
      prod->factors.push_back(std::make_shared<ConstExpr>(-1.0));
      prod->factors.push_back(parse_atom());
      return prod;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_word();
    fail(std::string("unexpected character '") + c + "'");
  }

  ExprPtr parse_number() {
    size_t start = pos_;
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) {
      pos_ = start;
      fail("malformed number");
    }
    pos_ += size_t(end - begin);
    return std::make_shared<ConstExpr>(v);
  }

  ExprPtr parse_word() {
    size_t start = pos_;
    while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    std::string word = s_.substr(start, pos_ - start);
    if (word == "pi") return std::make_shared<ConstExpr>(std::numbers::pi);
    if (word == "exp") {
      if (!eat('(')) fail("expected '(' after exp");
      auto arg = parse_sum();
      if (!eat(')')) fail("expected ')'");
      return std::make_shared<ExpExpr>(arg);
    }
    if (word == "sin" || word == "cos") {
      bool is_sin = word == "sin";
      if (!eat('(')) fail("expected '(' after " + word);
      auto wave = parse_phase(is_sin);
      if (!eat(')')) fail("expected ')'");
      return wave;
    }
    if (word.size() == 1 && word[0] >= 'x' && word[0] <= 'z') {
      pos_ = start;
      fail("bare coordinates are not periodic; use sin/cos of 2*pi*k*" + word);
    }
    pos_ = start;
    fail("unknown identifier '" + word + "'");
  }

  // Phase of a trig call: product of numeric factors, pi, and exactly one
  // coordinate. The accumulated coefficient must be 2*pi*(integer).
  ExprPtr parse_phase(bool is_sin) {
    size_t phase_start = pos_;
    double coeff = 1.0;
    int axis = -1;
    bool negate = false;
    while (true) {
      skip_ws();
      if (pos_ >= s_.size()) fail("unterminated trig phase");
      char c = s_[pos_];
      if (c == '-') {
        ++pos_;
        negate = !negate;
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        const char* begin = s_.c_str() + pos_;
        char* end = nullptr;
        coeff *= std::strtod(begin, &end);
        pos_ += size_t(end - begin);
      } else if (std::isalpha(static_cast<unsigned char>(c))) {
        size_t ws = pos_;
        while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        std::string word = s_.substr(ws, pos_ - ws);
        if (word == "pi") {
          coeff *= std::numbers::pi;
        } else if (word.size() == 1 && word[0] >= 'x' && word[0] <= 'z') {
          if (axis >= 0) {
            pos_ = ws;
            fail("trig phase must involve a single coordinate");
          }
          axis = word[0] - 'x';
          if (axis >= max_axis_) {
            pos_ = ws;
            fail("coordinate '" + word + "' exceeds domain dimension");
          }
        } else {
          pos_ = ws;
          fail("trig phase admits only numbers, pi and one coordinate");
        }
      } else if (c == '*') {
        ++pos_;
      } else if (c == ')') {
        break;
      } else {
        fail(std::string("unexpected character '") + c + "' in trig phase");
      }
    }
    if (negate) coeff = -coeff;
    if (axis < 0) {
      // constant phase: fold to a constant
      return std::make_shared<ConstExpr>(is_sin ? std::sin(coeff) : std::cos(coeff));
    }
    double k_real = coeff / kTwoPi;
    double k_round = std::round(k_real);
    if (std::abs(k_real - k_round) > 1e-9) {
      pos_ = phase_start;
      fail("trig phase must be 2*pi*(integer)*coordinate");
    }
    return std::make_shared<WaveExpr>(is_sin, long(k_round), axis);
  }
};

}  // namespace

ExprPtr parse_expression(const std::string& text, int max_axis) {
  return Parser(text, max_axis).parse();
}

ExprPtr expr_constant(double v) { return std::make_shared<ConstExpr>(v); }

}  // namespace windlab
