#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/AutoDiff>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hspace {

template <typename T>
using Vec6 = Eigen::Matrix<T, 6, 1>;

using Point6 = Vec6<double>;

/// Forward-mode derivative carrier: a value plus its six partials.
using Dual6 = Eigen::AutoDiffScalar<Vec6<double>>;

inline double value_of(double v) { return v; }
inline double value_of(long double v) { return static_cast<double>(v); }
inline double value_of(const Dual6& v) { return v.value(); }

/// Seeds x as the independent variables of a dual evaluation.
inline Vec6<Dual6> seed_dual(const Point6& x) {
  Vec6<Dual6> out;
  for (int i = 0; i < 6; ++i) out[i] = Dual6(x[i], 6, i);
  return out;
}

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at byte " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class DomainError : public std::domain_error {
 public:
  DomainError(const std::string& what, std::string subexpression)
      : std::domain_error(what + " in '" + subexpression + "'"), subexpression_(std::move(subexpression)) {}
  const std::string& subexpression() const { return subexpression_; }

 private:
  std::string subexpression_;
};

enum class Func { kSin, kCos, kExp, kLog, kSqrt, kTanh };

struct Node {
  enum class Kind { kConstant, kCoord, kNeg, kAdd, kSub, kMul, kDiv, kPow, kCall };

  Kind kind = Kind::kConstant;
  double constant = 0.0;
  int coord = 0;  // 1..6
  Func func = Func::kSin;
  std::unique_ptr<Node> lhs;
  std::unique_ptr<Node> rhs;
};

std::string render(const Node& node);
bool structurally_equal(const Node& a, const Node& b);

/// A parsed expression over the chart coordinates x1..x6.
class ScalarField {
 public:
  ScalarField();  // the constant 0

  const Node& root() const { return *root_; }
  const std::string& source() const { return source_; }

  /// Bit i-1 is set when xi occurs in the expression.
  std::uint8_t coordinate_mask() const { return mask_; }
  bool references(int coord) const { return (mask_ >> (coord - 1)) & 1u; }

  /// Evaluates over plain doubles or Dual6; the value part is bit-identical.
  template <typename T>
  T evaluate(const Vec6<T>& x) const;

 private:
  friend ScalarField parse(std::string_view source);

  std::shared_ptr<const Node> root_;
  std::string source_;
  std::uint8_t mask_ = 0;
};

ScalarField parse(std::string_view source);
std::string render(const ScalarField& f);

double eval(const ScalarField& f, const Point6& x);
Dual6 eval_dual(const ScalarField& f, const Point6& x);

/// Central-difference gradient, (f(x+h e_i) - f(x-h e_i)) / 2h.
Point6 fd_grad(const ScalarField& f, const Point6& x, double step);

namespace detail {

bool is_integer_constant(const Node& n, long* out);

template <typename T>
T integer_power(const T& base, long exponent) {
  bool invert = exponent < 0;
  unsigned long e = invert ? static_cast<unsigned long>(-exponent) : static_cast<unsigned long>(exponent);
  T result(1.0);
  T b = base;
  while (e != 0) {
    if (e & 1ul) result = result * b;
    e >>= 1;
    if (e != 0) b = b * b;
  }
  if (invert) result = T(1.0) / result;
  return result;
}

template <typename T>
T eval_node(const Node& n, const Vec6<T>& x) {
  using std::cos;
  using std::exp;
  using std::log;
  using std::pow;
  using std::sin;
  using std::sqrt;
  using std::tanh;
  switch (n.kind) {
    case Node::Kind::kConstant:
      return T(n.constant);
    case Node::Kind::kCoord:
      return x[n.coord - 1];
    case Node::Kind::kNeg:
      return -eval_node(*n.lhs, x);
    case Node::Kind::kAdd:
      return eval_node(*n.lhs, x) + eval_node(*n.rhs, x);
    case Node::Kind::kSub:
      return eval_node(*n.lhs, x) - eval_node(*n.rhs, x);
    case Node::Kind::kMul:
      return eval_node(*n.lhs, x) * eval_node(*n.rhs, x);
    case Node::Kind::kDiv: {
      T den = eval_node(*n.rhs, x);
      if (value_of(den) == 0.0) throw DomainError("division by zero", render(n));
      return eval_node(*n.lhs, x) / den;
    }
    case Node::Kind::kPow: {
      T base = eval_node(*n.lhs, x);
      long k = 0;
      if (is_integer_constant(*n.rhs, &k)) {
        if (k < 0 && value_of(base) == 0.0) throw DomainError("zero raised to a negative power", render(n));
        return integer_power(base, k);
      }
      if (!(value_of(base) > 0.0)) throw DomainError("non-positive base with non-integer exponent", render(n));
      if (n.rhs->kind == Node::Kind::kConstant) return pow(base, n.rhs->constant);
      return exp(eval_node(*n.rhs, x) * log(base));
    }
    case Node::Kind::kCall: {
      T arg = eval_node(*n.lhs, x);
      switch (n.func) {
        case Func::kSin:
          return sin(arg);
        case Func::kCos:
          return cos(arg);
        case Func::kExp:
          return exp(arg);
        case Func::kLog:
          if (!(value_of(arg) > 0.0)) throw DomainError("log of non-positive argument", render(n));
          return log(arg);
        case Func::kSqrt:
          if (value_of(arg) < 0.0 || std::isnan(value_of(arg)))
            throw DomainError("sqrt of negative argument", render(n));
          return sqrt(arg);
        case Func::kTanh:
          return tanh(arg);
      }
    }
  }
  throw std::logic_error("corrupt expression node");
}

}  // namespace detail

template <typename T>
T ScalarField::evaluate(const Vec6<T>& x) const {
  return detail::eval_node(*root_, x);
}

}  // namespace hspace
