#pragma once

// Closed-form smooth functions of finitely many named variables.
//
// An Expr is an immutable, shared AST. All builders go through the
// simplifying constructors below (constant folding, 0/1 identities,
// flattening of sums and products), so two routes that produce the same
// function in the same canonical shape compare structurally equal.

#include <cmath>
#include <initializer_list>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <gmpxx.h>

#include "cinfty/errors.hpp"

namespace cinfty {

using Rational = mpq_class;

/// Ordered, duplicate-free list of coordinate names.
class VarList {
public:
  VarList() = default;
  explicit VarList(std::vector<std::string> names);
  VarList(std::initializer_list<std::string> names)
      : VarList(std::vector<std::string>(names)) {}

  int size() const { return static_cast<int>(names_.size()); }
  const std::string& name(int i) const { return names_.at(static_cast<std::size_t>(i)); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<int> index_of(std::string_view name) const;

  /// Same names plus one appended coordinate (used for the time variable).
  VarList with(const std::string& extra) const;

  bool operator==(const VarList&) const = default;

private:
  std::vector<std::string> names_;
};

enum class Op {
  Constant,
  Variable,
  Sum,
  Product,
  Negate,
  Power,
  Quotient,
  Exp,
  Log,
  Sin,
  Cos,
  Cut,      // cut(s) = exp(-1/s) for s > 0, 0 otherwise
  CutDeriv, // k-th derivative of cut, k >= 1
};

class Expr {
public:
  struct Node;

  /// The constant 0.
  Expr();

  static Expr constant(const Rational& value);
  static Expr constant(long value) { return constant(Rational(value)); }
  static Expr constant(int value) { return constant(Rational(value)); }
  /// Double-precision constant; stays inexact through folding.
  static Expr real(double value);
  static Expr variable(int index);

  Op op() const;
  const std::vector<Expr>& args() const;
  const Expr& arg(std::size_t i) const { return args()[i]; }

  bool is_constant() const { return op() == Op::Constant; }
  bool is_exact() const;
  const Rational& rational() const; // valid when exact
  double value() const;             // constant value as double
  bool is_zero() const;
  bool is_one() const;

  int index() const;    // Variable
  int exponent() const; // Power
  int order() const;    // CutDeriv

  /// One more than the largest variable index referenced (0 for constants).
  int arity() const;

  const Node* node() const { return node_.get(); }

private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  friend Expr make_node(Op, std::vector<Expr>, int);

  std::shared_ptr<const Node> node_;
};

struct Expr::Node {
  Op op = Op::Constant;
  std::vector<Expr> args;
  Rational exact_value;
  double real_value = 0.0;
  bool exact = true;
  int k = 0; // variable index, power exponent or cut derivative order
};

// Simplifying constructors.
Expr sum(std::vector<Expr> terms);
Expr product(std::vector<Expr> factors);
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, int exponent);
Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr cut(const Expr& a);
Expr cut_derivative(const Expr& a, int order);

/// Rebuilds e bottom-up through the simplifying constructors.
Expr simplify(const Expr& e);

bool structurally_equal(const Expr& a, const Expr& b);

/// Symbolic partial derivative with respect to variable `var`.
Expr diff(const Expr& e, int var);

/// C∞-ring operation: f(x_0..x_{m-1}) composed with m expressions.
Expr apply_operation(const Expr& f, const std::vector<Expr>& args);

/// Replace variable `var` by `value` everywhere.
Expr substitute(const Expr& e, int var, const Expr& value);

Expr parse_expr(std::string_view src, const VarList& vars);
std::string print(const Expr& e, const VarList& vars);

/// Coefficient polynomial of the k-th derivative of cut in u = 1/s:
/// cut^(k)(s) = P_k(1/s) exp(-1/s). Entry i is the coefficient of u^i.
std::vector<double> cut_derivative_polynomial(int order);

namespace detail {
[[noreturn]] void throw_guard(Op op);
[[noreturn]] void throw_arity(int index, long size);
} // namespace detail

template <typename Scalar>
Scalar cut_value(const Scalar& s, int order) {
  using std::exp;
  if (!(s > Scalar(0))) return Scalar(0);
  const Scalar u = Scalar(1) / s;
  const Scalar base = exp(-u);
  if (order == 0) return base;
  const auto coeffs = cut_derivative_polynomial(order);
  Scalar p(0);
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) p = p * u + Scalar(*it);
  return p * base;
}

/// Pointwise evaluation. Throws GuardError when a quotient denominator
/// vanishes or a log argument is not positive.
template <typename Scalar>
Scalar evaluate(const Expr& e, const Eigen::Ref<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& x) {
  using std::cos;
  using std::exp;
  using std::log;
  using std::sin;
  const auto& n = *e.node();
  switch (n.op) {
  case Op::Constant:
    return n.exact ? Scalar(n.exact_value.get_d()) : Scalar(n.real_value);
  case Op::Variable:
    if (n.k >= x.size()) detail::throw_arity(n.k, static_cast<long>(x.size()));
    return x[n.k];
  case Op::Sum: {
    Scalar acc(0);
    for (const auto& a : n.args) acc += evaluate<Scalar>(a, x);
    return acc;
  }
  case Op::Product: {
    Scalar acc(1);
    for (const auto& a : n.args) acc *= evaluate<Scalar>(a, x);
    return acc;
  }
  case Op::Negate:
    return -evaluate<Scalar>(n.args[0], x);
  case Op::Power: {
    const Scalar b = evaluate<Scalar>(n.args[0], x);
    Scalar r(1);
    for (int i = 0; i < n.k; ++i) r *= b;
    return r;
  }
  case Op::Quotient: {
    const Scalar den = evaluate<Scalar>(n.args[1], x);
    if (den == Scalar(0)) detail::throw_guard(Op::Quotient);
    return evaluate<Scalar>(n.args[0], x) / den;
  }
  case Op::Exp:
    return exp(evaluate<Scalar>(n.args[0], x));
  case Op::Log: {
    const Scalar a = evaluate<Scalar>(n.args[0], x);
    if (!(a > Scalar(0))) detail::throw_guard(Op::Log);
    return log(a);
  }
  case Op::Sin:
    return sin(evaluate<Scalar>(n.args[0], x));
  case Op::Cos:
    return cos(evaluate<Scalar>(n.args[0], x));
  case Op::Cut:
    return cut_value<Scalar>(evaluate<Scalar>(n.args[0], x), 0);
  case Op::CutDeriv:
    return cut_value<Scalar>(evaluate<Scalar>(n.args[0], x), n.k);
  }
  return Scalar(0);
}

inline double eval(const Expr& e, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return evaluate<double>(e, x);
}

/// Gradient vector (all n partials) of e.
std::vector<Expr> gradient(const Expr& e, int nvars);

} // namespace cinfty
