#include "cinfty/expr.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>
#include <unordered_set>

namespace cinfty {

VarList::VarList(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty()) throw std::invalid_argument("variable list must not be empty");
  std::unordered_set<std::string> seen;
  for (const auto& n : names_) {
    if (n.empty()) throw std::invalid_argument("empty variable name");
    if (!seen.insert(n).second) throw std::invalid_argument("duplicate variable name '" + n + "'");
  }
}

std::optional<int> VarList::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return static_cast<int>(i);
  return std::nullopt;
}

VarList VarList::with(const std::string& extra) const {
  auto names = names_;
  names.push_back(extra);
  return VarList(std::move(names));
}

namespace detail {

void throw_guard(Op op) {
  if (op == Op::Log) throw GuardError("log argument is not positive");
  throw GuardError("division by zero");
}

void throw_arity(int index, long size) {
  throw ArityError("variable index " + std::to_string(index) + " out of range for point of length " +
                   std::to_string(size));
}

} // namespace detail

Expr make_node(Op op, std::vector<Expr> args, int k) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->args = std::move(args);
  n->k = k;
  return Expr(std::move(n));
}

namespace {

Expr make_exact(const Rational& q) {
  Expr e = make_node(Op::Constant, {}, 0);
  auto* n = const_cast<Expr::Node*>(e.node());
  n->exact_value = q;
  n->exact = true;
  return e;
}

const Expr& zero() {
  static const Expr z = make_exact(Rational(0));
  return z;
}

// Constant accumulator that stays exact until a double joins in.
struct ConstAcc {
  Rational q;
  double d = 0.0;
  bool exact = true;

  explicit ConstAcc(long v) : q(v), d(static_cast<double>(v)) {}

  void add(const Expr& c) {
    if (exact && c.is_exact()) {
      q += c.rational();
    } else {
      d = value() + c.value();
      exact = false;
    }
  }
  void mul(const Expr& c) {
    if (exact && c.is_exact()) {
      q *= c.rational();
    } else {
      d = value() * c.value();
      exact = false;
    }
  }
  void negate() {
    if (exact)
      q = -q;
    else
      d = -d;
  }
  double value() const { return exact ? q.get_d() : d; }
  bool is(long v) const { return exact ? q == v : d == static_cast<double>(v); }
  Expr expr() const { return exact ? Expr::constant(q) : Expr::real(d); }
};

Expr negate_constant(const Expr& c) {
  if (c.is_exact()) return Expr::constant(Rational(-c.rational()));
  return Expr::real(-c.value());
}

} // namespace

Expr::Expr() : node_(zero().node_) {}

Expr Expr::constant(const Rational& value) {
  Rational q = value;
  q.canonicalize();
  return make_exact(q);
}

Expr Expr::real(double value) {
  Expr e = make_node(Op::Constant, {}, 0);
  auto* n = const_cast<Node*>(e.node());
  n->real_value = value;
  n->exact = false;
  return e;
}

Expr Expr::variable(int index) {
  if (index < 0) throw ArityError("negative variable index");
  return make_node(Op::Variable, {}, index);
}

Op Expr::op() const { return node_->op; }
const std::vector<Expr>& Expr::args() const { return node_->args; }
bool Expr::is_exact() const { return node_->op == Op::Constant && node_->exact; }

const Rational& Expr::rational() const {
  if (!is_exact()) throw std::logic_error("not an exact constant");
  return node_->exact_value;
}

double Expr::value() const {
  if (node_->op != Op::Constant) throw std::logic_error("not a constant");
  return node_->exact ? node_->exact_value.get_d() : node_->real_value;
}

bool Expr::is_zero() const {
  if (!is_constant()) return false;
  return node_->exact ? node_->exact_value == 0 : node_->real_value == 0.0;
}

bool Expr::is_one() const {
  if (!is_constant()) return false;
  return node_->exact ? node_->exact_value == 1 : node_->real_value == 1.0;
}

int Expr::index() const { return node_->k; }
int Expr::exponent() const { return node_->k; }
int Expr::order() const { return node_->k; }

int Expr::arity() const {
  if (op() == Op::Variable) return index() + 1;
  int a = 0;
  for (const auto& c : args()) a = std::max(a, c.arity());
  return a;
}

// --- simplifying constructors ---------------------------------------------

namespace {

// c*u with c exact, or (1, t).
std::pair<Rational, Expr> split_coefficient(const Expr& t) {
  if (t.op() == Op::Negate) return {Rational(-1), t.arg(0)};
  if (t.op() == Op::Product && t.arg(0).is_exact()) {
    std::vector<Expr> rest(t.args().begin() + 1, t.args().end());
    return {t.arg(0).rational(), rest.size() == 1 ? rest.front() : product(std::move(rest))};
  }
  return {Rational(1), t};
}

// Drop pairs u, -u.
void cancel_opposites(std::vector<Expr>& flat) {
  if (flat.size() < 2) return;
  std::vector<std::pair<Rational, Expr>> parts;
  for (const auto& t : flat) parts.push_back(split_coefficient(t));
  std::vector<bool> gone(flat.size(), false);
  for (std::size_t i = 0; i < flat.size(); ++i) {
    if (gone[i]) continue;
    for (std::size_t j = i + 1; j < flat.size(); ++j) {
      if (gone[j] || parts[i].first + parts[j].first != 0) continue;
      if (!structurally_equal(parts[i].second, parts[j].second)) continue;
      gone[i] = gone[j] = true;
      break;
    }
  }
  std::vector<Expr> kept;
  for (std::size_t i = 0; i < flat.size(); ++i)
    if (!gone[i]) kept.push_back(flat[i]);
  flat = std::move(kept);
}

} // namespace

Expr sum(std::vector<Expr> terms) {
  std::vector<Expr> flat;
  ConstAcc acc(0);
  bool any_const = false;
  auto visit = [&](const Expr& t, auto& self) -> void {
    if (t.op() == Op::Sum) {
      for (const auto& a : t.args()) self(a, self);
    } else if (t.is_constant()) {
      acc.add(t);
      any_const = true;
    } else {
      flat.push_back(t);
    }
  };
  for (const auto& t : terms) visit(t, visit);
  cancel_opposites(flat);
  if (any_const && !acc.is(0)) flat.push_back(acc.expr());
  if (flat.empty()) return any_const ? acc.expr() : Expr();
  if (flat.size() == 1) return flat.front();
  return make_node(Op::Sum, std::move(flat), 0);
}

Expr product(std::vector<Expr> factors) {
  std::vector<Expr> flat;
  ConstAcc acc(1);
  bool negative = false;
  auto visit = [&](const Expr& f, auto& self) -> void {
    if (f.op() == Op::Product) {
      for (const auto& a : f.args()) self(a, self);
    } else if (f.op() == Op::Negate) {
      negative = !negative;
      self(f.arg(0), self);
    } else if (f.is_constant()) {
      acc.mul(f);
    } else {
      flat.push_back(f);
    }
  };
  for (const auto& f : factors) visit(f, visit);
  if (negative) acc.negate();
  if (acc.is(0)) return acc.exact ? Expr() : Expr::real(0.0);
  if (flat.empty()) return acc.expr();
  auto bare = [&]() { return flat.size() == 1 ? flat.front() : make_node(Op::Product, flat, 0); };
  if (acc.is(1)) return bare();
  if (acc.is(-1)) return make_node(Op::Negate, {bare()}, 0);
  flat.insert(flat.begin(), acc.expr());
  return make_node(Op::Product, std::move(flat), 0);
}

Expr operator+(const Expr& a, const Expr& b) { return sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return sum({a, -b}); }
Expr operator*(const Expr& a, const Expr& b) { return product({a, b}); }

Expr operator-(const Expr& a) {
  switch (a.op()) {
  case Op::Constant:
    return negate_constant(a);
  case Op::Negate:
    return a.arg(0);
  case Op::Product:
    if (a.arg(0).is_constant()) return product({Expr::constant(-1), a});
    break;
  default:
    break;
  }
  return make_node(Op::Negate, {a}, 0);
}

Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_zero()) throw GuardError("division by the zero constant");
  if (a.is_zero()) return a;
  if (b.is_one()) return a;
  if (a.is_constant() && b.is_constant()) {
    if (a.is_exact() && b.is_exact()) return Expr::constant(Rational(a.rational() / b.rational()));
    return Expr::real(a.value() / b.value());
  }
  if (b.is_constant() && (b.is_exact() ? b.rational() == -1 : b.value() == -1.0)) return -a;
  return make_node(Op::Quotient, {a, b}, 0);
}

Expr pow(const Expr& base, int exponent) {
  if (exponent < 0) throw std::invalid_argument("negative integer power");
  if (exponent == 0) return Expr::constant(1);
  if (exponent == 1) return base;
  if (base.is_constant()) {
    if (base.is_exact()) {
      Rational r(1);
      for (int i = 0; i < exponent; ++i) r *= base.rational();
      return Expr::constant(r);
    }
    return Expr::real(std::pow(base.value(), exponent));
  }
  if (base.op() == Op::Power) return pow(base.arg(0), base.exponent() * exponent);
  if (base.op() == Op::Negate) {
    auto p = pow(base.arg(0), exponent);
    return exponent % 2 == 0 ? p : -p;
  }
  return make_node(Op::Power, {base}, exponent);
}

Expr exp(const Expr& a) {
  if (a.is_constant()) {
    if (a.is_zero()) return Expr::constant(1);
    if (!a.is_exact()) return Expr::real(std::exp(a.value()));
  }
  return make_node(Op::Exp, {a}, 0);
}

Expr log(const Expr& a) {
  if (a.is_constant()) {
    if (!(a.value() > 0)) throw GuardError("log of a non-positive constant");
    if (a.is_one()) return a.is_exact() ? Expr() : Expr::real(0.0);
    if (!a.is_exact()) return Expr::real(std::log(a.value()));
  }
  return make_node(Op::Log, {a}, 0);
}

Expr sin(const Expr& a) {
  if (a.is_constant()) {
    if (a.is_zero()) return a;
    if (!a.is_exact()) return Expr::real(std::sin(a.value()));
  }
  return make_node(Op::Sin, {a}, 0);
}

Expr cos(const Expr& a) {
  if (a.is_constant()) {
    if (a.is_zero()) return Expr::constant(1);
    if (!a.is_exact()) return Expr::real(std::cos(a.value()));
  }
  return make_node(Op::Cos, {a}, 0);
}

Expr cut(const Expr& a) { return cut_derivative(a, 0); }

Expr cut_derivative(const Expr& a, int order) {
  if (order < 0) throw std::invalid_argument("negative cut derivative order");
  if (a.is_constant()) {
    if (!(a.value() > 0)) return Expr();
    if (!a.is_exact()) return Expr::real(cut_value<double>(a.value(), order));
  }
  if (order == 0) return make_node(Op::Cut, {a}, 0);
  return make_node(Op::CutDeriv, {a}, order);
}

std::vector<double> cut_derivative_polynomial(int order) {
  // P_0 = 1, P_{k+1}(u) = u^2 (P_k(u) - P_k'(u)).
  static std::mutex mu;
  static std::vector<std::vector<double>> cache{{1.0}};
  std::lock_guard lock(mu);
  while (static_cast<int>(cache.size()) <= order) {
    const auto& p = cache.back();
    std::vector<double> next(p.size() + 2, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      next[i + 2] += p[i];
      if (i > 0) next[i + 1] -= static_cast<double>(i) * p[i];
    }
    cache.push_back(std::move(next));
  }
  return cache[static_cast<std::size_t>(order)];
}

namespace {

// Rebuild a node of e's kind over new children.
Expr rebuild(const Expr& e, std::vector<Expr> kids) {
  switch (e.op()) {
  case Op::Constant:
  case Op::Variable:
    return e;
  case Op::Sum:
    return sum(std::move(kids));
  case Op::Product:
    return product(std::move(kids));
  case Op::Negate:
    return -kids[0];
  case Op::Power:
    return pow(kids[0], e.exponent());
  case Op::Quotient:
    return kids[0] / kids[1];
  case Op::Exp:
    return exp(kids[0]);
  case Op::Log:
    return log(kids[0]);
  case Op::Sin:
    return sin(kids[0]);
  case Op::Cos:
    return cos(kids[0]);
  case Op::Cut:
    return cut(kids[0]);
  case Op::CutDeriv:
    return cut_derivative(kids[0], e.order());
  }
  return e;
}

template <typename Leaf>
Expr transform(const Expr& e, const Leaf& leaf) {
  if (e.op() == Op::Variable || e.op() == Op::Constant) return leaf(e);
  std::vector<Expr> kids;
  kids.reserve(e.args().size());
  for (const auto& a : e.args()) kids.push_back(transform(a, leaf));
  return rebuild(e, std::move(kids));
}

bool constants_equal(const Expr& a, const Expr& b) {
  if (a.is_exact() && b.is_exact()) return a.rational() == b.rational();
  if (!a.is_exact() && !b.is_exact()) return a.value() == b.value();
  const Expr& ex = a.is_exact() ? a : b;
  const Expr& in = a.is_exact() ? b : a;
  if (!std::isfinite(in.value())) return false;
  return ex.rational() == Rational(in.value());
}

} // namespace

Expr simplify(const Expr& e) {
  return transform(e, [](const Expr& leaf) { return leaf; });
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.node() == b.node()) return true;
  if (a.op() != b.op()) return false;
  switch (a.op()) {
  case Op::Constant:
    return constants_equal(a, b);
  case Op::Variable:
  case Op::Power:
  case Op::CutDeriv:
    if (a.node()->k != b.node()->k) return false;
    break;
  default:
    break;
  }
  if (a.args().size() != b.args().size()) return false;
  for (std::size_t i = 0; i < a.args().size(); ++i)
    if (!structurally_equal(a.arg(i), b.arg(i))) return false;
  return true;
}

Expr diff(const Expr& e, int var) {
  if (var < 0) throw ArityError("negative variable index");
  switch (e.op()) {
  case Op::Constant:
    return Expr();
  case Op::Variable:
    return Expr::constant(e.index() == var ? 1 : 0);
  case Op::Sum: {
    std::vector<Expr> terms;
    for (const auto& a : e.args()) terms.push_back(diff(a, var));
    return sum(std::move(terms));
  }
  case Op::Product: {
    std::vector<Expr> terms;
    const auto& fs = e.args();
    for (std::size_t i = 0; i < fs.size(); ++i) {
      Expr d = diff(fs[i], var);
      if (d.is_zero()) continue;
      std::vector<Expr> factors = fs;
      factors[i] = d;
      terms.push_back(product(std::move(factors)));
    }
    return sum(std::move(terms));
  }
  case Op::Negate:
    return -diff(e.arg(0), var);
  case Op::Power: {
    const Expr& u = e.arg(0);
    return product({Expr::constant(e.exponent()), pow(u, e.exponent() - 1), diff(u, var)});
  }
  case Op::Quotient: {
    const Expr& u = e.arg(0);
    const Expr& w = e.arg(1);
    Expr du = diff(u, var);
    Expr dw = diff(w, var);
    if (dw.is_zero()) return du / w;
    return (du * w - u * dw) / pow(w, 2);
  }
  case Op::Exp:
    return e * diff(e.arg(0), var);
  case Op::Log:
    return diff(e.arg(0), var) / e.arg(0);
  case Op::Sin:
    return cos(e.arg(0)) * diff(e.arg(0), var);
  case Op::Cos:
    return -(sin(e.arg(0)) * diff(e.arg(0), var));
  case Op::Cut:
    return cut_derivative(e.arg(0), 1) * diff(e.arg(0), var);
  case Op::CutDeriv:
    return cut_derivative(e.arg(0), e.order() + 1) * diff(e.arg(0), var);
  }
  return Expr();
}

std::vector<Expr> gradient(const Expr& e, int nvars) {
  std::vector<Expr> g;
  g.reserve(static_cast<std::size_t>(nvars));
  for (int i = 0; i < nvars; ++i) g.push_back(diff(e, i));
  return g;
}

Expr apply_operation(const Expr& f, const std::vector<Expr>& args) {
  if (f.arity() > static_cast<int>(args.size()))
    throw ArityError("operation of arity " + std::to_string(f.arity()) + " applied to " +
                     std::to_string(args.size()) + " arguments");
  return transform(f, [&](const Expr& leaf) {
    return leaf.op() == Op::Variable ? args[static_cast<std::size_t>(leaf.index())] : leaf;
  });
}

Expr substitute(const Expr& e, int var, const Expr& value) {
  return transform(e, [&](const Expr& leaf) {
    return leaf.op() == Op::Variable && leaf.index() == var ? value : leaf;
  });
}

// --- printing --------------------------------------------------------------

namespace {

// Binding contexts, loosest first.
enum class Prec { Sum, Term, Factor, Base };

Rational exact_of(const Expr& c) { return c.is_exact() ? c.rational() : Rational(c.value()); }

bool is_negative_term(const Expr& e) {
  if (e.op() == Op::Negate) return true;
  if (e.is_constant()) return exact_of(e) < 0;
  if (e.op() == Op::Product && e.arg(0).is_constant()) return exact_of(e.arg(0)) < 0;
  return false;
}

std::string print_at(const Expr& e, const VarList& vars, Prec prec);

std::string constant_text(const Rational& q) { return q.get_str(); }

std::string wrap(const std::string& s) { return "(" + s + ")"; }

// Print the negation of a negative term (its magnitude), at Term binding.
std::string print_magnitude(const Expr& e, const VarList& vars) {
  if (e.op() == Op::Negate) return print_at(e.arg(0), vars, Prec::Term);
  if (e.is_constant()) return constant_text(Rational(-exact_of(e)));
  std::vector<Expr> factors(e.args().begin(), e.args().end());
  factors[0] = negate_constant(factors[0]);
  return print_at(make_node(Op::Product, std::move(factors), 0), vars, Prec::Term);
}

std::string print_at(const Expr& e, const VarList& vars, Prec prec) {
  switch (e.op()) {
  case Op::Constant: {
    const Rational q = exact_of(e);
    std::string s = constant_text(q);
    const bool plain = q >= 0 && q.get_den() == 1;
    return plain || prec <= Prec::Term ? s : wrap(s);
  }
  case Op::Variable:
    if (e.index() >= vars.size()) detail::throw_arity(e.index(), vars.size());
    return vars.name(e.index());
  case Op::Sum: {
    std::string s;
    for (std::size_t i = 0; i < e.args().size(); ++i) {
      const Expr& t = e.arg(i);
      if (is_negative_term(t)) {
        if (i == 0)
          s += t.op() == Op::Negate ? "-" + print_at(t.arg(0), vars, Prec::Base) : "-" + print_magnitude(t, vars);
        else
          s += " - " + print_magnitude(t, vars);
      } else {
        s += (i == 0 ? "" : " + ") + print_at(t, vars, Prec::Term);
      }
    }
    return prec == Prec::Sum ? s : wrap(s);
  }
  case Op::Product: {
    std::string s;
    std::size_t first = 0;
    if (e.arg(0).is_constant()) {
      const Rational c = exact_of(e.arg(0));
      s = (c < 0 ? "-" : "") + constant_text(abs(c)) + "*";
      first = 1;
    }
    for (std::size_t i = first; i < e.args().size(); ++i) {
      if (i > first) s += "*";
      s += print_at(e.arg(i), vars, Prec::Factor);
    }
    return prec <= Prec::Term ? s : wrap(s);
  }
  case Op::Negate: {
    std::string s = "-" + print_at(e.arg(0), vars, Prec::Base);
    return prec <= Prec::Term ? s : wrap(s);
  }
  case Op::Power: {
    std::string s = print_at(e.arg(0), vars, Prec::Base) + "^" + std::to_string(e.exponent());
    return prec <= Prec::Factor ? s : wrap(s);
  }
  case Op::Quotient: {
    std::string s = print_at(e.arg(0), vars, Prec::Term) + "/" + print_at(e.arg(1), vars, Prec::Factor);
    return prec <= Prec::Term ? s : wrap(s);
  }
  case Op::Exp:
    return "exp(" + print_at(e.arg(0), vars, Prec::Sum) + ")";
  case Op::Log:
    return "log(" + print_at(e.arg(0), vars, Prec::Sum) + ")";
  case Op::Sin:
    return "sin(" + print_at(e.arg(0), vars, Prec::Sum) + ")";
  case Op::Cos:
    return "cos(" + print_at(e.arg(0), vars, Prec::Sum) + ")";
  case Op::Cut:
    return "cut(" + print_at(e.arg(0), vars, Prec::Sum) + ")";
  case Op::CutDeriv:
    return "cut" + std::string(static_cast<std::size_t>(e.order()), '\'') + "(" +
           print_at(e.arg(0), vars, Prec::Sum) + ")";
  }
  return {};
}

} // namespace

std::string print(const Expr& e, const VarList& vars) { return print_at(e, vars, Prec::Sum); }

} // namespace cinfty
