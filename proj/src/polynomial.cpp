#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cinfty/polyring.hpp"

namespace cinfty {

int total_degree(const Exponents& e) { return std::accumulate(e.begin(), e.end(), 0); }

bool monomial_less(const Exponents& a, const Exponents& b, MonomialOrder order) {
  if (order == MonomialOrder::Grevlex) {
    const int da = total_degree(a);
    const int db = total_degree(b);
    if (da != db) return da < db;
    for (std::size_t i = a.size(); i-- > 0;)
      if (a[i] != b[i]) return a[i] > b[i];
    return false;
  }
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return a[i] < b[i];
  return false;
}

Polynomial::Polynomial(int nvars) : nvars_(nvars) {
  if (nvars < 0) throw std::invalid_argument("negative polynomial arity");
}

Polynomial::Polynomial(int nvars, Terms terms) : nvars_(nvars), terms_(std::move(terms)) {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (static_cast<int>(it->first.size()) != nvars_) throw ArityError("exponent vector length mismatch");
    it = it->second == 0 ? terms_.erase(it) : std::next(it);
  }
}

Polynomial Polynomial::constant(int nvars, const Rational& c) {
  Polynomial p(nvars);
  if (c != 0) p.terms_.emplace(Exponents(static_cast<std::size_t>(nvars), 0), c);
  return p;
}

Polynomial Polynomial::variable(int nvars, int index) {
  if (index < 0 || index >= nvars) throw ArityError("variable index out of range");
  Exponents e(static_cast<std::size_t>(nvars), 0);
  e[static_cast<std::size_t>(index)] = 1;
  return monomial(e, Rational(1));
}

Polynomial Polynomial::monomial(const Exponents& e, const Rational& c) {
  Polynomial p(static_cast<int>(e.size()));
  if (c != 0) p.terms_.emplace(e, c);
  return p;
}

bool Polynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && cinfty::total_degree(terms_.begin()->first) == 0);
}

int Polynomial::total_degree() const {
  int d = -1;
  for (const auto& [e, c] : terms_) d = std::max(d, cinfty::total_degree(e));
  return d;
}

Rational Polynomial::coefficient(const Exponents& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Rational(0) : it->second;
}

const Exponents& Polynomial::leading_monomial(MonomialOrder order) const {
  if (terms_.empty()) throw std::logic_error("leading monomial of the zero polynomial");
  auto best = terms_.begin();
  for (auto it = std::next(best); it != terms_.end(); ++it)
    if (monomial_less(best->first, it->first, order)) best = it;
  return best->first;
}

const Rational& Polynomial::leading_coefficient(MonomialOrder order) const {
  return terms_.at(leading_monomial(order));
}

namespace {

void check_same(const Polynomial& a, const Polynomial& b) {
  if (a.nvars() != b.nvars())
    throw ArityError("polynomials over " + std::to_string(a.nvars()) + " and " + std::to_string(b.nvars()) +
                     " variables");
}

void accumulate(Polynomial::Terms& terms, const Exponents& e, const Rational& c) {
  auto [it, inserted] = terms.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms.erase(it);
  }
}

} // namespace

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  check_same(*this, other);
  for (const auto& [e, c] : other.terms_) accumulate(terms_, e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  check_same(*this, other);
  for (const auto& [e, c] : other.terms_) accumulate(terms_, e, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, v] : terms_) v *= c;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  check_same(a, b);
  Polynomial::Terms out;
  Exponents m(static_cast<std::size_t>(a.nvars()));
  for (const auto& [ea, ca] : a.terms_)
    for (const auto& [eb, cb] : b.terms_) {
      for (std::size_t i = 0; i < m.size(); ++i) m[i] = ea[i] + eb[i];
      accumulate(out, m, ca * cb);
    }
  Polynomial r(a.nvars());
  r.terms_ = std::move(out);
  return r;
}

Polynomial Polynomial::operator-() const {
  Polynomial r = *this;
  for (auto& [e, c] : r.terms_) c = -c;
  return r;
}

Polynomial Polynomial::times_term(const Exponents& e, const Rational& c) const {
  Polynomial r(nvars_);
  if (c == 0) return r;
  Exponents m(e.size());
  for (const auto& [ea, ca] : terms_) {
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = ea[i] + e[i];
    r.terms_.emplace_hint(r.terms_.end(), m, ca * c);
  }
  return r;
}

Polynomial Polynomial::power(int k) const {
  if (k < 0) throw std::invalid_argument("negative polynomial power");
  Polynomial result = constant(nvars_, Rational(1));
  Polynomial base = *this;
  while (k > 0) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k) base = base * base;
  }
  return result;
}

Polynomial Polynomial::compose(const std::vector<Polynomial>& subs) const {
  if (static_cast<int>(subs.size()) != nvars_)
    throw ArityError("composition needs " + std::to_string(nvars_) + " substitutions, got " +
                     std::to_string(subs.size()));
  const int target = subs.empty() ? 0 : subs.front().nvars();
  for (const auto& s : subs)
    if (s.nvars() != target) throw ArityError("substitutions over different variable counts");
  // Powers of each substitution are cached; degrees here are small.
  std::vector<std::vector<Polynomial>> powers(subs.size());
  auto power_of = [&](std::size_t i, int k) -> const Polynomial& {
    auto& cache = powers[i];
    if (cache.empty()) cache.push_back(constant(target, Rational(1)));
    while (static_cast<int>(cache.size()) <= k) cache.push_back(cache.back() * subs[i]);
    return cache[static_cast<std::size_t>(k)];
  };
  Polynomial out(target);
  for (const auto& [e, c] : terms_) {
    Polynomial term = constant(target, c);
    for (std::size_t i = 0; i < e.size(); ++i)
      if (e[i] > 0) term = term * power_of(i, e[i]);
    out += term;
  }
  return out;
}

Polynomial Polynomial::reindex(int nvars, const std::vector<int>& map) const {
  if (static_cast<int>(map.size()) != nvars_) throw ArityError("reindex map has the wrong length");
  Polynomial out(nvars);
  for (const auto& [e, c] : terms_) {
    Exponents m(static_cast<std::size_t>(nvars), 0);
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (map[i] < 0 || map[i] >= nvars) throw ArityError("reindex target out of range");
      m[static_cast<std::size_t>(map[i])] += e[i];
    }
    accumulate(out.terms_, m, c);
  }
  return out;
}

Polynomial Polynomial::derivative(int var) const {
  if (var < 0 || var >= nvars_) throw ArityError("derivative variable out of range");
  Polynomial out(nvars_);
  for (const auto& [e, c] : terms_) {
    const int k = e[static_cast<std::size_t>(var)];
    if (k == 0) continue;
    Exponents m = e;
    --m[static_cast<std::size_t>(var)];
    accumulate(out.terms_, m, c * k);
  }
  return out;
}

Polynomial Polynomial::monic(MonomialOrder order) const {
  if (is_zero()) return *this;
  Rational inv = 1 / leading_coefficient(order);
  return *this * inv;
}

Expr Polynomial::to_expr() const {
  std::vector<std::pair<Exponents, Rational>> sorted(terms_.begin(), terms_.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return monomial_less(b.first, a.first, MonomialOrder::Grevlex);
  });
  std::vector<Expr> terms;
  for (const auto& [e, c] : sorted) {
    std::vector<Expr> factors{Expr::constant(c)};
    for (std::size_t i = 0; i < e.size(); ++i)
      if (e[i] > 0) factors.push_back(pow(Expr::variable(static_cast<int>(i)), e[i]));
    terms.push_back(product(std::move(factors)));
  }
  return sum(std::move(terms));
}

std::string Polynomial::to_string(const VarList& vars) const { return print(to_expr(), vars); }

std::optional<Polynomial> as_polynomial(const Expr& e, int nvars) {
  switch (e.op()) {
  case Op::Constant:
    if (e.is_exact()) return Polynomial::constant(nvars, e.rational());
    if (!std::isfinite(e.value())) return std::nullopt;
    return Polynomial::constant(nvars, Rational(e.value()));
  case Op::Variable:
    if (e.index() >= nvars) throw ArityError("variable index exceeds polynomial arity");
    return Polynomial::variable(nvars, e.index());
  case Op::Sum: {
    Polynomial acc(nvars);
    for (const auto& a : e.args()) {
      auto p = as_polynomial(a, nvars);
      if (!p) return std::nullopt;
      acc += *p;
    }
    return acc;
  }
  case Op::Product: {
    Polynomial acc = Polynomial::constant(nvars, Rational(1));
    for (const auto& a : e.args()) {
      auto p = as_polynomial(a, nvars);
      if (!p) return std::nullopt;
      acc = acc * *p;
    }
    return acc;
  }
  case Op::Negate: {
    auto p = as_polynomial(e.arg(0), nvars);
    if (!p) return std::nullopt;
    return -*p;
  }
  case Op::Power: {
    auto p = as_polynomial(e.arg(0), nvars);
    if (!p) return std::nullopt;
    return p->power(e.exponent());
  }
  case Op::Quotient: {
    auto num = as_polynomial(e.arg(0), nvars);
    auto den = as_polynomial(e.arg(1), nvars);
    if (!num || !den || !den->is_constant() || den->is_zero()) return std::nullopt;
    return *num * Rational(1 / den->terms().begin()->second);
  }
  default:
    return std::nullopt;
  }
}

Polynomial divide_exact(const Polynomial& p, const Polynomial& d, MonomialOrder order) {
  check_same(p, d);
  if (d.is_zero()) throw std::domain_error("division by the zero polynomial");
  const Exponents lm = d.leading_monomial(order);
  const Rational lc = d.leading_coefficient(order);
  Polynomial quotient(p.nvars());
  Polynomial rest = p;
  while (!rest.is_zero()) {
    const Exponents m = rest.leading_monomial(order);
    Exponents shift(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
      shift[i] = m[i] - lm[i];
      if (shift[i] < 0) throw std::domain_error("polynomial division is not exact");
    }
    const Rational c = rest.coefficient(m) / lc;
    quotient += Polynomial::monomial(shift, c);
    rest -= d.times_term(shift, c);
  }
  return quotient;
}

} // namespace cinfty
