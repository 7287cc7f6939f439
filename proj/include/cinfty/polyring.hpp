#pragma once

// Exact multivariate polynomials over Q and Gröbner-basis ideal machinery.

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cinfty/expr.hpp"

namespace cinfty {

using Exponents = std::vector<int>;

enum class MonomialOrder { Grevlex, Lex };

/// Strict "a < b" in the given order; variable precedence is declaration order.
bool monomial_less(const Exponents& a, const Exponents& b, MonomialOrder order);
int total_degree(const Exponents& e);

class Polynomial {
public:
  using Terms = std::map<Exponents, Rational>;

  explicit Polynomial(int nvars = 1);
  Polynomial(int nvars, Terms terms);

  static Polynomial constant(int nvars, const Rational& c);
  static Polynomial variable(int nvars, int index);
  static Polynomial monomial(const Exponents& e, const Rational& c);

  int nvars() const { return nvars_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  int total_degree() const; // -1 for the zero polynomial
  Rational coefficient(const Exponents& e) const;

  /// Leading monomial and coefficient; precondition: nonzero.
  const Exponents& leading_monomial(MonomialOrder order) const;
  const Rational& leading_coefficient(MonomialOrder order) const;

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(const Rational& c);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(Polynomial a, const Rational& c) { return a *= c; }
  friend Polynomial operator*(const Rational& c, Polynomial a) { return a *= c; }
  Polynomial operator-() const;
  bool operator==(const Polynomial& other) const = default;

  /// Multiply by the monomial c·x^e.
  Polynomial times_term(const Exponents& e, const Rational& c) const;
  Polynomial power(int k) const;

  /// Substitute polynomial `subs[i]` for variable i (subs share an arity).
  Polynomial compose(const std::vector<Polynomial>& subs) const;
  /// Re-embed into `nvars` variables, variable i going to index map[i].
  Polynomial reindex(int nvars, const std::vector<int>& map) const;

  Polynomial derivative(int var) const;
  Polynomial monic(MonomialOrder order) const;

  template <typename Scalar>
  Scalar evaluate(const Eigen::Ref<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& x) const {
    Scalar acc(0);
    for (const auto& [e, c] : terms_) {
      Scalar m(c.get_d());
      for (int i = 0; i < nvars_; ++i)
        for (int k = 0; k < e[static_cast<std::size_t>(i)]; ++k) m *= x[i];
      acc += m;
    }
    return acc;
  }

  /// Expression with terms in descending grevlex order.
  Expr to_expr() const;
  std::string to_string(const VarList& vars) const;

private:
  int nvars_;
  Terms terms_;
};

/// Exact conversion; nullopt when e uses anything besides constants,
/// variables, sums, products, negation, integer powers and division by a
/// nonzero constant.
std::optional<Polynomial> as_polynomial(const Expr& e, int nvars);

struct GroebnerOptions {
  MonomialOrder order = MonomialOrder::Grevlex;
  int degree_cap = 40;
};

/// Reduced Gröbner basis (monic, sorted by ascending leading monomial).
/// Empty input or all-zero input gives the empty basis (zero ideal).
std::vector<Polynomial> groebner_basis(std::vector<Polynomial> gens, const GroebnerOptions& opts = {});

/// Full multivariate-division remainder of p by `basis`.
Polynomial reduce(const Polynomial& p, const std::vector<Polynomial>& basis, MonomialOrder order);

Polynomial s_polynomial(const Polynomial& f, const Polynomial& g, MonomialOrder order);

/// Every S-polynomial of the basis reduces to zero.
bool satisfies_buchberger_criterion(const std::vector<Polynomial>& basis, MonomialOrder order);

/// Finitely generated ideal with a lazily computed, thread-safe cached basis.
class PolyIdeal {
public:
  PolyIdeal(int nvars, std::vector<Polynomial> generators, GroebnerOptions opts = {});

  int nvars() const { return nvars_; }
  const std::vector<Polynomial>& generators() const { return gens_; }
  MonomialOrder order() const { return opts_.order; }
  const GroebnerOptions& options() const { return opts_; }

  const std::vector<Polynomial>& basis() const;
  bool has_cached_basis() const;

  Polynomial normal_form(const Polynomial& p) const;
  bool contains(const Polynomial& p) const { return normal_form(p).is_zero(); }

private:
  struct Cache {
    std::once_flag once;
    std::vector<Polynomial> basis;
    std::atomic<bool> ready{false};
  };

  int nvars_;
  std::vector<Polynomial> gens_;
  GroebnerOptions opts_;
  std::shared_ptr<Cache> cache_;
};

Polynomial normal_form(const Polynomial& p, const PolyIdeal& ideal);

PolyIdeal ideal_sum(const PolyIdeal& a, const PolyIdeal& b);

/// Ideal generated by g∘f for the generators g of `ideal` (over m vars),
/// where f = (f_1..f_m) are polynomials over n vars.
PolyIdeal pullback_ideal(const PolyIdeal& ideal, const std::vector<Polynomial>& map);

/// Exact quotient p / d; throws std::domain_error when d does not divide p.
Polynomial divide_exact(const Polynomial& p, const Polynomial& d, MonomialOrder order = MonomialOrder::Lex);

} // namespace cinfty
