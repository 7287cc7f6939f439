#include <algorithm>
#include <tuple>

#include "cinfty/polyring.hpp"

namespace cinfty {

namespace {

bool divides(const Exponents& a, const Exponents& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

Exponents lcm(const Exponents& a, const Exponents& b) {
  Exponents m(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) m[i] = std::max(a[i], b[i]);
  return m;
}

bool coprime(const Exponents& a, const Exponents& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > 0 && b[i] > 0) return false;
  return true;
}

Exponents minus(const Exponents& a, const Exponents& b) {
  Exponents m(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) m[i] = a[i] - b[i];
  return m;
}

} // namespace

Polynomial reduce(const Polynomial& p, const std::vector<Polynomial>& basis, MonomialOrder order) {
  std::vector<std::pair<Exponents, Rational>> leads;
  leads.reserve(basis.size());
  for (const auto& g : basis) {
    if (g.nvars() != p.nvars()) throw ArityError("reduction by a polynomial over a different arity");
    if (g.is_zero()) throw std::invalid_argument("zero polynomial in a reduction basis");
    leads.emplace_back(g.leading_monomial(order), g.leading_coefficient(order));
  }
  Polynomial remainder(p.nvars());
  Polynomial rest = p;
  while (!rest.is_zero()) {
    const Exponents m = rest.leading_monomial(order);
    const Rational c = rest.coefficient(m);
    bool reduced = false;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      if (!divides(leads[i].first, m)) continue;
      rest -= basis[i].times_term(minus(m, leads[i].first), c / leads[i].second);
      reduced = true;
      break;
    }
    if (!reduced) {
      remainder += Polynomial::monomial(m, c);
      rest -= Polynomial::monomial(m, c);
    }
  }
  return remainder;
}

Polynomial s_polynomial(const Polynomial& f, const Polynomial& g, MonomialOrder order) {
  const Exponents& lf = f.leading_monomial(order);
  const Exponents& lg = g.leading_monomial(order);
  const Exponents l = lcm(lf, lg);
  return f.times_term(minus(l, lf), 1 / f.leading_coefficient(order)) -
         g.times_term(minus(l, lg), 1 / g.leading_coefficient(order));
}

std::vector<Polynomial> groebner_basis(std::vector<Polynomial> gens, const GroebnerOptions& opts) {
  const MonomialOrder order = opts.order;
  std::vector<Polynomial> basis;
  for (auto& g : gens)
    if (!g.is_zero()) basis.push_back(g.monic(order));
  if (basis.empty()) return basis;

  // Normal selection strategy: smallest lcm degree, then first index.
  using Pair = std::tuple<int, std::size_t, std::size_t>;
  std::vector<Pair> pairs;
  auto add_pairs_for = [&](std::size_t j) {
    for (std::size_t i = 0; i < j; ++i)
      pairs.emplace_back(total_degree(lcm(basis[i].leading_monomial(order), basis[j].leading_monomial(order))), i, j);
  };
  for (std::size_t j = 1; j < basis.size(); ++j) add_pairs_for(j);

  while (!pairs.empty()) {
    auto it = std::min_element(pairs.begin(), pairs.end());
    const auto [deg, i, j] = *it;
    pairs.erase(it);
    const Exponents& li = basis[i].leading_monomial(order);
    const Exponents& lj = basis[j].leading_monomial(order);
    if (coprime(li, lj)) continue;
    Polynomial r = reduce(s_polynomial(basis[i], basis[j], order), basis, order);
    if (r.is_zero()) continue;
    if (r.total_degree() > opts.degree_cap)
      throw GroebnerAbort("Buchberger run exceeded the degree cap of " + std::to_string(opts.degree_cap));
    basis.push_back(r.monic(order));
    add_pairs_for(basis.size() - 1);
  }

  // Minimalize: drop elements whose leading monomial is divisible by another's.
  std::vector<Polynomial> minimal;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const Exponents& li = basis[i].leading_monomial(order);
    bool redundant = false;
    for (std::size_t j = 0; j < basis.size() && !redundant; ++j) {
      if (i == j) continue;
      const Exponents& lj = basis[j].leading_monomial(order);
      if (divides(lj, li) && (lj != li || j < i)) redundant = true;
    }
    if (!redundant) minimal.push_back(basis[i]);
  }
  // Interreduce.
  for (std::size_t i = 0; i < minimal.size(); ++i) {
    std::vector<Polynomial> others;
    for (std::size_t j = 0; j < minimal.size(); ++j)
      if (j != i) others.push_back(minimal[j]);
    const Exponents lead = minimal[i].leading_monomial(order);
    const Rational lc = minimal[i].leading_coefficient(order);
    Polynomial tail = minimal[i] - Polynomial::monomial(lead, lc);
    minimal[i] = (Polynomial::monomial(lead, lc) + reduce(tail, others, order)).monic(order);
  }
  std::sort(minimal.begin(), minimal.end(), [order](const Polynomial& a, const Polynomial& b) {
    return monomial_less(a.leading_monomial(order), b.leading_monomial(order), order);
  });
  return minimal;
}

bool satisfies_buchberger_criterion(const std::vector<Polynomial>& basis, MonomialOrder order) {
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = i + 1; j < basis.size(); ++j)
      if (!reduce(s_polynomial(basis[i], basis[j], order), basis, order).is_zero()) return false;
  return true;
}

PolyIdeal::PolyIdeal(int nvars, std::vector<Polynomial> generators, GroebnerOptions opts)
    : nvars_(nvars), gens_(std::move(generators)), opts_(opts), cache_(std::make_shared<Cache>()) {
  for (const auto& g : gens_)
    if (g.nvars() != nvars_) throw ArityError("ideal generator over the wrong number of variables");
}

const std::vector<Polynomial>& PolyIdeal::basis() const {
  std::call_once(cache_->once, [this] {
    cache_->basis = groebner_basis(gens_, opts_);
    cache_->ready.store(true, std::memory_order_release);
  });
  return cache_->basis;
}

bool PolyIdeal::has_cached_basis() const { return cache_->ready.load(std::memory_order_acquire); }

Polynomial PolyIdeal::normal_form(const Polynomial& p) const {
  if (p.nvars() != nvars_) throw ArityError("normal form of a polynomial over the wrong arity");
  return reduce(p, basis(), opts_.order);
}

Polynomial normal_form(const Polynomial& p, const PolyIdeal& ideal) { return ideal.normal_form(p); }

PolyIdeal ideal_sum(const PolyIdeal& a, const PolyIdeal& b) {
  if (a.nvars() != b.nvars()) throw ArityError("ideal sum over different variable lists");
  auto gens = a.generators();
  gens.insert(gens.end(), b.generators().begin(), b.generators().end());
  return PolyIdeal(a.nvars(), std::move(gens), a.options());
}

PolyIdeal pullback_ideal(const PolyIdeal& ideal, const std::vector<Polynomial>& map) {
  if (static_cast<int>(map.size()) != ideal.nvars())
    throw ArityError("pullback map has " + std::to_string(map.size()) + " components, ideal lives over " +
                     std::to_string(ideal.nvars()) + " variables");
  if (map.empty()) throw ArityError("empty pullback map");
  std::vector<Polynomial> gens;
  for (const auto& g : ideal.generators()) gens.push_back(g.compose(map));
  return PolyIdeal(map.front().nvars(), std::move(gens), ideal.options());
}

} // namespace cinfty
