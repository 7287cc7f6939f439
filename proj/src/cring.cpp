#include "cinfty/cring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace cinfty {

SchemePresentation::SchemePresentation(VarList vars, std::vector<Expr> ideal, std::vector<Expr> region,
                                       double tolerance)
    : vars_(std::move(vars)), ideal_(std::move(ideal)), region_(std::move(region)), tolerance_(tolerance) {
  if (!(tolerance_ > 0)) throw std::invalid_argument("zero-set tolerance must be positive");
  for (const auto* list : {&ideal_, &region_})
    for (const auto& g : *list)
      if (g.arity() > dim()) throw ArityError("generator references a variable outside the variable list");
  std::vector<Polynomial> gens;
  for (const auto& g : ideal_) {
    auto p = as_polynomial(g, dim());
    if (!p) return;
    gens.push_back(std::move(*p));
  }
  poly_ideal_.emplace(dim(), std::move(gens));
}

double SchemePresentation::residual(const Eigen::Ref<const Eigen::VectorXd>& p) const {
  if (p.size() != dim()) throw ArityError("point has the wrong dimension");
  constexpr double inf = std::numeric_limits<double>::infinity();
  double m = 0.0;
  for (const auto& g : ideal_) {
    const double v = std::abs(eval(g, p));
    m = std::isnan(v) ? inf : std::max(m, v);
  }
  for (const auto& g : region_) {
    const double v = eval(g, p);
    m = std::isnan(v) ? inf : std::max(m, v);
  }
  return m;
}

SchemePresentation SchemePresentation::with_tolerance(double tolerance) const {
  SchemePresentation copy = *this;
  if (!(tolerance > 0)) throw std::invalid_argument("zero-set tolerance must be positive");
  copy.tolerance_ = tolerance;
  return copy;
}

bool in_zero_set(const SchemePresentation& scheme, const Eigen::Ref<const Eigen::VectorXd>& p) {
  try {
    return scheme.residual(p) <= scheme.tolerance();
  } catch (const GuardError&) {
    return false;
  }
}

namespace {

struct Polisher {
  const SchemePresentation& scheme;
  std::vector<std::vector<Expr>> ideal_grads;
  std::vector<std::vector<Expr>> region_grads;

  explicit Polisher(const SchemePresentation& s) : scheme(s) {
    for (const auto& g : s.ideal()) ideal_grads.push_back(gradient(g, s.dim()));
    for (const auto& g : s.region()) region_grads.push_back(gradient(g, s.dim()));
  }

  // Gauss-Newton on the stacked violation vector, projected onto the box.
  std::optional<Eigen::VectorXd> polish(Eigen::VectorXd p, const Box& box) const {
    const int n = scheme.dim();
    const auto rows = static_cast<Eigen::Index>(scheme.ideal().size() + scheme.region().size());
    for (int iter = 0; iter < 80; ++iter) {
      if (in_zero_set(scheme, p)) return p;
      Eigen::VectorXd r = Eigen::VectorXd::Zero(rows);
      Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(rows, n);
      Eigen::Index row = 0;
      for (std::size_t k = 0; k < scheme.ideal().size(); ++k, ++row) {
        r[row] = eval(scheme.ideal()[k], p);
        for (int i = 0; i < n; ++i) jac(row, i) = eval(ideal_grads[k][static_cast<std::size_t>(i)], p);
      }
      for (std::size_t k = 0; k < scheme.region().size(); ++k, ++row) {
        const double v = eval(scheme.region()[k], p);
        if (v <= 0) continue;
        r[row] = v;
        for (int i = 0; i < n; ++i) jac(row, i) = eval(region_grads[k][static_cast<std::size_t>(i)], p);
      }
      Eigen::VectorXd step = jac.completeOrthogonalDecomposition().solve(-r);
      if (!step.allFinite() || step.norm() < 1e-15) return std::nullopt;
      p = (p + step).cwiseMax(box.lower).cwiseMin(box.upper);
    }
    return in_zero_set(scheme, p) ? std::optional(p) : std::nullopt;
  }
};

std::vector<Eigen::VectorXd> grid_points(const Box& box, int resolution) {
  const int n = box.dim();
  std::vector<Eigen::VectorXd> pts;
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  while (true) {
    Eigen::VectorXd p(n);
    for (int i = 0; i < n; ++i)
      p[i] = box.lower[i] + (box.upper[i] - box.lower[i]) * idx[static_cast<std::size_t>(i)] / (resolution - 1);
    pts.push_back(std::move(p));
    int axis = n - 1;
    while (axis >= 0 && ++idx[static_cast<std::size_t>(axis)] == resolution) idx[static_cast<std::size_t>(axis--)] = 0;
    if (axis < 0) break;
  }
  return pts;
}

} // namespace

std::vector<Eigen::VectorXd> sample_zero_set(const SchemePresentation& scheme, const Box& box, int resolution) {
  if (box.dim() != scheme.dim()) throw ArityError("sampling box has the wrong dimension");
  if (resolution < 2) throw std::invalid_argument("resolution must be at least 2");
  if ((box.upper - box.lower).minCoeff() < 0) throw std::invalid_argument("empty sampling box");

  const double spacing = (box.upper - box.lower).minCoeff() / (resolution - 1);
  const double merge_radius = 0.25 * spacing;
  std::vector<Eigen::VectorXd> accepted;
  auto is_new = [&](const Eigen::VectorXd& p) {
    return std::none_of(accepted.begin(), accepted.end(), [&](const Eigen::VectorXd& q) {
      return (p - q).lpNorm<Eigen::Infinity>() <= merge_radius;
    });
  };
  auto member = [&](const Eigen::VectorXd& p) {
    try {
      return in_zero_set(scheme, p);
    } catch (const GuardError&) {
      return false;
    }
  };

  const auto grid = grid_points(box, resolution);
  std::vector<const Eigen::VectorXd*> rest;
  for (const auto& p : grid) {
    if (member(p)) {
      if (is_new(p)) accepted.push_back(p);
    } else {
      rest.push_back(&p);
    }
  }
  if (scheme.ideal().empty() && scheme.region().empty()) return accepted;

  const Polisher polisher(scheme);
  for (const auto* p : rest) {
    std::optional<Eigen::VectorXd> q;
    try {
      q = polisher.polish(*p, box);
    } catch (const GuardError&) {
      continue;
    }
    if (q && member(*q) && is_new(*q)) accepted.push_back(std::move(*q));
  }
  return accepted;
}

std::string to_string(Equality e) {
  switch (e) {
  case Equality::EqualCertified:
    return "equal-certified";
  case Equality::DistinctCertified:
    return "distinct-certified";
  case Equality::Unknown:
    return "unknown";
  }
  return "unknown";
}

EqualityVerdict element_equal(const RingElement& a, const RingElement& b, const SampleSpec& spec) {
  if (!a.home || a.home != b.home) throw std::invalid_argument("ring elements live in different rings");
  const SchemePresentation& s = *a.home;
  const int n = s.dim();
  const Expr difference = a.representative - b.representative;

  EqualityVerdict verdict;
  if (difference.is_zero()) {
    verdict.status = Equality::EqualCertified;
    verdict.reason = "representatives agree symbolically";
    return verdict;
  }
  if (s.polynomial_ideal()) {
    if (auto p = as_polynomial(difference, n)) {
      Polynomial nf = s.polynomial_ideal()->normal_form(*p);
      if (nf.is_zero()) {
        verdict.status = Equality::EqualCertified;
        verdict.reason = "normal form of the difference is 0";
        return verdict;
      }
      verdict.normal_form = std::move(nf);
    }
  }

  const Box box = spec.box.value_or(Box::cube(n, -2.0, 2.0));
  const auto samples = sample_zero_set(s, box, spec.resolution);
  const auto grad_f = gradient(difference, n);
  std::vector<std::vector<Expr>> grad_g;
  for (const auto& g : s.ideal()) grad_g.push_back(gradient(g, n));

  for (const auto& p : samples) {
    try {
      const double v = eval(difference, p);
      if (std::abs(v) > 1e-6) {
        verdict.status = Equality::DistinctCertified;
        verdict.witness = p;
        verdict.reason = "difference is nonzero at a point of Z";
        return verdict;
      }
    } catch (const GuardError&) {
      continue;
    }
  }
  for (const auto& p : samples) {
    try {
      Eigen::VectorXd df(n);
      for (int i = 0; i < n; ++i) df[i] = eval(grad_f[static_cast<std::size_t>(i)], p);
      Eigen::VectorXd off = df;
      if (!grad_g.empty()) {
        Eigen::MatrixXd span(n, static_cast<Eigen::Index>(grad_g.size()));
        for (std::size_t j = 0; j < grad_g.size(); ++j)
          for (int i = 0; i < n; ++i) span(i, static_cast<Eigen::Index>(j)) = eval(grad_g[j][static_cast<std::size_t>(i)], p);
        if (span.norm() > 0) off = df - span * span.completeOrthogonalDecomposition().solve(df);
      }
      if (off.norm() > 1e-6 * (1.0 + df.norm())) {
        verdict.status = Equality::DistinctCertified;
        verdict.witness = p;
        verdict.reason = "gradient of the difference leaves the span of the generators' gradients on Z";
        return verdict;
      }
    } catch (const GuardError&) {
      continue;
    }
  }
  verdict.status = Equality::Unknown;
  verdict.reason = verdict.normal_form ? "nonzero normal form but no distinctness witness"
                                       : "no certificate either way";
  return verdict;
}

} // namespace cinfty
