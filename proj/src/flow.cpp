#include "cinfty/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

namespace cinfty {

FlowDomain::FlowDomain(LiftedField field, IntegratorOptions opts, std::vector<DomainRow> rows)
    : field_(std::move(field)), opts_(opts), rows_(std::move(rows)) {}

bool FlowDomain::horizon_complete() const {
  return std::all_of(rows_.begin(), rows_.end(), [](const DomainRow& r) {
    return r.ok() && classify(r.k) == CurveClass::HorizonComplete;
  });
}

FlowDomain FlowDomain::with_interval(std::size_t row, KInterval k) const {
  FlowDomain copy = *this;
  copy.rows_.at(row).k = k;
  return copy;
}

FlowDomain flow_domain(const LiftedField& d, const std::vector<Eigen::VectorXd>& grid, const IntegratorOptions& opts,
                       int jobs) {
  opts.validate();
  std::vector<DomainRow> rows(grid.size());
  auto work = [&](std::size_t i) {
    DomainRow& row = rows[i];
    row.point = grid[i];
    try {
      auto curve = std::make_shared<const IntegralCurve>(integrate_max_curve(d, grid[i], opts));
      row.k = curve->interval();
      row.curve = std::move(curve);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  };
  const std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), grid.size());
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < grid.size(); ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < nthreads; ++k)
      pool.emplace_back([&, k] {
        for (std::size_t i = k; i < grid.size(); i += nthreads) work(i);
      });
    for (auto& th : pool) th.join();
  }
  return FlowDomain(d, opts, std::move(rows));
}

Eigen::VectorXd flow_eval(const LiftedField& d, const Eigen::Ref<const Eigen::VectorXd>& p, double t,
                          const IntegratorOptions& opts) {
  return evaluate_curve(integrate_max_curve(d, p, opts), t);
}

ConvexityReport t_convexity_check(const FlowDomain& w, int subdivisions) {
  if (subdivisions < 1) throw std::invalid_argument("need at least one subdivision");
  const SchemePresentation& scheme = w.scheme();
  const double tol = 10 * scheme.tolerance();
  ConvexityReport report;
  for (std::size_t r = 0; r < w.rows().size(); ++r) {
    const DomainRow& row = w.rows()[r];
    if (!row.ok()) continue;
    std::vector<double> times;
    std::vector<double> as;
    for (double end : {row.k.lower, row.k.upper}) {
      if (end == 0.0) continue;
      for (int i = 1; i <= subdivisions; ++i) {
        // a = 1 only lies in W when the end itself does.
        if (i == subdivisions && !row.k.contains(end)) continue;
        const double a = static_cast<double>(i) / subdivisions;
        times.push_back(a * end);
        as.push_back(a);
      }
    }
    ++report.checked;
    if (times.empty()) continue;
    std::vector<Eigen::VectorXd> states;
    try {
      states = lifted_states(w.field(), row.point, times, w.options());
    } catch (const std::exception&) {
      report.violations.push_back({r, times.back(), as.back(), std::numeric_limits<double>::infinity()});
      continue;
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
      double res;
      try {
        res = scheme.residual(states[i]);
      } catch (const GuardError&) {
        res = std::numeric_limits<double>::infinity();
      }
      if (!(res <= tol)) report.violations.push_back({r, times[i], as[i], res});
    }
  }
  return report;
}

std::string to_string(Membership m) {
  switch (m) {
  case Membership::Member:
    return "member";
  case Membership::NotMember:
    return "not-member";
  case Membership::Unknown:
    return "unknown";
  }
  return "unknown";
}

VarList flow_vars(const VarList& vars) {
  if (vars.index_of("t")) throw std::invalid_argument("scheme variable named 't' clashes with the flow time");
  return vars.with("t");
}

FlowIdealPresentation::FlowIdealPresentation(SchemePtr base, VarList vars, std::vector<Expr> pr,
                                             std::optional<std::vector<Expr>> psi, std::vector<Expr> psi_pullbacks)
    : base_(std::move(base)), vars_(std::move(vars)), pr_(std::move(pr)), psi_(std::move(psi)),
      psi_pullbacks_(std::move(psi_pullbacks)) {}

std::vector<Expr> FlowIdealPresentation::generators() const {
  std::vector<Expr> out = pr_;
  out.insert(out.end(), psi_pullbacks_.begin(), psi_pullbacks_.end());
  return out;
}

Membership FlowIdealPresentation::iprime_member(const Expr& g, const FlowDomain& w, int samples_per_row) const {
  const int n = base_->dim();
  if (g.arity() > n + 1) throw ArityError("expression references a variable outside (x, t)");
  Eigen::VectorXd xt(n + 1);
  for (const auto& row : w.rows()) {
    if (!row.ok()) continue;
    const KInterval& k = row.k;
    for (int i = 0; i < std::max(samples_per_row, 1); ++i) {
      double t = samples_per_row <= 1 ? 0.0 : k.lower + (k.upper - k.lower) * i / (samples_per_row - 1);
      if (!k.contains(t)) t = std::nextafter(t, 0.0);
      xt.head(n) = (*row.curve)(t);
      xt[n] = t;
      double v;
      try {
        v = std::abs(eval(g, xt));
      } catch (const GuardError&) {
        return Membership::Unknown;
      }
      if (!(v <= base_->tolerance())) return Membership::NotMember;
    }
  }
  const Expr at_zero = substitute(g, n, Expr::constant(0));
  if (at_zero.is_zero()) return Membership::Member;
  if (base_->polynomial_ideal()) {
    if (auto p = as_polynomial(at_zero, n))
      return base_->polynomial_ideal()->contains(*p) ? Membership::Member : Membership::NotMember;
  }
  return Membership::Unknown;
}

Eigen::VectorXd evaluate_psi(const std::vector<Expr>& psi, const Eigen::Ref<const Eigen::VectorXd>& p, double t) {
  Eigen::VectorXd xt(p.size() + 1);
  xt.head(p.size()) = p;
  xt[p.size()] = t;
  Eigen::VectorXd out(static_cast<Eigen::Index>(psi.size()));
  for (std::size_t i = 0; i < psi.size(); ++i) out[static_cast<Eigen::Index>(i)] = eval(psi[i], xt);
  return out;
}

FlowIdealPresentation flow_ideal(const SchemePtr& s, const std::optional<std::vector<Expr>>& psi,
                                 const SampleSpec& spec) {
  const int n = s->dim();
  VarList vars = flow_vars(s->vars());
  std::vector<Expr> pr = s->ideal(); // variable indices 0..n-1 carry over unchanged
  std::vector<Expr> pulled;
  if (psi) {
    if (static_cast<int>(psi->size()) != n)
      throw ArityError("closed-form flow has " + std::to_string(psi->size()) + " components, expected " +
                       std::to_string(n));
    for (const auto& c : *psi)
      if (c.arity() > n + 1) throw ArityError("closed-form flow references an unknown variable");
    // Ψ(x, 0) = x: exact when the substitution cancels, else sampled on Z.
    std::vector<Expr> pending;
    std::vector<int> pending_index;
    for (int i = 0; i < n; ++i) {
      const Expr diff0 = substitute((*psi)[static_cast<std::size_t>(i)], n, Expr::constant(0)) - Expr::variable(i);
      if (!diff0.is_zero()) {
        pending.push_back(diff0);
        pending_index.push_back(i);
      }
    }
    if (!pending.empty()) {
      const auto pts = sample_zero_set(*s, spec.box.value_or(Box::cube(n, -2.0, 2.0)), spec.resolution);
      for (const auto& p : pts)
        for (std::size_t j = 0; j < pending.size(); ++j) {
          const double v = std::abs(eval(pending[j], p));
          if (!(v <= 1e-9 * (1 + p.lpNorm<Eigen::Infinity>())))
            throw std::invalid_argument("closed-form flow fails Psi(x, 0) = x in component " +
                                        s->vars().name(pending_index[j]));
        }
    }
    for (const auto& g : s->ideal()) pulled.push_back(apply_operation(g, *psi));
  }
  return FlowIdealPresentation(s, std::move(vars), std::move(pr), psi, std::move(pulled));
}

ClosedFormCheck validate_closed_form(const LiftedField& d, const std::vector<Expr>& psi,
                                     const std::vector<Eigen::VectorXd>& points, const std::vector<double>& times,
                                     const IntegratorOptions& opts, double tolerance) {
  ClosedFormCheck check;
  for (const auto& p : points) {
    const IntegralCurve curve = integrate_max_curve(d, p, opts);
    for (double t : times) {
      if (!curve.interval().contains(t)) continue;
      const double dev = (curve(t) - evaluate_psi(psi, p, t)).lpNorm<Eigen::Infinity>();
      check.max_deviation = std::max(check.max_deviation, std::isnan(dev) ? std::numeric_limits<double>::infinity() : dev);
      ++check.samples;
    }
  }
  check.passed = check.samples > 0 && check.max_deviation <= tolerance;
  return check;
}

void write_domain_csv(std::ostream& out, const FlowDomain& w) {
  const int n = w.scheme().dim();
  for (int i = 1; i <= n; ++i) out << 'x' << i << ',';
  out << "Kp_lo,Kp_hi,lo_closed,hi_closed,class\n";
  for (const auto& row : w.rows()) {
    for (int i = 0; i < n; ++i) out << format_double(row.point[i]) << ',';
    if (!row.ok()) {
      out << "nan,nan,false,false,error\n";
      continue;
    }
    out << format_double(row.k.lower) << ',' << format_double(row.k.upper) << ','
        << (row.k.lower_closed() ? "true" : "false") << ',' << (row.k.upper_closed() ? "true" : "false") << ','
        << to_string(classify(row.k)) << '\n';
  }
}

} // namespace cinfty
