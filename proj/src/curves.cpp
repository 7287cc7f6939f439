#include "cinfty/curves.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>

namespace cinfty {

void IntegratorOptions::validate() const {
  if (!(rel_tol > 0 && abs_tol > 0 && horizon > 0 && probe_step > 0 && event_tol > 0))
    throw std::invalid_argument("integrator tolerances, horizon and probe step must be positive");
  if (!std::isfinite(horizon)) throw std::invalid_argument("integration horizon must be finite");
  if (max_steps <= 0 || checkpoints <= 0) throw std::invalid_argument("step and checkpoint counts must be positive");
}

bool KInterval::contains(double t) const {
  if (t == 0.0) return true;
  const bool above = lower_end == EndKind::Open ? t > lower : t >= lower;
  const bool below = upper_end == EndKind::Open ? t < upper : t <= upper;
  return above && below;
}

std::string to_string(CurveClass c) {
  switch (c) {
  case CurveClass::Singleton:
    return "singleton";
  case CurveClass::Closed:
    return "closed";
  case CurveClass::HalfOpen:
    return "half-open";
  case CurveClass::Open:
    return "open";
  case CurveClass::HorizonComplete:
    return "horizon-complete";
  }
  return "open";
}

CurveClass classify(const KInterval& k) {
  if (k.lower == 0.0 && k.upper == 0.0) return CurveClass::Singleton;
  if (k.lower_end == EndKind::Horizon && k.upper_end == EndKind::Horizon) return CurveClass::HorizonComplete;
  const int closed = (k.lower_closed() ? 1 : 0) + (k.upper_closed() ? 1 : 0);
  if (closed == 2) return CurveClass::Closed;
  return closed == 1 ? CurveClass::HalfOpen : CurveClass::Open;
}

Eigen::VectorXd Branch::at(double tau) const {
  if (steps.empty()) throw OutsideInterval("no trajectory data in this direction");
  auto it = std::upper_bound(steps.begin(), steps.end(), tau,
                             [](double t, const ode::DenseStep<double>& s) { return t < s.t0; });
  if (it != steps.begin()) --it;
  return (*it)(std::clamp(tau, it->t0, it->t1()));
}

IntegralCurve::IntegralCurve(Eigen::VectorXd base, KInterval k, Branch forward, Branch backward, CurveDiagnostics diag)
    : base_(std::move(base)), k_(k), forward_(std::move(forward)), backward_(std::move(backward)),
      diag_(std::move(diag)) {}

Eigen::VectorXd IntegralCurve::operator()(double t) const {
  if (t == 0.0) return base_;
  if (!k_.contains(t))
    throw OutsideInterval("t = " + format_double(t) + " lies outside K_p = [" + format_double(k_.lower) + ", " +
                          format_double(k_.upper) + "]");
  return t > 0 ? forward_.at(t) : backward_.at(-t);
}

namespace {

using Rhs = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

Rhs directed_rhs(const LiftedField& d, double sign) {
  return [&d, sign](const Eigen::VectorXd& y) -> Eigen::VectorXd { return sign * d(y); };
}

ode::Dopri5Options<double> solver_options(const IntegratorOptions& opts) {
  return {opts.rel_tol, opts.abs_tol, opts.max_steps};
}

std::string describe(ode::StepResult r) {
  switch (r) {
  case ode::StepResult::Accepted:
    return "accepted";
  case ode::StepResult::Finished:
    return "horizon";
  case ode::StepResult::StepSizeUnderflow:
    return "step-size underflow";
  case ode::StepResult::NonFinite:
    return "non-finite state";
  case ode::StepResult::MaxSteps:
    return "step count exceeded";
  }
  return "unknown";
}

struct BranchResult {
  Branch branch;
  EndKind end = EndKind::Closed;
};

BranchResult integrate_direction(const LiftedField& d, const Eigen::VectorXd& p, double sign,
                                 const IntegratorOptions& opts) {
  const SchemePresentation& scheme = d.scheme();
  auto member = [&](const Eigen::VectorXd& y) {
    try {
      return scheme.residual(y) <= scheme.tolerance();
    } catch (const GuardError&) {
      return false;
    }
  };
  const Rhs f = directed_rhs(d, sign);
  BranchResult result;

  int probes_on_z = 0;
  for (double h : {opts.probe_step, 2 * opts.probe_step, 4 * opts.probe_step}) {
    try {
      if (member(ode::dopri5_single_step<double>(f, p, h))) ++probes_on_z;
    } catch (const GuardError&) {
    }
  }
  if (probes_on_z == 0) {
    result.branch.stop_reason = "probes left Z";
    return result;
  }

  ode::Dopri5<double> solver(f, solver_options(opts));
  solver.reset(0.0, p, opts.horizon);
  Branch& br = result.branch;
  bool exited = false;
  bool inside = true;
  double last_good = 0.0;
  ode::DenseStep<double> step;
  while (true) {
    ode::StepResult r;
    try {
      r = solver.step(step);
    } catch (const GuardError& err) {
      if (!exited) throw;
      br.stop_reason += std::string("; re-entry scan stopped: ") + err.what();
      break;
    }
    if (r != ode::StepResult::Accepted) {
      br.steps_taken = solver.steps();
      if (exited) break;
      if (r == ode::StepResult::MaxSteps) throw IntegrationError("step count exceeded before leaving Z");
      br.extent = r == ode::StepResult::Finished ? opts.horizon : solver.time();
      result.end = r == ode::StepResult::Finished ? EndKind::Horizon : EndKind::Open;
      br.stop_reason = describe(r);
      break;
    }
    if (exited) {
      for (int k = 1; k <= opts.checkpoints; ++k) {
        const double tau = k == opts.checkpoints ? step.t1() : step.t0 + step.h * k / opts.checkpoints;
        const bool now = member(step(tau));
        if (now && !inside) ++br.reentries;
        inside = now;
      }
      continue;
    }
    for (int k = 1; k <= opts.checkpoints && !exited; ++k) {
      const double tau = k == opts.checkpoints ? step.t1() : step.t0 + step.h * k / opts.checkpoints;
      if (member(step(tau))) {
        last_good = tau;
        continue;
      }
      // First membership failure: localize the boundary on the dense output.
      double lo = std::max(last_good, step.t0);
      double hi = tau;
      while (hi - lo > opts.event_tol) {
        const double mid = 0.5 * (lo + hi);
        (member(step(mid)) ? lo : hi) = mid;
      }
      exited = true;
      inside = false;
      br.extent = lo;
      result.end = EndKind::Closed;
      br.stop_reason = "left Z";
      for (int j = k + 1; j <= opts.checkpoints; ++j) {
        const double t2 = j == opts.checkpoints ? step.t1() : step.t0 + step.h * j / opts.checkpoints;
        const bool now = member(step(t2));
        if (now && !inside) ++br.reentries;
        inside = now;
      }
    }
    br.steps.push_back(step);
    if (!exited) br.extent = step.t1();
    if (exited && !opts.count_reentries) {
      br.steps_taken = solver.steps();
      break;
    }
  }
  if (br.steps_taken == 0) br.steps_taken = solver.steps();
  return result;
}

} // namespace

IntegralCurve integrate_max_curve(const LiftedField& d, const Eigen::Ref<const Eigen::VectorXd>& p_in,
                                  const IntegratorOptions& opts) {
  opts.validate();
  const Eigen::VectorXd p = p_in;
  if (p.size() != d.dim()) throw ArityError("base point has the wrong dimension");
  if (!in_zero_set(d.scheme(), p)) throw NotOnZeroSet("base point is not on the zero set");

  BranchResult fwd = integrate_direction(d, p, 1.0, opts);
  BranchResult bwd = integrate_direction(d, p, -1.0, opts);

  KInterval k;
  k.upper = fwd.branch.extent;
  k.upper_end = fwd.end;
  k.lower = -bwd.branch.extent;
  k.lower_end = bwd.end;

  CurveDiagnostics diag;
  diag.forward_steps = fwd.branch.steps_taken;
  diag.backward_steps = bwd.branch.steps_taken;
  diag.forward_reentries = fwd.branch.reentries;
  diag.backward_reentries = bwd.branch.reentries;
  diag.forward_stop = fwd.branch.stop_reason;
  diag.backward_stop = bwd.branch.stop_reason;
  return IntegralCurve(p, k, std::move(fwd.branch), std::move(bwd.branch), std::move(diag));
}

Eigen::VectorXd evaluate_curve(const IntegralCurve& c, double t) { return c(t); }

CurveClass classify_K(const IntegralCurve& c) { return c.classification(); }

Branch integrate_lifted(const LiftedField& d, const Eigen::Ref<const Eigen::VectorXd>& p, double extent,
                        const IntegratorOptions& opts) {
  opts.validate();
  Branch br;
  if (extent == 0.0) return br;
  const Rhs f = directed_rhs(d, extent > 0 ? 1.0 : -1.0);
  ode::Dopri5<double> solver(f, solver_options(opts));
  solver.reset(0.0, p, std::abs(extent));
  ode::DenseStep<double> step;
  while (true) {
    const auto r = solver.step(step);
    if (r != ode::StepResult::Accepted) {
      br.stop_reason = describe(r);
      if (r != ode::StepResult::Finished)
        throw IntegrationError("lifted flow stopped early: " + br.stop_reason);
      break;
    }
    br.steps.push_back(step);
    br.extent = step.t1();
  }
  br.steps_taken = solver.steps();
  return br;
}

std::vector<Eigen::VectorXd> lifted_states(const LiftedField& d, const Eigen::Ref<const Eigen::VectorXd>& p,
                                           const std::vector<double>& times, const IntegratorOptions& opts) {
  double t_max = 0.0;
  double t_min = 0.0;
  for (double t : times) {
    t_max = std::max(t_max, t);
    t_min = std::min(t_min, t);
  }
  const Branch fwd = integrate_lifted(d, p, t_max, opts);
  const Branch bwd = integrate_lifted(d, p, t_min, opts);
  std::vector<Eigen::VectorXd> out;
  out.reserve(times.size());
  for (double t : times) {
    if (t == 0.0)
      out.emplace_back(p);
    else
      out.push_back(t > 0 ? fwd.at(t) : bwd.at(-t));
  }
  return out;
}

std::string format_double(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_curve_csv(std::ostream& out, const IntegralCurve& c, const SchemePresentation& scheme, int samples) {
  const auto n = c.base_point().size();
  out << "t";
  for (Eigen::Index i = 1; i <= n; ++i) out << ",x" << i;
  out << ",residual\n";
  const KInterval& k = c.interval();
  std::vector<double> times;
  if (c.classification() == CurveClass::Singleton || samples <= 1) {
    times.push_back(0.0);
  } else {
    for (int i = 0; i < samples; ++i)
      times.push_back(i == samples - 1 ? k.upper : k.lower + (k.upper - k.lower) * i / (samples - 1));
  }
  for (double t : times) {
    // Open ends carry no state; nudge inward by one ulp.
    if (!k.contains(t)) t = t > 0 ? std::nextafter(t, 0.0) : std::nextafter(t, 0.0);
    const Eigen::VectorXd y = c(t);
    out << format_double(t);
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << format_double(y[i]);
    double residual;
    try {
      residual = scheme.residual(y);
    } catch (const GuardError&) {
      residual = std::numeric_limits<double>::infinity();
    }
    out << ',' << format_double(residual) << '\n';
  }
}

} // namespace cinfty
