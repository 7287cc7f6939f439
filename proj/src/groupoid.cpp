#include "cinfty/groupoid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

namespace cinfty {

namespace {

double dist(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double d = (a - b).lpNorm<Eigen::Infinity>();
  return std::isnan(d) ? std::numeric_limits<double>::infinity() : d;
}

double arrow_dist(const Arrow& a, const Arrow& b) { return std::max(dist(a.p, b.p), std::abs(a.t - b.t)); }

// Product without the composability gate; the residual is returned alongside.
std::pair<Arrow, double> multiply(const FlowGroupoid& g, const Arrow& a2, const Arrow& a1) {
  return {Arrow{a1.p, a1.t + a2.t}, g.composability_residual(a2, a1)};
}

} // namespace

FlowGroupoid::FlowGroupoid(FlowMap psi, double composability_tol,
                           std::function<void(const Eigen::VectorXd&, double)> time_check)
    : psi_(std::move(psi)), tol_(composability_tol), time_check_(std::move(time_check)) {}

FlowGroupoid FlowGroupoid::numeric(const LiftedField& d, const IntegratorOptions& opts, double composability_tol) {
  auto psi = [d, opts](const Eigen::VectorXd& p, double t) { return flow_eval(d, p, t, opts); };
  auto check = [d, opts](const Eigen::VectorXd& q, double t) {
    const IntegralCurve c = integrate_max_curve(d, q, opts);
    if (!c.interval().contains(t))
      throw OutsideInterval("inverse time " + format_double(t) + " lies outside K at the target point");
  };
  return FlowGroupoid(psi, composability_tol, check);
}

FlowGroupoid FlowGroupoid::closed_form(std::vector<Expr> psi, double composability_tol) {
  return FlowGroupoid([psi = std::move(psi)](const Eigen::VectorXd& p, double t) { return evaluate_psi(psi, p, t); },
                      composability_tol);
}

Eigen::VectorXd FlowGroupoid::target(const Arrow& a) const { return psi_(a.p, a.t); }

Arrow FlowGroupoid::inverse(const Arrow& a) const {
  Eigen::VectorXd q = target(a);
  if (time_check_) time_check_(q, -a.t);
  return {std::move(q), -a.t};
}

double FlowGroupoid::composability_residual(const Arrow& a2, const Arrow& a1) const {
  return dist(a2.p, target(a1));
}

Arrow FlowGroupoid::compose(const Arrow& a2, const Arrow& a1) const {
  const double r = composability_residual(a2, a1);
  if (!(r <= tol_))
    throw NotComposable("arrows are not composable: source of the second misses the target of the first by " +
                            format_double(r),
                        r);
  return {a1.p, a1.t + a2.t};
}

double GroupoidReport::residual(const std::string& name) const {
  for (const auto& r : residuals)
    if (r.name == name) return r.max;
  throw std::out_of_range("no axiom named " + name);
}

GroupoidReport check_axioms(const FlowGroupoid& g, const std::vector<Arrow>& arrows, double tol) {
  GroupoidReport report;
  report.tolerance = tol;
  report.samples = static_cast<int>(arrows.size());
  double flow_law = 0, assoc = 0, left_unit = 0, right_unit = 0, left_inv = 0, right_inv = 0, src = 0, tgt = 0;
  const std::size_t n = arrows.size();
  for (std::size_t i = 0; i < n; ++i) {
    try {
      const Arrow& a1 = arrows[i];
      const Arrow a2{g.target(a1), arrows[(i + 1) % n].t};
      const Arrow a3{g.target(a2), arrows[(i + 2) % n].t};

      flow_law = std::max(flow_law, dist(g.flow()(a1.p, a1.t + a2.t), g.target(a2)));

      const auto [m21, r21] = multiply(g, a2, a1);
      src = std::max({src, r21, dist(g.source(m21), g.source(a1))});
      tgt = std::max({tgt, r21, dist(g.target(m21), g.target(a2))});

      const auto [left, r_left] = multiply(g, a3, m21);
      const auto [m32, r32] = multiply(g, a3, a2);
      const auto [right, r_right] = multiply(g, m32, a1);
      assoc = std::max({assoc, r_left, r32, r_right, arrow_dist(left, right)});

      const Arrow u_target = g.unit(g.target(a1));
      const auto [lu, r_lu] = multiply(g, u_target, a1);
      left_unit = std::max({left_unit, r_lu, dist(g.target(u_target), u_target.p), arrow_dist(lu, a1)});
      const Arrow u_source = g.unit(g.source(a1));
      const auto [ru, r_ru] = multiply(g, a1, u_source);
      right_unit = std::max({right_unit, r_ru, arrow_dist(ru, a1)});

      const Arrow inv = g.inverse(a1);
      const auto [li, r_li] = multiply(g, inv, a1);
      left_inv = std::max({left_inv, r_li, arrow_dist(li, g.unit(a1.p))});
      const auto [ri, r_ri] = multiply(g, a1, inv);
      right_inv = std::max({right_inv, r_ri, arrow_dist(ri, g.unit(inv.p))});
    } catch (const std::exception& e) {
      if (report.failure.empty()) report.failure = e.what();
    }
  }
  report.residuals = {{"flow-law", flow_law},          {"associativity", assoc},
                      {"left-unit", left_unit},        {"right-unit", right_unit},
                      {"left-inverse", left_inv},      {"right-inverse", right_inv},
                      {"source-of-composite", src},    {"target-of-composite", tgt}};
  report.pass = report.failure.empty() &&
                std::all_of(report.residuals.begin(), report.residuals.end(),
                            [tol](const AxiomResidual& r) { return r.max <= tol; });
  return report;
}

std::vector<Arrow> sample_arrows(const std::vector<Eigen::VectorXd>& points, int count, std::uint64_t seed,
                                 double max_time) {
  if (points.empty()) throw std::invalid_argument("no base points to anchor arrows at");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, points.size() - 1);
  std::uniform_real_distribution<double> time(-max_time, max_time);
  std::vector<Arrow> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) {
    const std::size_t k = pick(rng);
    out.push_back({points[k], time(rng)});
  }
  return out;
}

void require_complete(const FlowDomain& w) {
  for (const auto& row : w.rows()) {
    std::string where = "(";
    for (Eigen::Index i = 0; i < row.point.size(); ++i) where += (i ? "," : "") + format_double(row.point[i]);
    where += ")";
    if (!row.ok()) throw NotComplete("integration failed at " + where + ": " + row.error);
    if (classify(row.k) != CurveClass::HorizonComplete)
      throw NotComplete("field is not complete on the sampled zero set: K_p at " + where + " is " +
                        to_string(classify(row.k)) + " [" + format_double(row.k.lower) + ", " +
                        format_double(row.k.upper) + "]");
  }
}

InclusionReport check_ideal_inclusions(const SchemePresentation& s, const std::vector<Expr>& psi,
                                       const std::vector<Arrow>& arrows, double tol) {
  if (static_cast<int>(psi.size()) != s.dim()) throw std::invalid_argument("closed-form flow is missing or malformed");
  InclusionReport report;
  report.tolerance = tol;
  const std::size_t n = arrows.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Arrow& a1 = arrows[i];
    const Arrow a2{evaluate_psi(psi, a1.p, a1.t), arrows[(i + 1) % n].t};
    const Arrow m{a1.p, a1.t + a2.t};
    const Eigen::VectorXd psi_m = evaluate_psi(psi, m.p, m.t);
    const Eigen::VectorXd psi_a2 = evaluate_psi(psi, a2.p, a2.t);
    for (const auto& g : s.ideal()) {
      const double pr = std::abs(eval(g, m.p) - eval(g, a1.p));
      const double ps = std::abs(eval(g, psi_m) - eval(g, psi_a2));
      report.pr_residual = std::max(report.pr_residual, std::isnan(pr) ? std::numeric_limits<double>::infinity() : pr);
      report.psi_residual = std::max(report.psi_residual, std::isnan(ps) ? std::numeric_limits<double>::infinity() : ps);
    }
    ++report.pairs;
  }
  report.pass = report.pr_residual <= tol && report.psi_residual <= tol;
  return report;
}

void write_groupoid_report(std::ostream& out, const GroupoidReport& r) {
  out << "axiom,max_residual\n";
  for (const auto& a : r.residuals) out << a.name << ',' << format_double(a.max) << '\n';
  out << "samples," << r.samples << '\n';
  out << "tolerance," << format_double(r.tolerance) << '\n';
  if (!r.failure.empty()) out << "failure," << r.failure << '\n';
  out << "verdict," << (r.pass ? "pass" : "fail") << '\n';
}

} // namespace cinfty
