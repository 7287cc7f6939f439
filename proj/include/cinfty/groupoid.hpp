#pragma once

// Flow groupoid of a complete field: arrows (p, t) with source p, target
// Ψ(p, t), unit (q, 0), product (p2, t2)·(p1, t1) = (p1, t1 + t2).

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cinfty/flow.hpp"

namespace cinfty {

struct Arrow {
  Eigen::VectorXd p;
  double t = 0.0;
};

/// Ψ(p, t); may throw OutsideInterval.
using FlowMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)>;

class FlowGroupoid {
public:
  explicit FlowGroupoid(FlowMap psi, double composability_tol = 1e-6,
                        std::function<void(const Eigen::VectorXd&, double)> time_check = {});

  /// Target map from the integrator.
  static FlowGroupoid numeric(const LiftedField& d, const IntegratorOptions& opts = {},
                              double composability_tol = 1e-6);
  /// Target map from closed-form expressions over (x, t).
  static FlowGroupoid closed_form(std::vector<Expr> psi, double composability_tol = 1e-6);

  double composability_tolerance() const { return tol_; }

  Eigen::VectorXd source(const Arrow& a) const { return a.p; }
  Eigen::VectorXd target(const Arrow& a) const;
  Arrow unit(const Eigen::VectorXd& q) const { return {q, 0.0}; }
  /// (Ψ(p, t), -t); throws OutsideInterval when -t is not in K at the target.
  Arrow inverse(const Arrow& a) const;
  /// a2 ∘ a1; throws NotComposable when |p2 - Ψ(p1, t1)| exceeds the tolerance.
  Arrow compose(const Arrow& a2, const Arrow& a1) const;
  /// |p2 - Ψ(p1, t1)|_inf.
  double composability_residual(const Arrow& a2, const Arrow& a1) const;

  const FlowMap& flow() const { return psi_; }

private:
  FlowMap psi_;
  double tol_;
  std::function<void(const Eigen::VectorXd&, double)> time_check_;
};

struct AxiomResidual {
  std::string name;
  double max = 0.0;
};

struct GroupoidReport {
  std::vector<AxiomResidual> residuals; // fixed order, see check_axioms
  int samples = 0;
  double tolerance = 0.0;
  bool pass = false;
  std::string failure; // first exception text, if any

  double residual(const std::string& name) const;
};

/// Residuals, in order: flow-law, associativity, left-unit, right-unit,
/// left-inverse, right-inverse, source-of-composite, target-of-composite.
/// Pairs and triples are formed from consecutive arrows: a2 is anchored at
/// the target of a1 with the time of the next arrow, and so on.
GroupoidReport check_axioms(const FlowGroupoid& g, const std::vector<Arrow>& arrows, double tol);

/// Arrows anchored at `points` (cycled in order) with times uniform in
/// [-max_time, max_time], reproducible from `seed`.
std::vector<Arrow> sample_arrows(const std::vector<Eigen::VectorXd>& points, int count, std::uint64_t seed,
                                 double max_time = 5.0);

/// Throws NotComplete naming the first point whose K_p is not horizon-complete.
void require_complete(const FlowDomain& w);

struct InclusionReport {
  double pr_residual = 0.0;  // g(pr(m(a2, a1))) vs g(pr(a1))
  double psi_residual = 0.0; // g(Ψ(m(a2, a1))) vs g(Ψ(a2))
  int pairs = 0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Pointwise form of the two pullback identities along m, for each ideal
/// generator and each composable pair built from consecutive arrows.
InclusionReport check_ideal_inclusions(const SchemePresentation& s, const std::vector<Expr>& psi,
                                       const std::vector<Arrow>& arrows, double tol = 1e-9);

void write_groupoid_report(std::ostream& out, const GroupoidReport& r);

} // namespace cinfty
