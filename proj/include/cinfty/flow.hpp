#pragma once

// The flow of a lifted field on Z: domain W = ⋃ {p} × K_p, evaluation,
// and the generators of the flow ideal on R^n × R.

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cinfty/curves.hpp"

namespace cinfty {

struct DomainRow {
  Eigen::VectorXd point;
  KInterval k;
  std::shared_ptr<const IntegralCurve> curve; // null when integration failed
  std::string error;

  bool ok() const { return curve != nullptr; }
};

class FlowDomain {
public:
  FlowDomain(LiftedField field, IntegratorOptions opts, std::vector<DomainRow> rows);

  const LiftedField& field() const { return field_; }
  const SchemePresentation& scheme() const { return field_.scheme(); }
  const IntegratorOptions& options() const { return opts_; }
  double horizon() const { return opts_.horizon; }
  const std::vector<DomainRow>& rows() const { return rows_; }

  /// True when every row integrated and reached the horizon both ways.
  bool horizon_complete() const;

  /// Copy with one row's interval replaced (fault injection, tests).
  FlowDomain with_interval(std::size_t row, KInterval k) const;

private:
  LiftedField field_;
  IntegratorOptions opts_;
  std::vector<DomainRow> rows_;
};

/// One integrate_max_curve per grid point; `jobs` > 1 spreads points over
/// threads. Row order always matches the grid.
FlowDomain flow_domain(const LiftedField& d, const std::vector<Eigen::VectorXd>& grid,
                       const IntegratorOptions& opts = {}, int jobs = 1);

Eigen::VectorXd flow_eval(const LiftedField& d, const Eigen::Ref<const Eigen::VectorXd>& p, double t,
                          const IntegratorOptions& opts = {});

struct ConvexityViolation {
  std::size_t row;
  double t;
  double a;
  double residual;
};

struct ConvexityReport {
  std::size_t checked = 0;
  std::vector<ConvexityViolation> violations;
};

/// For each row and each extreme time t of its K_p, checks that the lifted
/// trajectory at a·t lies on Z (tolerance 10·ε) for a on a uniform grid of
/// [0, 1]. Recomputes trajectories, so it sees through a tampered table.
ConvexityReport t_convexity_check(const FlowDomain& w, int subdivisions);

enum class Membership { Member, NotMember, Unknown };

std::string to_string(Membership m);

/// Generators over (x_1..x_n, t): pr*g = g and, when a closed form is
/// supplied, Ψ*g = g(Ψ). The ideal I'_W is a predicate, not a list.
class FlowIdealPresentation {
public:
  FlowIdealPresentation(SchemePtr base, VarList vars, std::vector<Expr> pr, std::optional<std::vector<Expr>> psi,
                        std::vector<Expr> psi_pullbacks);

  const SchemePtr& base() const { return base_; }
  /// x_1..x_n, t
  const VarList& vars() const { return vars_; }
  const std::vector<Expr>& pr_generators() const { return pr_; }
  const std::optional<std::vector<Expr>>& psi() const { return psi_; }
  const std::vector<Expr>& psi_generators() const { return psi_pullbacks_; }
  std::vector<Expr> generators() const;

  /// g ∈ I'_W: g vanishes on sampled W (max |g| ≤ ε) and g(x, 0) ∈ J.
  /// The second condition is decided by normal form when g(x, 0) is
  /// polynomial, by exact cancellation otherwise (Unknown if neither).
  Membership iprime_member(const Expr& g, const FlowDomain& w, int samples_per_row = 11) const;

private:
  SchemePtr base_;
  VarList vars_;
  std::vector<Expr> pr_;
  std::optional<std::vector<Expr>> psi_;
  std::vector<Expr> psi_pullbacks_;
};

/// `psi` components are over (x_1..x_n, t); t is variable index n.
/// Throws std::invalid_argument when Ψ(x, 0) = x fails on sampled Z.
FlowIdealPresentation flow_ideal(const SchemePtr& s, const std::optional<std::vector<Expr>>& psi,
                                 const SampleSpec& spec = {});

/// Name used for the time variable; must not clash with scheme variables.
VarList flow_vars(const VarList& vars);

struct ClosedFormCheck {
  double max_deviation = 0.0;
  int samples = 0;
  bool passed = false;
};

/// Compares a closed-form Ψ with the numeric flow at sampled Z points and
/// times in `times` ∩ K_p.
ClosedFormCheck validate_closed_form(const LiftedField& d, const std::vector<Expr>& psi,
                                     const std::vector<Eigen::VectorXd>& points, const std::vector<double>& times,
                                     const IntegratorOptions& opts = {}, double tolerance = 1e-6);

/// Evaluates closed-form Ψ at (p, t).
Eigen::VectorXd evaluate_psi(const std::vector<Expr>& psi, const Eigen::Ref<const Eigen::VectorXd>& p, double t);

/// CSV "x1,...,xn,Kp_lo,Kp_hi,lo_closed,hi_closed,class"; failed rows carry
/// class "error" and NaN bounds.
void write_domain_csv(std::ostream& out, const FlowDomain& w);

} // namespace cinfty
