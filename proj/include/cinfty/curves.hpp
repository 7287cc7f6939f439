#pragma once

// Maximal integral curves on Z_J: integrate the lifted field V on R^n and
// keep the connected component of 0 in the set of times where the
// trajectory stays on the zero set.

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cinfty/derivation.hpp"
#include "cinfty/ode/dopri5.hpp"

namespace cinfty {

struct IntegratorOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double horizon = 100.0;   // both directions
  double probe_step = 1e-6; // singleton probes at ±h, ±2h, ±4h
  double event_tol = 1e-10; // bisection width for boundary times
  long max_steps = 1'000'000;
  int checkpoints = 16;     // membership checks per accepted step
  bool count_reentries = true;

  void validate() const;
};

/// How an end of K_p was determined.
enum class EndKind {
  Closed,  // membership failure localized; boundary state lies on Z
  Open,    // the lifted ODE stopped (blow-up / underflow) while still on Z
  Horizon, // reached the integration horizon without leaving Z
};

struct KInterval {
  double lower = 0.0;
  double upper = 0.0;
  EndKind lower_end = EndKind::Closed;
  EndKind upper_end = EndKind::Closed;

  bool contains(double t) const;
  bool lower_closed() const { return lower_end == EndKind::Closed; }
  bool upper_closed() const { return upper_end == EndKind::Closed; }
};

enum class CurveClass { Singleton, Closed, HalfOpen, Open, HorizonComplete };

std::string to_string(CurveClass c);
CurveClass classify(const KInterval& k);

/// Dense trajectory in one time direction, parameterized by |t|.
struct Branch {
  std::vector<ode::DenseStep<double>> steps;
  double extent = 0.0;
  long steps_taken = 0;
  int reentries = 0;
  std::string stop_reason;

  Eigen::VectorXd at(double tau) const;
};

struct CurveDiagnostics {
  long forward_steps = 0;
  long backward_steps = 0;
  int forward_reentries = 0;
  int backward_reentries = 0;
  std::string forward_stop;
  std::string backward_stop;
};

class IntegralCurve {
public:
  IntegralCurve(Eigen::VectorXd base, KInterval k, Branch forward, Branch backward, CurveDiagnostics diag);

  const Eigen::VectorXd& base_point() const { return base_; }
  const KInterval& interval() const { return k_; }
  CurveClass classification() const { return classify(k_); }
  const CurveDiagnostics& diagnostics() const { return diag_; }
  const Branch& forward() const { return forward_; }
  const Branch& backward() const { return backward_; }

  /// Dense-output value; throws OutsideInterval for t outside K_p.
  Eigen::VectorXd operator()(double t) const;

private:
  Eigen::VectorXd base_;
  KInterval k_;
  Branch forward_;
  Branch backward_;
  CurveDiagnostics diag_;
};

IntegralCurve integrate_max_curve(const LiftedField& d, const Eigen::Ref<const Eigen::VectorXd>& p,
                                  const IntegratorOptions& opts = {});

Eigen::VectorXd evaluate_curve(const IntegralCurve& c, double t);

CurveClass classify_K(const IntegralCurve& c);

/// Unrestricted solution of x' = V(x) through p, in the direction of sign(extent),
/// up to |extent|. Ignores the zero set entirely.
Branch integrate_lifted(const LiftedField& d, const Eigen::Ref<const Eigen::VectorXd>& p, double extent,
                        const IntegratorOptions& opts = {});

/// State of the unrestricted lifted flow at each requested time.
std::vector<Eigen::VectorXd> lifted_states(const LiftedField& d, const Eigen::Ref<const Eigen::VectorXd>& p,
                                           const std::vector<double>& times, const IntegratorOptions& opts = {});

/// CSV "t,x1,...,xn,residual": K_p endpoints plus a uniform interior grid,
/// `samples` rows in total (one row for a singleton).
void write_curve_csv(std::ostream& out, const IntegralCurve& c, const SchemePresentation& scheme, int samples);

/// Shortest round-trip decimal form.
std::string format_double(double v);

} // namespace cinfty
