#pragma once

// Dormand-Prince 5(4) with the classical 4th-order continuous extension,
// for autonomous systems y' = f(y). Integrates forward in time only;
// callers flip the sign of f to go backward.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>

#include <Eigen/Core>

namespace cinfty::ode {

namespace tableau {
inline constexpr double c2 = 0.2, c3 = 0.3, c4 = 0.8, c5 = 8.0 / 9.0;
inline constexpr double a21 = 0.2;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                        a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                        a65 = -5103.0 / 18656.0;
inline constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0, a75 = -2187.0 / 6784.0,
                        a76 = 11.0 / 84.0;
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                        e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
} // namespace tableau

/// One accepted step with its dense-output coefficients.
template <typename Scalar>
struct DenseStep {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Scalar t0{0};
  Scalar h{0};
  Vector y0;
  Vector y1;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 5> coeffs;

  Scalar t1() const { return t0 + h; }

  Vector operator()(Scalar t) const {
    if (t == t0) return y0;
    if (t == t1()) return y1;
    const Scalar s = (t - t0) / h;
    const Scalar s1 = Scalar(1) - s;
    return coeffs.col(0) + s * (coeffs.col(1) + s1 * (coeffs.col(2) + s * (coeffs.col(3) + s1 * coeffs.col(4))));
  }
};

template <typename Scalar>
struct Dopri5Options {
  Scalar rel_tol{1e-10};
  Scalar abs_tol{1e-12};
  long max_steps = 1'000'000;
};

enum class StepResult { Accepted, Finished, StepSizeUnderflow, NonFinite, MaxSteps };

template <typename Scalar>
class Dopri5 {
public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Rhs = std::function<Vector(const Vector&)>;

  Dopri5(Rhs f, Dopri5Options<Scalar> opts) : f_(std::move(f)), opts_(opts) {}

  void reset(Scalar t0, Vector y0, Scalar t_end) {
    t_ = t0;
    t_end_ = t_end;
    y_ = std::move(y0);
    k1_ = f_(y_);
    steps_ = 0;
    h_ = initial_step();
  }

  Scalar time() const { return t_; }
  const Vector& state() const { return y_; }
  long steps() const { return steps_; }

  /// Advance by one accepted step (the last one is clipped to t_end).
  StepResult step(DenseStep<Scalar>& out) {
    using namespace tableau;
    using std::abs;
    using std::max;
    using std::min;
    using std::pow;
    using std::sqrt;
    if (t_ >= t_end_) return StepResult::Finished;
    if (!y_.allFinite() || !k1_.allFinite()) return StepResult::NonFinite;
    while (true) {
      if (steps_ >= opts_.max_steps) return StepResult::MaxSteps;
      const Scalar h_min = Scalar(16) * std::numeric_limits<Scalar>::epsilon() * max(Scalar(1), abs(t_));
      bool last = false;
      Scalar h = h_;
      if (t_ + h >= t_end_) {
        h = t_end_ - t_;
        last = true;
      }
      if (h < h_min) return StepResult::StepSizeUnderflow;

      const Vector k2 = f_(y_ + h * a21 * k1_);
      const Vector k3 = f_(y_ + h * (a31 * k1_ + a32 * k2));
      const Vector k4 = f_(y_ + h * (a41 * k1_ + a42 * k2 + a43 * k3));
      const Vector k5 = f_(y_ + h * (a51 * k1_ + a52 * k2 + a53 * k3 + a54 * k4));
      const Vector k6 = f_(y_ + h * (a61 * k1_ + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      Vector y1 = y_ + h * (a71 * k1_ + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
      const Vector k7 = f_(y1);
      ++steps_;

      const Vector err = h * (e1 * k1_ + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const Vector scale =
          (opts_.abs_tol + opts_.rel_tol * y_.cwiseAbs().cwiseMax(y1.cwiseAbs()).array()).matrix();
      Scalar e = sqrt((err.cwiseQuotient(scale)).squaredNorm() / Scalar(y_.size()));
      if (!y1.allFinite() || !k7.allFinite() || !(e == e)) {
        h_ = h * Scalar(0.25);
        if (h_ < h_min) return StepResult::NonFinite;
        continue;
      }

      const Scalar fac = e == Scalar(0) ? Scalar(10) : min(Scalar(10), max(Scalar(0.2), Scalar(0.9) * pow(e, Scalar(-0.2))));
      if (e <= Scalar(1)) {
        out.t0 = t_;
        out.h = h;
        out.y0 = y_;
        out.y1 = y1;
        out.coeffs.resize(y_.size(), 5);
        const Vector ydiff = y1 - y_;
        const Vector bspl = h * k1_ - ydiff;
        out.coeffs.col(0) = y_;
        out.coeffs.col(1) = ydiff;
        out.coeffs.col(2) = bspl;
        out.coeffs.col(3) = ydiff - h * k7 - bspl;
        out.coeffs.col(4) = h * (d1 * k1_ + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        t_ = last ? t_end_ : t_ + h;
        y_ = std::move(y1);
        k1_ = k7;
        // Keep the proposed size when the final step was clipped.
        h_ = last ? max(h_, h * fac) : h * fac;
        return StepResult::Accepted;
      }
      h_ = h * max(Scalar(0.2), fac);
    }
  }

private:
  Scalar norm(const Vector& v, const Vector& scale) const {
    using std::sqrt;
    return sqrt(v.cwiseQuotient(scale).squaredNorm() / Scalar(v.size()));
  }

  Scalar initial_step() {
    using std::abs;
    using std::max;
    using std::min;
    using std::pow;
    const Vector scale = (opts_.abs_tol + opts_.rel_tol * y_.cwiseAbs().array()).matrix();
    const Scalar d0 = norm(y_, scale);
    const Scalar d1 = norm(k1_, scale);
    Scalar h0 = (d0 < Scalar(1e-5) || d1 < Scalar(1e-5)) ? Scalar(1e-6) : Scalar(0.01) * d0 / d1;
    const Vector f1 = f_(y_ + h0 * k1_);
    const Scalar d2 = f1.allFinite() ? norm(f1 - k1_, scale) / h0 : std::numeric_limits<Scalar>::infinity();
    const Scalar dm = max(d1, d2);
    const Scalar h1 = dm <= Scalar(1e-15) ? max(Scalar(1e-6), h0 * Scalar(1e-3)) : pow(Scalar(0.01) / dm, Scalar(0.2));
    Scalar h = min(Scalar(100) * h0, h1);
    if (!(h > Scalar(0))) h = Scalar(1e-6);
    return h;
  }

  Rhs f_;
  Dopri5Options<Scalar> opts_;
  Scalar t_{0};
  Scalar t_end_{0};
  Scalar h_{0};
  Vector y_;
  Vector k1_;
  long steps_ = 0;
};

/// Single explicit 5th-order step of size h from y (no error control).
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> dopri5_single_step(
    const std::function<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>&)>& f,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& y, Scalar h) {
  using namespace tableau;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Vector k1 = f(y);
  const Vector k2 = f(y + h * a21 * k1);
  const Vector k3 = f(y + h * (a31 * k1 + a32 * k2));
  const Vector k4 = f(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
  const Vector k5 = f(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
  const Vector k6 = f(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
  return y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
}

} // namespace cinfty::ode
