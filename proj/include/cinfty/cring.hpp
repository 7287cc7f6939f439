#pragma once

// Finitely presented C∞-rings C∞(R^n)/J and their zero sets.
//
// Points of Spec(A) are handled as points of the zero set Z_J throughout;
// no abstract R-algebra maps are materialized.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cinfty/expr.hpp"
#include "cinfty/polyring.hpp"

namespace cinfty {

/// Axis-aligned box in R^n.
struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  static Box cube(int n, double lo, double hi) {
    return {Eigen::VectorXd::Constant(n, lo), Eigen::VectorXd::Constant(n, hi)};
  }
  int dim() const { return static_cast<int>(lower.size()); }
};

class SchemePresentation {
public:
  /// `ideal` generators must vanish; `region` constraints g satisfy g <= 0.
  /// An empty presentation stands for C∞(R^n) itself.
  SchemePresentation(VarList vars, std::vector<Expr> ideal, std::vector<Expr> region = {},
                     double tolerance = 1e-9);

  const VarList& vars() const { return vars_; }
  int dim() const { return vars_.size(); }
  const std::vector<Expr>& ideal() const { return ideal_; }
  const std::vector<Expr>& region() const { return region_; }
  double tolerance() const { return tolerance_; }

  /// Present when every ideal generator is polynomial. Its normal forms
  /// certify membership in J (the generators lie in J); they never refute it.
  const std::optional<PolyIdeal>& polynomial_ideal() const { return poly_ideal_; }

  /// Declared, never verified.
  bool germ_determined() const { return germ_determined_; }
  void declare_germ_determined(bool flag) { germ_determined_ = flag; }

  /// max(|g(p)| over ideal generators, max(g(p), 0) over region constraints).
  double residual(const Eigen::Ref<const Eigen::VectorXd>& p) const;

  SchemePresentation with_tolerance(double tolerance) const;

private:
  VarList vars_;
  std::vector<Expr> ideal_;
  std::vector<Expr> region_;
  double tolerance_;
  bool germ_determined_ = false;
  std::optional<PolyIdeal> poly_ideal_;
};

using SchemePtr = std::shared_ptr<const SchemePresentation>;

bool in_zero_set(const SchemePresentation& scheme, const Eigen::Ref<const Eigen::VectorXd>& p);

/// Grid scan of `box` with `resolution` points per axis, members first, then
/// Gauss-Newton polish of the remaining grid points onto Z. Points closer
/// than a quarter grid spacing to an accepted point are dropped.
std::vector<Eigen::VectorXd> sample_zero_set(const SchemePresentation& scheme, const Box& box, int resolution);

/// A coset f + J.
struct RingElement {
  Expr representative;
  SchemePtr home;
};

enum class Equality { EqualCertified, DistinctCertified, Unknown };

std::string to_string(Equality e);

struct EqualityVerdict {
  Equality status = Equality::Unknown;
  /// Nonzero normal form of a - b, when one was computed.
  std::optional<Polynomial> normal_form;
  /// Z point at which the distinctness witness was found.
  std::optional<Eigen::VectorXd> witness;
  std::string reason;
};

struct SampleSpec {
  std::optional<Box> box; // default [-2, 2]^n
  int resolution = 9;
};

/// Equality in A = C∞(R^n)/J. Equal is certified by normal form (or exact
/// symbolic cancellation). Distinct is certified only by a Z point where
/// a - b is nonzero, or where its gradient leaves the span of the ideal
/// generators' gradients (every element of J has gradient in that span).
EqualityVerdict element_equal(const RingElement& a, const RingElement& b, const SampleSpec& spec = {});

} // namespace cinfty
