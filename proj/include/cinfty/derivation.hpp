#pragma once

// Derivations of A = C∞(R^n)/J given by lift coefficients (a_1..a_n):
// the vector field V = Σ a_i ∂/∂x_i on R^n and the induced derivation
// v(x_i + J) = a_i + J on A are carried as one value.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cinfty/cring.hpp"

namespace cinfty {

class LiftedField {
public:
  LiftedField(SchemePtr home, std::vector<Expr> coeffs);

  const SchemePtr& home() const { return home_; }
  const SchemePresentation& scheme() const { return *home_; }
  const std::vector<Expr>& coeffs() const { return coeffs_; }
  int dim() const { return static_cast<int>(coeffs_.size()); }

  /// V(f) = Σ a_i ∂_i f.
  Expr apply_to(const Expr& f) const;

  /// Evaluate (a_1(p), ..., a_n(p)).
  Eigen::VectorXd operator()(const Eigen::Ref<const Eigen::VectorXd>& p) const;

private:
  SchemePtr home_;
  std::vector<Expr> coeffs_;
};

/// The lift V as a callable on R^n (ODE right-hand side).
std::function<Eigen::VectorXd(const Eigen::VectorXd&)> lift(const LiftedField& d);

LiftedField operator+(const LiftedField& a, const LiftedField& b);
/// c·d for a ring element c.
LiftedField scale(const RingElement& c, const LiftedField& d);
/// [d, e] = Σ_i (d(e_i) - e(d_i)) ∂_i.
LiftedField bracket(const LiftedField& d, const LiftedField& e);

enum class GeneratorStatus { CertifiedZero, NotCertified, NumericOnly };

std::string to_string(GeneratorStatus s);

struct GeneratorCheck {
  Expr generator;
  Expr image;                           // V(g)
  GeneratorStatus status = GeneratorStatus::NotCertified;
  std::optional<Polynomial> residual;   // nonzero normal form of V(g)
  double max_sampled = 0.0;             // numeric mode: max |V(g)| over Z samples
  int samples = 0;
};

struct PreservationReport {
  std::vector<GeneratorCheck> generators;
  bool certified = false;
  /// Set when the presentation carries region constraints.
  std::string region_note;
};

/// Generator criterion for V(J) ⊂ J: by Leibniz it suffices that V(g) ∈ J
/// for each generator g. Sound, not complete.
PreservationReport preserves_ideal(const LiftedField& d, const SampleSpec& spec = {});

/// v(a) = V(rep a) + J; requires a certified preservation verdict.
RingElement apply(const LiftedField& d, const RingElement& a);

enum class RelationStatus { Certified, NotCertified, NumericPass, NumericFail };

std::string to_string(RelationStatus s);

struct RelationReport {
  RelationStatus status = RelationStatus::NotCertified;
  /// Per target coordinate: v(φ* y_j) - φ*(w(y_j)) as computed.
  std::vector<Expr> defects;
  std::vector<std::optional<Polynomial>> residuals;
  double max_sampled = 0.0;
};

/// Checks v ∘ φ* = φ* ∘ w on the target coordinates, where phi maps the
/// source space (v's home) to the target space (w's home) and is given by
/// one expression per target coordinate over the source variables.
RelationReport related(const std::vector<Expr>& phi, const LiftedField& w, const LiftedField& v,
                       const SampleSpec& spec = {}, double tolerance = 1e-7);

/// Hadamard decomposition f(x) - f(y) = Σ (x_i - y_i) g_i(x, y); the g_i
/// live over 2n variables ordered (x_1..x_n, y_1..y_n).
std::vector<Polynomial> hadamard_decompose(const Polynomial& f);

/// Derivations of A are determined by their values on the coordinates.
EqualityVerdict derivation_equal(const LiftedField& d, const LiftedField& e, const SampleSpec& spec = {});

} // namespace cinfty
