#include "cinfty/derivation.hpp"

#include <algorithm>
#include <cmath>

namespace cinfty {

LiftedField::LiftedField(SchemePtr home, std::vector<Expr> coeffs) : home_(std::move(home)), coeffs_(std::move(coeffs)) {
  if (!home_) throw std::invalid_argument("lifted field without a home ring");
  if (static_cast<int>(coeffs_.size()) != home_->dim())
    throw ArityError("field has " + std::to_string(coeffs_.size()) + " coefficients on a ring with " +
                     std::to_string(home_->dim()) + " generators");
  for (const auto& a : coeffs_)
    if (a.arity() > home_->dim()) throw ArityError("coefficient references an unknown variable");
}

Expr LiftedField::apply_to(const Expr& f) const {
  std::vector<Expr> terms;
  for (int i = 0; i < dim(); ++i) {
    const auto& a = coeffs_[static_cast<std::size_t>(i)];
    if (a.is_zero()) continue;
    terms.push_back(a * diff(f, i));
  }
  return sum(std::move(terms));
}

Eigen::VectorXd LiftedField::operator()(const Eigen::Ref<const Eigen::VectorXd>& p) const {
  Eigen::VectorXd out(dim());
  for (int i = 0; i < dim(); ++i) out[i] = eval(coeffs_[static_cast<std::size_t>(i)], p);
  return out;
}

std::function<Eigen::VectorXd(const Eigen::VectorXd&)> lift(const LiftedField& d) {
  return [d](const Eigen::VectorXd& p) { return d(p); };
}

LiftedField operator+(const LiftedField& a, const LiftedField& b) {
  if (a.home() != b.home()) throw std::invalid_argument("fields on different rings");
  std::vector<Expr> c;
  for (int i = 0; i < a.dim(); ++i) c.push_back(a.coeffs()[static_cast<std::size_t>(i)] + b.coeffs()[static_cast<std::size_t>(i)]);
  return LiftedField(a.home(), std::move(c));
}

LiftedField scale(const RingElement& c, const LiftedField& d) {
  if (c.home != d.home()) throw std::invalid_argument("scalar from a different ring");
  std::vector<Expr> out;
  for (const auto& a : d.coeffs()) out.push_back(c.representative * a);
  return LiftedField(d.home(), std::move(out));
}

LiftedField bracket(const LiftedField& d, const LiftedField& e) {
  if (d.home() != e.home()) throw std::invalid_argument("fields on different rings");
  std::vector<Expr> out;
  for (int i = 0; i < d.dim(); ++i)
    out.push_back(d.apply_to(e.coeffs()[static_cast<std::size_t>(i)]) - e.apply_to(d.coeffs()[static_cast<std::size_t>(i)]));
  return LiftedField(d.home(), std::move(out));
}

std::string to_string(GeneratorStatus s) {
  switch (s) {
  case GeneratorStatus::CertifiedZero:
    return "certified-zero";
  case GeneratorStatus::NotCertified:
    return "not-certified";
  case GeneratorStatus::NumericOnly:
    return "numeric-only";
  }
  return "not-certified";
}

std::string to_string(RelationStatus s) {
  switch (s) {
  case RelationStatus::Certified:
    return "certified";
  case RelationStatus::NotCertified:
    return "not-certified";
  case RelationStatus::NumericPass:
    return "numeric-pass";
  case RelationStatus::NumericFail:
    return "numeric-fail";
  }
  return "not-certified";
}

namespace {

// max |f| over sampled points of Z; guard violations are skipped.
std::pair<double, int> sampled_max(const Expr& f, const std::vector<Eigen::VectorXd>& samples) {
  double m = 0.0;
  int count = 0;
  for (const auto& p : samples) {
    try {
      m = std::max(m, std::abs(eval(f, p)));
      ++count;
    } catch (const GuardError&) {
    }
  }
  return {m, count};
}

std::vector<Eigen::VectorXd> samples_for(const SchemePresentation& s, const SampleSpec& spec) {
  return sample_zero_set(s, spec.box.value_or(Box::cube(s.dim(), -2.0, 2.0)), spec.resolution);
}

} // namespace

PreservationReport preserves_ideal(const LiftedField& d, const SampleSpec& spec) {
  const SchemePresentation& s = d.scheme();
  PreservationReport report;
  std::optional<std::vector<Eigen::VectorXd>> samples;
  for (const auto& g : s.ideal()) {
    GeneratorCheck check;
    check.generator = g;
    check.image = d.apply_to(g);
    std::optional<Polynomial> image_poly;
    if (s.polynomial_ideal()) image_poly = as_polynomial(check.image, s.dim());
    if (image_poly) {
      Polynomial nf = s.polynomial_ideal()->normal_form(*image_poly);
      if (nf.is_zero()) {
        check.status = GeneratorStatus::CertifiedZero;
      } else {
        check.status = GeneratorStatus::NotCertified;
        check.residual = std::move(nf);
      }
    } else {
      if (!samples) samples = samples_for(s, spec);
      check.status = GeneratorStatus::NumericOnly;
      std::tie(check.max_sampled, check.samples) = sampled_max(check.image, *samples);
    }
    report.generators.push_back(std::move(check));
  }
  report.certified = std::all_of(report.generators.begin(), report.generators.end(),
                                 [](const GeneratorCheck& c) { return c.status == GeneratorStatus::CertifiedZero; });
  if (!s.region().empty())
    report.region_note = "region constraints contribute no generators; the vanishing ideal of a region that is "
                         "the closure of its interior is preserved by every smooth field";
  return report;
}

RingElement apply(const LiftedField& d, const RingElement& a) {
  if (a.home != d.home()) throw std::invalid_argument("ring element from a different ring");
  if (!preserves_ideal(d).certified) throw NotCertified("derivation is not certified to preserve the ideal");
  return RingElement{d.apply_to(a.representative), a.home};
}

RelationReport related(const std::vector<Expr>& phi, const LiftedField& w, const LiftedField& v,
                       const SampleSpec& spec, double tolerance) {
  if (static_cast<int>(phi.size()) != w.dim())
    throw ArityError("map has " + std::to_string(phi.size()) + " components, target has " + std::to_string(w.dim()));
  for (const auto& c : phi)
    if (c.arity() > v.dim()) throw ArityError("map component references a variable outside the source");

  const SchemePresentation& source = v.scheme();
  RelationReport report;
  bool all_polynomial = true;
  bool all_zero = true;
  for (std::size_t j = 0; j < phi.size(); ++j) {
    Expr defect = v.apply_to(phi[j]) - apply_operation(w.coeffs()[j], phi);
    std::optional<Polynomial> residual;
    if (!defect.is_zero()) {
      std::optional<Polynomial> p;
      if (source.polynomial_ideal()) p = as_polynomial(defect, source.dim());
      if (p) {
        Polynomial nf = source.polynomial_ideal()->normal_form(*p);
        if (!nf.is_zero()) {
          all_zero = false;
          residual = std::move(nf);
        }
      } else {
        all_polynomial = false;
        all_zero = false;
      }
    }
    report.defects.push_back(std::move(defect));
    report.residuals.push_back(std::move(residual));
  }
  if (all_zero) {
    report.status = RelationStatus::Certified;
    return report;
  }
  const auto samples = samples_for(source, spec);
  for (const auto& defect : report.defects)
    report.max_sampled = std::max(report.max_sampled, sampled_max(defect, samples).first);
  if (all_polynomial)
    report.status = RelationStatus::NotCertified;
  else
    report.status = report.max_sampled <= tolerance ? RelationStatus::NumericPass : RelationStatus::NumericFail;
  return report;
}

std::vector<Polynomial> hadamard_decompose(const Polynomial& f) {
  const int n = f.nvars();
  std::vector<Polynomial> out;
  // Telescoping: g_i = (f(y_1..y_{i-1}, x_i..x_n) - f(y_1..y_i, x_{i+1}..x_n)) / (x_i - y_i).
  for (int i = 0; i < n; ++i) {
    std::vector<int> before(static_cast<std::size_t>(n));
    std::vector<int> after(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      before[static_cast<std::size_t>(k)] = k < i ? n + k : k;
      after[static_cast<std::size_t>(k)] = k <= i ? n + k : k;
    }
    const Polynomial numerator = f.reindex(2 * n, before) - f.reindex(2 * n, after);
    const Polynomial divisor = Polynomial::variable(2 * n, i) - Polynomial::variable(2 * n, n + i);
    out.push_back(divide_exact(numerator, divisor, MonomialOrder::Lex));
  }
  return out;
}

EqualityVerdict derivation_equal(const LiftedField& d, const LiftedField& e, const SampleSpec& spec) {
  if (d.home() != e.home()) throw std::invalid_argument("derivations on different rings");
  EqualityVerdict combined;
  combined.status = Equality::EqualCertified;
  combined.reason = "every coordinate image agrees";
  for (int i = 0; i < d.dim(); ++i) {
    auto v = element_equal(RingElement{d.coeffs()[static_cast<std::size_t>(i)], d.home()},
                           RingElement{e.coeffs()[static_cast<std::size_t>(i)], e.home()}, spec);
    if (v.status == Equality::DistinctCertified) {
      v.reason = "coordinate " + d.scheme().vars().name(i) + ": " + v.reason;
      return v;
    }
    if (v.status == Equality::Unknown && combined.status == Equality::EqualCertified) {
      v.reason = "coordinate " + d.scheme().vars().name(i) + ": " + v.reason;
      combined = v;
    }
  }
  return combined;
}

} // namespace cinfty
