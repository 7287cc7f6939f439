#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cinfty {

/// Syntax or vocabulary error in an expression string.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const { return position_; }

private:
  std::size_t position_;
};

/// Evaluation of a quotient or log outside its guard domain.
class GuardError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

class ArityError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A point was expected on the zero set but is not.
class NotOnZeroSet : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Time outside the interval of definition of a maximal integral curve.
class OutsideInterval : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

class NotCertified : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

class IntegrationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class GroebnerAbort : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Groupoid operations requested on a field whose sampled domain is not complete.
class NotComplete : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class NotComposable : public std::invalid_argument {
public:
  NotComposable(const std::string& what, double residual)
      : std::invalid_argument(what), residual_(residual) {}
  double residual() const { return residual_; }

private:
  double residual_;
};

} // namespace cinfty
