#pragma once

// Scheme files: a JSON document
//
//   {
//     "variables": ["x", "y"],
//     "ideal": ["y^2"],
//     "region": [],                          // optional, g <= 0
//     "derivation": {"x": "1", "y": "y"},
//     "flow_closed_form": ["x + t", "y*exp(t)"],   // optional, over variables + t
//     "options": {"tol": 1e-9, "horizon": 100, "box": [[-2, 2], [-2, 2]], "grid": 9},
//     "declared_flags": {"germ_determined": false}
//   }
//
// Recognized options: tol, horizon, rel_tol, abs_tol, probe_step, event_tol,
// max_steps, box, grid.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cinfty/curves.hpp"

namespace cinfty {

class SchemeFileError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct LoadedScheme {
  SchemePtr scheme;
  LiftedField field;
  std::optional<std::vector<Expr>> flow_closed_form; // over (variables..., t)
  IntegratorOptions integrator;
  Box box;       // sampling box for Z, default [-2, 2]^n
  int grid = 9;  // points per axis

  SampleSpec sample_spec() const { return {box, grid}; }
};

/// Throws SchemeFileError for malformed documents and unparsable expressions.
LoadedScheme parse_scheme(const std::string& text);
LoadedScheme load_scheme(const std::string& path);

} // namespace cinfty
