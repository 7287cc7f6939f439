#include <iostream>

#include "CLI11.hpp"

#include "cinfty/commands.hpp"

int main(int argc, char** argv) {
  using namespace cinfty::cli;
  CLI::App app{"Finitely presented C-infinity schemes: derivations, integral curves, flows and flow groupoids"};
  app.require_subcommand(1);

  CommonArgs common;
  std::string point;
  double time = 0.0;
  int curve_samples = 11;
  int arrow_samples = 100;
  int grid = 0;
  double tol = 0, horizon = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scheme", common.scheme, "scheme file")->required();
    sub->add_option("--out", common.out, "write the result here instead of stdout");
    sub->add_option("--tol", tol, "zero-set tolerance (overrides the file)");
    sub->add_option("--horizon", horizon, "integration horizon (overrides the file)");
    sub->add_option("--seed", common.seed, "seed for sampled arrows")->default_val(0);
    sub->add_option("--jobs", common.jobs, "worker threads for per-point integration")->default_val(1);
  };

  auto* check = app.add_subcommand("check", "certify that the derivation preserves the ideal");
  add_common(check);
  auto* curve = app.add_subcommand("curve", "maximal integral curve through a point, as CSV");
  add_common(curve);
  curve->add_option("--point", point, "base point, comma separated")->required();
  curve->add_option("--samples", curve_samples, "rows in the CSV")->capture_default_str();
  auto* domain = app.add_subcommand("domain", "K_p for every sampled zero-set point, as CSV");
  add_common(domain);
  domain->add_option("--grid", grid, "grid points per axis (default: from the file)")->default_val(0);
  auto* flow = app.add_subcommand("flow", "evaluate the flow at (point, time)");
  add_common(flow);
  flow->add_option("--point", point, "base point, comma separated")->required();
  flow->add_option("--time", time, "flow time")->required();
  auto* groupoid = app.add_subcommand("groupoid", "check the groupoid axioms on sampled arrows");
  add_common(groupoid);
  groupoid->add_option("--samples", arrow_samples, "number of sampled arrows")->capture_default_str();
  auto* validate = app.add_subcommand("validate", "check a scheme file and its closed-form flow");
  add_common(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  for (auto* sub : app.get_subcommands()) {
    if (sub->count("--tol")) common.tol = tol;
    if (sub->count("--horizon")) common.horizon = horizon;
  }

  if (*check) return cmd_check(common, std::cout, std::cerr);
  if (*curve) return cmd_curve(common, point, curve_samples, std::cout, std::cerr);
  if (*domain) return cmd_domain(common, grid, std::cout, std::cerr);
  if (*flow) return cmd_flow(common, point, time, std::cout, std::cerr);
  if (*groupoid) return cmd_groupoid(common, arrow_samples, std::cout, std::cerr);
  if (*validate) return cmd_validate(common, std::cout, std::cerr);
  return 1;
}
