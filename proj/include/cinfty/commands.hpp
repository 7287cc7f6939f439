#pragma once

// CLI subcommands as plain functions returning exit codes.
//
//   0  success / certified / pass
//   1  I/O, scheme file or argument error
//   2  negative verdict (not certified, point not on Z, t outside K_p,
//      axiom or validation failure)
//   3  groupoid refused: sampled domain is not horizon-complete

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace cinfty::cli {

struct CommonArgs {
  std::string scheme;
  std::optional<std::string> out; // payload destination; stdout when absent
  std::optional<double> tol;
  std::optional<double> horizon;
  std::uint64_t seed = 0;
  int jobs = 1;
};

int cmd_check(const CommonArgs& args, std::ostream& out, std::ostream& err);
int cmd_curve(const CommonArgs& args, const std::string& point, int samples, std::ostream& out, std::ostream& err);
/// `grid` points per axis over the scheme's sampling box (0: use the file's).
int cmd_domain(const CommonArgs& args, int grid, std::ostream& out, std::ostream& err);
int cmd_flow(const CommonArgs& args, const std::string& point, double time, std::ostream& out, std::ostream& err);
int cmd_groupoid(const CommonArgs& args, int samples, std::ostream& out, std::ostream& err);
int cmd_validate(const CommonArgs& args, std::ostream& out, std::ostream& err);

} // namespace cinfty::cli
