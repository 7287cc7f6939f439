#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "cinfty/commands.hpp"
#include "cinfty/scheme_file.hpp"

using namespace cinfty;
using namespace cinfty::cli;

namespace {

const std::string DIR = CINFTY_SCHEME_DIR;

CommonArgs args(const std::string& name) {
  CommonArgs a;
  a.scheme = DIR + "/" + name;
  return a;
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

template <typename F>
Run run(F&& f) {
  std::ostringstream out, err;
  const int code = f(out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "cinfty-cli-test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string write_file(const std::string& name, const std::string& text) {
  const auto path = scratch(name);
  std::ofstream(path) << text;
  return path.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int shell(const std::string& cmd) {
  const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST_CASE("check") {
  const Run ok = run([](auto& o, auto& e) { return cmd_check(args("example43.scheme"), o, e); });
  CHECK(ok.code == 0);
  CHECK(ok.out.find("verdict: certified") != std::string::npos);

  const Run euler = run([](auto& o, auto& e) { return cmd_check(args("euler_x2y.scheme"), o, e); });
  CHECK(euler.code == 0);
  CHECK(euler.out.find("3*x^2*y") != std::string::npos);

  const Run dy = run([](auto& o, auto& e) { return cmd_check(args("example43_dy.scheme"), o, e); });
  CHECK(dy.code == 2);
  CHECK(dy.out.find("residual 2*y") != std::string::npos);
  CHECK(dy.out.find("verdict: not-certified") != std::string::npos);

  const Run square = run([](auto& o, auto& e) { return cmd_check(args("square.scheme"), o, e); });
  CHECK(square.code == 0);

  const Run missing = run([](auto& o, auto& e) { return cmd_check(args("no-such.scheme"), o, e); });
  CHECK(missing.code == 1);
  CHECK_FALSE(missing.err.empty());
}

TEST_CASE("malformed scheme files") {
  const char* bad[] = {
      "{not json",
      R"j({"variables": ["x"], "ideal": ["abs(x)"], "derivation": {"x": "1"}})j",
      R"j({"variables": ["x", "y"], "ideal": ["y"], "derivation": {"x": "1"}})j",
      R"j({"variables": ["x"], "ideal": ["x"], "derivation": {"x": "1"}, "colour": 3})j",
      R"j({"variables": ["x"], "ideal": ["x"], "derivation": {"x": "1"}, "options": {"horizon": -1}})j",
      R"j({"variables": ["x"], "ideal": ["x"], "derivation": {"x": "1"}, "declared_flags": {"germ_determined": 1}})j",
      R"j({"variables": ["x", "x"], "ideal": ["x"], "derivation": {"x": "1"}})j",
  };
  int i = 0;
  for (const char* text : bad) {
    INFO(text);
    const std::string path = write_file("bad" + std::to_string(i++) + ".scheme", text);
    CHECK_THROWS_AS(load_scheme(path), SchemeFileError);
    CommonArgs a;
    a.scheme = path;
    CHECK(run([&](auto& o, auto& e) { return cmd_check(a, o, e); }).code == 1);
  }
  const auto ok = parse_scheme(
      R"j({"variables": ["x"], "ideal": [], "region": ["x - 1"], "derivation": {"x": "-x"}, "options": {"grid": 5}})j");
  CHECK(ok.grid == 5);
  CHECK(ok.scheme->region().size() == 1);
  CHECK_FALSE(ok.flow_closed_form);
}

TEST_CASE("curve") {
  const Run r = run([](auto& o, auto& e) { return cmd_curve(args("example43.scheme"), "2,0", 11, o, e); });
  CHECK(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,x1,x2,residual");
  int rows = 0;
  while (std::getline(in, line)) {
    double t, x, y, res;
    char c;
    std::istringstream row(line);
    row >> t >> c >> x >> c >> y >> c >> res;
    CHECK(x == doctest::Approx(2 + t).epsilon(1e-9));
    CHECK(y == 0);
    ++rows;
  }
  CHECK(rows == 11);
  CHECK(r.err.find("horizon-complete") != std::string::npos);

  const Run corner = run([](auto& o, auto& e) { return cmd_curve(args("square.scheme"), "1,1", 11, o, e); });
  CHECK(corner.code == 0);
  CHECK(corner.out == "t,x1,x2,residual\n0,1,1,0\n");
  CHECK(corner.err.find("singleton") != std::string::npos);

  const Run off = run([](auto& o, auto& e) { return cmd_curve(args("example43.scheme"), "0,0.5", 11, o, e); });
  CHECK(off.code == 2);
  CHECK(run([](auto& o, auto& e) { return cmd_curve(args("example43.scheme"), "1,zero", 11, o, e); }).code == 1);
  CHECK(run([](auto& o, auto& e) { return cmd_curve(args("example43.scheme"), "1", 11, o, e); }).code == 1);
}

TEST_CASE("horizon flag") {
  CommonArgs a = args("example43.scheme");
  a.horizon = 4;
  const Run r = run([&](auto& o, auto& e) { return cmd_curve(a, "0,0", 3, o, e); });
  CHECK(r.code == 0);
  CHECK(r.out.find("\n-4,") != std::string::npos);
  CHECK(r.out.find("\n4,") != std::string::npos);
  CHECK(r.err.find("(-4 (horizon), 4 (horizon))") != std::string::npos);
}

TEST_CASE("out flag writes the payload to a file") {
  CommonArgs a = args("square.scheme");
  const std::string path = scratch("domain.csv").string();
  a.out = path;
  const Run r = run([&](auto& o, auto& e) { return cmd_domain(a, 5, o, e); });
  CHECK(r.code == 0);
  const std::string csv = slurp(path);
  CHECK(csv.rfind("x1,x2,Kp_lo,Kp_hi,lo_closed,hi_closed,class\n", 0) == 0);
  CHECK(csv.find("singleton") != std::string::npos);
  CHECK(r.out.find("Kp_lo") == std::string::npos);

  a.out = "/nonexistent-dir/x.csv";
  CHECK(run([&](auto& o, auto& e) { return cmd_domain(a, 5, o, e); }).code == 1);
}

TEST_CASE("flow") {
  const Run r = run([](auto& o, auto& e) { return cmd_flow(args("example43.scheme"), "1,0", 2, o, e); });
  CHECK(r.code == 0);
  CHECK(r.out == "3,0\n");
  const Run corner = run([](auto& o, auto& e) { return cmd_flow(args("square.scheme"), "1,1", 0.5, o, e); });
  CHECK(corner.code == 2);
  CHECK(run([](auto& o, auto& e) { return cmd_flow(args("square.scheme"), "1,1", 0, o, e); }).out == "1,1\n");
}

TEST_CASE("groupoid") {
  const Run r = run([](auto& o, auto& e) { return cmd_groupoid(args("example43.scheme"), 100, o, e); });
  CHECK(r.code == 0);
  CHECK(r.out.find("# numeric flow") != std::string::npos);
  CHECK(r.out.find("verdict,pass") != std::string::npos);
  CHECK(r.out.find("verdict,fail") == std::string::npos);

  const Run sq = run([](auto& o, auto& e) { return cmd_groupoid(args("square.scheme"), 100, o, e); });
  CHECK(sq.code == 3);
  CHECK(sq.err.find("refused") != std::string::npos);
}

TEST_CASE("validate") {
  CHECK(run([](auto& o, auto& e) { return cmd_validate(args("example43.scheme"), o, e); }).code == 0);
  CHECK(run([](auto& o, auto& e) { return cmd_validate(args("circle.scheme"), o, e); }).code == 0);
  // nothing to compare without a closed form
  const Run sq = run([](auto& o, auto& e) { return cmd_validate(args("square.scheme"), o, e); });
  CHECK(sq.code == 0);
  CHECK(sq.out.find("flow_closed_form: absent") != std::string::npos);

  const std::string wrong = write_file("wrong_psi.scheme", R"j({
    "variables": ["x", "y"], "ideal": ["y^2"], "derivation": {"x": "1", "y": "y"},
    "flow_closed_form": ["x + 2*t", "y*exp(t)"]})j");
  CommonArgs a;
  a.scheme = wrong;
  CHECK(run([&](auto& o, auto& e) { return cmd_validate(a, o, e); }).code == 2);
}

TEST_CASE("outputs are deterministic") {
  CommonArgs a = args("example43.scheme");
  a.seed = 7;
  const Run g1 = run([&](auto& o, auto& e) { return cmd_groupoid(a, 50, o, e); });
  const Run g2 = run([&](auto& o, auto& e) { return cmd_groupoid(a, 50, o, e); });
  CHECK(g1.out == g2.out);

  CommonArgs s = args("square.scheme");
  const Run d1 = run([&](auto& o, auto& e) { return cmd_domain(s, 9, o, e); });
  s.jobs = 4;
  const Run d2 = run([&](auto& o, auto& e) { return cmd_domain(s, 9, o, e); });
  CHECK(d1.out == d2.out);
}

TEST_CASE("binary exit codes") {
  const std::string cli = CINFTY_CLI;
  const std::string s = " --scheme " + DIR;
  CHECK(shell(cli + " check" + s + "/example43.scheme") == 0);
  CHECK(shell(cli + " check" + s + "/example43_dy.scheme") == 2);
  CHECK(shell(cli + " check" + s + "/missing.scheme") == 1);
  CHECK(shell(cli + " curve" + s + "/example43.scheme --point 0,0.5") == 2);
  CHECK(shell(cli + " flow" + s + "/example43.scheme --point 1,0 --time 2") == 0);
  CHECK(shell(cli + " groupoid" + s + "/square.scheme") == 3);
  CHECK(shell(cli + " groupoid" + s + "/example43.scheme --samples 20 --seed 3") == 0);
  CHECK(shell(cli + " nonsense") == 1);
  CHECK(shell(cli + " check") == 1);
}
