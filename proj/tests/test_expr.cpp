#include "doctest.h"

#include <cmath>

#include "cinfty/errors.hpp"
#include "cinfty/expr.hpp"
#include "cinfty/polyring.hpp"
#include "oracles.hpp"

using namespace cinfty;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

const VarList XY{"x", "y"};
const VarList XYT{"x", "y", "t"};

} // namespace

TEST_CASE("parse builds simplified trees") {
  const Expr e = parse_expr("y^2", XY);
  CHECK(e.op() == Op::Power);
  CHECK(e.exponent() == 2);
  CHECK(e.arg(0).op() == Op::Variable);
  CHECK(e.arg(0).index() == 1);

  const Expr f = parse_expr("exp(2*t)*y^2", XYT);
  REQUIRE(f.op() == Op::Product);
  REQUIRE(f.args().size() == 2);
  CHECK(f.arg(0).op() == Op::Exp);
  CHECK(f.arg(1).op() == Op::Power);

  CHECK(parse_expr("x + 0", XY).op() == Op::Variable);
  CHECK(parse_expr("1*x*1", XY).op() == Op::Variable);
  CHECK(parse_expr("2*3", XY).rational() == 6);
  CHECK(parse_expr("0.25", XY).rational() == Rational(1, 4));
  CHECK(parse_expr("1e-3", XY).rational() == Rational(1, 1000));
  CHECK(parse_expr("-(-x)", XY).op() == Op::Variable);
}

TEST_CASE("parse rejects bad input") {
  CHECK_THROWS_AS(parse_expr("abs(x)", XY), ParseError);
  CHECK_THROWS_AS(parse_expr("floor(x)", XY), ParseError);
  CHECK_THROWS_AS(parse_expr("sqrt(x)", XY), ParseError);
  CHECK_THROWS_AS(parse_expr("z + 1", XY), ParseError);
  CHECK_THROWS_AS(parse_expr("tan(x)", XY), ParseError);
  CHECK_THROWS_AS(parse_expr("x^2.5", XY), ParseError);
  CHECK_THROWS_AS(parse_expr("x^y", XY), ParseError);
  CHECK_THROWS_AS(parse_expr("(x + y", XY), ParseError);
  CHECK_THROWS_AS(parse_expr("", XY), ParseError);
  CHECK_THROWS_AS(parse_expr("1/0", XY), ParseError);
  try {
    parse_expr("x + * y", XY);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 4);
  }
}

TEST_CASE("evaluation") {
  CHECK(eval(parse_expr("x^2*y", XY), vec({2, 3})) == 12);
  CHECK(eval(parse_expr("exp(2*t)*y^2", XYT), vec({5, 1, 0})) == 1);
  const VarList S{"s"};
  CHECK(eval(parse_expr("cut(s)", S), vec({-1})) == 0);
  CHECK(eval(parse_expr("cut(s)", S), vec({0})) == 0);
  CHECK(eval(parse_expr("cut(s)", S), vec({1})) == doctest::Approx(std::exp(-1.0)));
  CHECK(eval(parse_expr("sin(x) + cos(y)", XY), vec({0.3, 0.4})) == doctest::Approx(std::sin(0.3) + std::cos(0.4)));
  CHECK(eval(parse_expr("log(x)", XY), vec({std::exp(2.0), 0})) == doctest::Approx(2.0));
}

TEST_CASE("guards raise instead of returning NaN") {
  CHECK_THROWS_AS(eval(parse_expr("1/x", XY), vec({0, 1})), GuardError);
  CHECK_THROWS_AS(eval(parse_expr("log(x)", XY), vec({-1, 1})), GuardError);
  CHECK_THROWS_AS(eval(parse_expr("log(x)", XY), vec({0, 1})), GuardError);
  CHECK_THROWS_AS(eval(parse_expr("x*y", XY), vec({1})), ArityError);
}

TEST_CASE("symbolic derivatives") {
  CHECK(structurally_equal(diff(parse_expr("y^2", XY), 1), parse_expr("2*y", XY)));

  const Expr f = parse_expr("x^2*y", XY);
  const auto dx = as_polynomial(diff(f, 0), 2);
  REQUIRE(dx);
  CHECK(*dx == *as_polynomial(parse_expr("2*x*y", XY), 2));
  const Expr euler = Expr::variable(0) * diff(f, 0) + Expr::variable(1) * diff(f, 1);
  CHECK(*as_polynomial(euler, 2) == *as_polynomial(parse_expr("3*x^2*y", XY), 2));

  const Expr g = parse_expr("exp(2*t)*y^2", XYT);
  const Eigen::VectorXd p = vec({0, 1, 0.3});
  const double dt = eval(diff(g, 2), p);
  CHECK(dt == doctest::Approx(2 * std::exp(0.6)).epsilon(1e-12));
  CHECK(dt == doctest::Approx(oracle::central_fd(g, p, 2)).epsilon(1e-8));
  CHECK(dt == doctest::Approx(3.6442).epsilon(1e-4));

  CHECK(diff(parse_expr("x", XY), 1).is_zero());
  CHECK(diff(parse_expr("7", XY), 0).is_zero());
}

TEST_CASE("cut derivatives are dedicated nodes") {
  const VarList S{"s"};
  const Expr c = parse_expr("cut(s)", S);
  const Expr d1 = diff(c, 0);
  CHECK(d1.op() == Op::CutDeriv);
  CHECK(d1.order() == 1);
  CHECK(eval(d1, vec({0.5})) == doctest::Approx(std::exp(-2.0) / 0.25));
  CHECK(eval(d1, vec({-0.5})) == 0);
  CHECK(eval(d1, vec({0})) == 0);
  const Expr d3 = diff(diff(d1, 0), 0);
  CHECK(d3.order() == 3);
  for (double s : {0.2, 0.5, 1.0, 3.0})
    CHECK(eval(d3, vec({s})) == doctest::Approx(oracle::central_fd(diff(d1, 0), vec({s}), 0, 1e-6)).epsilon(1e-6));
  // cut(2x) chain rule
  const Expr cx = parse_expr("cut(2*s)", S);
  CHECK(eval(diff(cx, 0), vec({0.4})) == doctest::Approx(oracle::central_fd(cx, vec({0.4}), 0)).epsilon(1e-7));
  CHECK(structurally_equal(parse_expr(print(d3, S), S), d3));
}

TEST_CASE("apply_operation is composition") {
  const Expr x = Expr::variable(0), y = Expr::variable(1), t = Expr::variable(2);
  const std::vector<Expr> args{x + t, y * exp(t)};
  // projections
  CHECK(structurally_equal(apply_operation(Expr::variable(0), args), args[0]));
  CHECK(structurally_equal(apply_operation(Expr::variable(1), args), args[1]));
  // Ψ*y²
  const Expr pulled = apply_operation(parse_expr("y^2", XY), args);
  CHECK(structurally_equal(pulled, pow(y * exp(t), 2)));
  const Expr expected = parse_expr("exp(2*t)*y^2", XYT);
  for (const auto& p : oracle::grid(3, -1.5, 1.5, 5))
    CHECK(eval(pulled, p) == doctest::Approx(eval(expected, p)).epsilon(1e-12));
  CHECK(apply_operation(Expr::constant(5), args).rational() == 5);
  CHECK_THROWS_AS(apply_operation(Expr::variable(2), args), ArityError);
}

TEST_CASE("as_polynomial") {
  const auto p = as_polynomial(parse_expr("y^2", XY), 2);
  REQUIRE(p);
  CHECK(p->terms().size() == 1);
  CHECK(p->coefficient({0, 2}) == 1);
  const auto q = as_polynomial(parse_expr("x + t", XYT), 3);
  REQUIRE(q);
  CHECK(q->coefficient({1, 0, 0}) == 1);
  CHECK(q->coefficient({0, 0, 1}) == 1);
  CHECK_FALSE(as_polynomial(parse_expr("exp(2*t)*y^2", XYT), 3));
  CHECK_FALSE(as_polynomial(parse_expr("1/x", XY), 2));
  CHECK(as_polynomial(parse_expr("x/2", XY), 2)->coefficient({1, 0}) == Rational(1, 2));
}

TEST_CASE("substitute and gradient") {
  const Expr g = parse_expr("exp(2*t)*y^2 + t*x", XYT);
  const Expr at0 = substitute(g, 2, Expr::constant(0));
  CHECK(structurally_equal(at0, parse_expr("y^2", XYT)));
  const auto grad = gradient(parse_expr("x^2*y", XY), 2);
  REQUIRE(grad.size() == 2);
  CHECK(eval(grad[0], vec({2, 3})) == 12);
  CHECK(eval(grad[1], vec({2, 3})) == 4);
}

TEST_CASE("property: derivatives agree with central differences") {
  oracle::ExprGen gen(3, 20240611);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int checked = 0;
  for (int k = 0; k < 200; ++k) {
    const Expr e = gen(3);
    const int var = k % 3;
    const Expr de = diff(e, var);
    const Eigen::VectorXd p = vec({u(rng), u(rng), u(rng)});
    const double fd = oracle::central_fd(e, p, var);
    const double sym = eval(de, p);
    INFO("expr: ", print(e, XYT), " at var ", var);
    CHECK(std::abs(sym - fd) <= 1e-5 * (1 + std::abs(fd)));
    ++checked;
  }
  CHECK(checked == 200);
}

TEST_CASE("property: composition soundness") {
  oracle::ExprGen fgen(2, 99), agen(3, 100);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const Expr f = fgen(2);
    const std::vector<Expr> args{agen(2), agen(2)};
    const Eigen::VectorXd p = vec({u(rng), u(rng), u(rng)});
    double direct;
    try {
      direct = eval(f, vec({eval(args[0], p), eval(args[1], p)}));
    } catch (const GuardError&) {
      continue;
    }
    const double composed = eval(apply_operation(f, args), p);
    CHECK(std::abs(composed - direct) <= 1e-12 * (1 + std::abs(direct)));
  }
}

TEST_CASE("property: print/parse round trip") {
  oracle::ExprGen gen(3, 4242);
  for (int k = 0; k < 300; ++k) {
    const Expr e = gen(4);
    const std::string text = print(e, XYT);
    INFO(text);
    CHECK(structurally_equal(parse_expr(text, XYT), simplify(e)));
    const Expr d = diff(e, k % 3);
    CHECK(structurally_equal(parse_expr(print(d, XYT), XYT), simplify(d)));
  }
  for (const char* src : {"-x", "x - -y", "-(x + y)*t", "x/(y*t)", "(x/y)/t", "-x^2", "(-x)^2", "-2*x",
                          "x - 2*y", "2.5*x", "cut'(x)", "cut''(x + 1)", "exp(-1/x^2)", "(x + y)^3*(t - 1)/2"}) {
    INFO(src);
    const Expr e = parse_expr(src, XYT);
    CHECK(structurally_equal(parse_expr(print(e, XYT), XYT), e));
  }
}

TEST_CASE("double constants stay inexact") {
  const Expr r = Expr::real(0.1);
  CHECK_FALSE(r.is_exact());
  const Expr s = r + Expr::constant(1);
  CHECK(s.is_constant());
  CHECK_FALSE(s.is_exact());
  CHECK(s.value() == doctest::Approx(1.1));
  CHECK(structurally_equal(parse_expr(print(r, XY), XY), Expr::constant(Rational(0.1))));
}
