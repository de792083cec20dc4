#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "xlag/expr.hpp"

using namespace xlag;

namespace {
double ev(const Expr& e, std::vector<double> x, double u = 0.0, std::vector<double> z = {}) {
  return e.eval(EvalContext{x, u, z});
}
}  // namespace

TEST_CASE("arithmetic, precedence and associativity") {
  CHECK(ev(Expr::parse("1+2*3"), {}) == 7.0);
  CHECK(ev(Expr::parse("(1+2)*3"), {}) == 9.0);
  CHECK(ev(Expr::parse("2^3^2"), {}) == 512.0);  // right-associative
  CHECK(ev(Expr::parse("-2^2"), {}) == -4.0);
  CHECK(ev(Expr::parse("10-4-3"), {}) == 3.0);
  CHECK(ev(Expr::parse("8/4/2"), {}) == 1.0);
  CHECK(ev(Expr::parse("pi"), {}) == doctest::Approx(std::numbers::pi).epsilon(1e-15));
}

TEST_CASE("variables and functions") {
  const Expr f1 = Expr::parse("2*((z1+z2)/2)^2");
  CHECK(ev(f1, {}, 0.0, {1.0, 1.0}) == 2.0);
  CHECK(ev(f1, {}, 0.0, {1.0, -1.0}) == 0.0);
  CHECK(f1.max_z_index() == 2);
  CHECK(f1.max_x_index() == 0);
  CHECK_FALSE(f1.uses_u());

  const Expr f2 = Expr::parse("2*((z1+z2)/2)^2 + exp((z1-z2)^2) - 1");
  CHECK(ev(f2, {}, 0.0, {1.0, -1.0}) ==
        doctest::Approx(std::exp(4.0) - 1.0).epsilon(1e-15));

  const Expr g = Expr::parse("min(x1, max(u, abs(x2)))");
  CHECK(ev(g, {5.0, -3.0}, 2.0) == 3.0);
  CHECK(g.uses_u());
  CHECK(g.max_x_index() == 2);

  CHECK(ev(Expr::parse("sin(pi/2) + cos(0) + sqrt(9)"), {}) ==
        doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("constant zero parses") {
  const Expr zero = Expr::parse("0");
  CHECK(ev(zero, {1.0}, 2.0, {3.0}) == 0.0);
  CHECK(zero.max_x_index() == 0);
  CHECK(zero.max_z_index() == 0);
}

TEST_CASE("parse errors carry positions") {
  CHECK_THROWS_AS(Expr::parse(""), ParseError);
  CHECK_THROWS_AS(Expr::parse("1+"), ParseError);
  CHECK_THROWS_AS(Expr::parse("(1+2"), ParseError);
  CHECK_THROWS_AS(Expr::parse("foo(3)"), ParseError);
  CHECK_THROWS_AS(Expr::parse("z0"), ParseError);
  CHECK_THROWS_AS(Expr::parse("min(1)"), ParseError);
  try {
    Expr::parse("1 + @");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.position == 4);
  }
}

TEST_CASE("canonical print round-trips structurally") {
  const std::vector<std::string> sources = {
      "2*((z1+z2)/2)^2",
      "2*((z1+z2)/2)^2 + exp((z1-z2)^2) - 1",
      "sin(pi*x1)*sin(pi*x2)",
      "min(x1, max(u, abs(x2))) - sqrt(z1^2 + z2^2)",
      "-x1^2 + 3/(1+u)",
      "x2*(1-x2)",
  };
  for (const auto& s : sources) {
    const Expr a = Expr::parse(s);
    const Expr b = Expr::parse(a.print());
    CHECK(a.structurally_equal(b));
    CHECK(b.print() == a.print());
  }
}

TEST_CASE("round-tripped expressions evaluate identically") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  const Expr a = Expr::parse("exp(-(z1-u)^2) + x1*cos(x2) - abs(z2)/2");
  const Expr b = Expr::parse(a.print());
  for (int i = 0; i < 200; ++i) {
    std::vector<double> x{dist(rng), dist(rng)};
    std::vector<double> z{dist(rng), dist(rng)};
    const double u = dist(rng);
    CHECK(a.eval(EvalContext{x, u, z}) == b.eval(EvalContext{x, u, z}));
  }
}
