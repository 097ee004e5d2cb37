// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <string>

#include "invrob/errors.hpp"
#include "invrob/expr.hpp"

using namespace invrob;

namespace {

double ev(const std::string& s, Vec x = {}, Vec u = {}) { return expr::compile(s)(x, u); }

std::string error_of(const std::string& s) {
  try {
    expr::compile(s);
  } catch (const SpecError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("precedence and associativity") {
  CHECK(ev("1 + 2 * 3") == 7.0);
  CHECK(ev("(1 + 2) * 3") == 9.0);
  CHECK(ev("2^3^2") == 512.0);
  CHECK(ev("-2^2") == -4.0);
  CHECK(ev("2^-1") == 0.5);
  CHECK(ev("8 / 4 / 2") == 1.0);
  CHECK(ev("1 - 2 - 3") == -4.0);
  CHECK(ev("--3") == 3.0);
  CHECK(ev("1.5e2 + .5") == 150.5);
}

TEST_CASE("variables and functions") {
  CHECK(ev("x[0]*(u[0] - 1) + exp(u[0]) - 1", {2.0}, {0.0}) == -2.0);
  CHECK(ev("log(exp(x[1]))", {0.0, 1.25}) == 1.25);
  CHECK(ev("min(3, x[0], 7)", {-1.0}) == -1.0);
  CHECK(ev("max(u[0], u[1])", {}, {2.0, 5.0}) == 5.0);
  const auto p = expr::compile("x[2] + u[1]");
  CHECK(p.x_arity() == 3);
  CHECK(p.u_arity() == 2);
  CHECK(p.source() == "x[2] + u[1]");
}

TEST_CASE("deep expressions use more than the inline stack") {
  std::string s = "1";
  for (int k = 0; k < 40; ++k) s = "(1 + " + s + ")";
  CHECK(ev(s) == 41.0);
  std::string r = "x[0]";
  for (int k = 0; k < 40; ++k) r = "x[0] * (" + r + ")";
  CHECK(ev(r, {1.01}) == doctest::Approx(std::pow(1.01, 41)).epsilon(1e-13));
}

TEST_CASE("syntax errors name the column") {
  CHECK(error_of("1 + ").find("column") != std::string::npos);
  CHECK(error_of("1 + * 2").find("column 5") != std::string::npos);
  CHECK(error_of("x[0").find("column") != std::string::npos);
  CHECK_FALSE(error_of("foo(1)").empty());
  CHECK_FALSE(error_of("min(1)").empty());
  CHECK_FALSE(error_of("exp(1, 2)").empty());
  CHECK_FALSE(error_of("(1 + 2").empty());
  CHECK_FALSE(error_of("1 2").empty());
  CHECK_FALSE(error_of("y[0]").empty());
  CHECK_FALSE(error_of("").empty());
}

TEST_CASE("arity is checked against the problem") {
  CHECK_NOTHROW(expr::make_function("x[0] + u[0]", 1, 1, Convexity::ConvexInU));
  CHECK_THROWS_AS(expr::make_function("x[1]", 1, 1, Convexity::General), SpecError);
  CHECK_THROWS_AS(expr::make_function("u[2]", 1, 2, Convexity::General), SpecError);
  const auto f = expr::make_function("x[0]^2 - u[0]", 1, 1, Convexity::ConvexInU);
  CHECK(f.eval(Vec{3.0}, Vec{1.0}) == 8.0);
  CHECK(f.source == "x[0]^2 - u[0]");
  CHECK(f.convexity == Convexity::ConvexInU);
}
