// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "invrob/local_search.hpp"

using namespace invrob;

TEST_CASE("compass search minimizes a rotated quadratic") {
  auto f = [](ConstSpan x) {
    const double a = x[0] + x[1] - 1.0, b = x[0] - x[1] + 0.5;
    return 10.0 * a * a + b * b;
  };
  const auto r = compass_minimize(f, Box::cube(2, -5.0, 5.0), {4.0, -4.0}, CompassConfig{});
  CHECK(r.value <= 1e-12);
  CHECK(r.x[0] == doctest::Approx(0.25).epsilon(1e-5));
  CHECK(r.x[1] == doctest::Approx(0.75).epsilon(1e-5));
}

TEST_CASE("compass search respects the box and clamps the start") {
  auto f = [](ConstSpan x) { return x[0]; };
  const auto r = compass_minimize(f, Box({-1.0}, {2.0}), {10.0}, CompassConfig{});
  CHECK(r.x[0] == -1.0);
}

TEST_CASE("stop_at and max_evals end the search early") {
  auto f = [](ConstSpan x) { return (x[0] - 3.0) * (x[0] - 3.0); };
  const auto r = compass_minimize(f, Box({-10.0}, {10.0}), {0.0}, CompassConfig{}, 1.0);
  CHECK(r.value <= 1.0);
  CHECK(r.value > 0.0);
  CompassConfig few;
  few.max_evals = 5;
  CHECK(compass_minimize(f, Box({-10.0}, {10.0}), {0.0}, few).evals <= 5);
}

TEST_CASE("stall detection stops a creeping search") {
  std::size_t calls = 0;
  auto f = [&](ConstSpan x) {
    ++calls;
    return 1.0 + 1e-12 * std::abs(x[0] - 1.0);
  };
  CompassConfig cfg;
  cfg.stall_sweeps = 3;
  const auto r = compass_minimize(f, Box({-10.0}, {10.0}), {0.0}, cfg);
  CHECK(r.evals < 40);
}

TEST_CASE("multistart finds the global basin") {
  auto f = [](ConstSpan x) { return std::min((x[0] + 2.0) * (x[0] + 2.0) + 0.5, 2.0 * (x[0] - 3.0) * (x[0] - 3.0)); };
  const auto r = multistart_minimize(f, Box({-5.0}, {5.0}), 9, 3, CompassConfig{});
  CHECK(r.x[0] == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("box grid respects the point cap") {
  CHECK(box_grid(Box::cube(2, 0.0, 1.0), 5, 1000).size() == 25);
  CHECK(box_grid(Box::cube(3, 0.0, 1.0), 20, 1000).size() <= 1000);
  const auto g = box_grid(Box({0.0}, {1.0}), 3, 100);
  REQUIRE(g.size() == 3);
  CHECK(g[0][0] == 0.0);
  CHECK(g[2][0] == 1.0);
}
