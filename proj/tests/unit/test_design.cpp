// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <random>

#include "invrob/design.hpp"
#include "invrob/errors.hpp"

using namespace invrob;

TEST_CASE("interval membership and nesting") {
  const auto fam = DesignFamily::interval();
  const DesignPoint d{-1.0, 2.0};
  CHECK(fam.contains(d, Vec{-1.0}));
  CHECK(fam.contains(d, Vec{2.0}));
  CHECK_FALSE(fam.contains(d, Vec{2.0000001}));
  CHECK(fam.nested(DesignPoint{0.0, 1.0}, d));
  CHECK_FALSE(fam.nested(DesignPoint{-2.0, 1.0}, d));
  CHECK_FALSE(fam.is_feasible(DesignPoint{1.0, 0.0}));
  CHECK_THROWS_AS(fam.contains(DesignPoint{1.0, 0.0}, Vec{0.5}), UsageError);
}

TEST_CASE("box, ball and scaled-set membership") {
  const auto box = DesignFamily::box(2);
  CHECK(box.contains(DesignPoint{0.0, 0.0, 1.0, 1.0}, Vec{1.0, 0.5}));
  CHECK_FALSE(box.contains(DesignPoint{0.0, 0.0, 1.0, 1.0}, Vec{1.0, 1.5}));

  const auto ball = DesignFamily::ball({1.0, 1.0});
  CHECK(ball.contains(DesignPoint{1.0}, Vec{2.0, 1.0}));
  CHECK_FALSE(ball.contains(DesignPoint{1.0}, Vec{1.8, 1.8}));

  const auto tri = DesignFamily::scaled_set({0.0, 0.0}, {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}});
  CHECK(tri.contains(DesignPoint{2.0}, Vec{1.0, 1.0}));
  CHECK_FALSE(tri.contains(DesignPoint{1.0}, Vec{0.6, 0.6}));
  CHECK(tri.nested(DesignPoint{1.0}, DesignPoint{2.0}));
}

TEST_CASE("families above dimension 3 are unsupported") {
  CHECK_THROWS_AS(DesignFamily::ball({0.0, 0.0, 0.0, 0.0}), UnsupportedError);
  CHECK_THROWS_AS(DesignFamily::scaled_set({0.0, 0.0, 0.0, 0.0}, {{0.0, 0.0, 0.0, 0.0}}), UnsupportedError);
}

TEST_CASE("inner maximization: examples") {
  const auto fam = DesignFamily::interval();
  const Box wide({-12.0}, {12.0});
  auto r = inner_max(fam, DesignPoint{-1.0, 3.0}, [](ConstSpan u) { return u[0]; }, Convexity::ConvexInU, wide);
  CHECK(r.value == 3.0);
  CHECK(r.witness[0] == 3.0);

  r = inner_max(fam, DesignPoint{-1.0, 3.0}, [](ConstSpan u) { return u[0] * u[0]; }, Convexity::ConvexInU, wide);
  CHECK(r.value == 9.0);

  // The box clips the interval before the maximization.
  r = inner_max(fam, DesignPoint{-20.0, 30.0}, [](ConstSpan u) { return u[0]; }, Convexity::ConvexInU, wide);
  CHECK(r.value == 12.0);

  const auto box2 = DesignFamily::box(2);
  r = inner_max(box2, DesignPoint{0.0, 0.0, 1.0, 2.0}, [](ConstSpan u) { return u[0] + 2.0 * u[1]; },
                Convexity::MonotoneInU, Box::cube(2, -12.0, 12.0));
  CHECK(r.value == 5.0);
}

TEST_CASE("inner maximization of affine functions is exact at the endpoints") {
  const auto fam = DesignFamily::interval();
  const Box wide({-12.0}, {12.0});
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> C(-5.0, 5.0), L(-10.0, 0.0), W(0.0, 10.0);
  for (int t = 0; t < 500; ++t) {
    const double a = C(rng), b = C(rng), lo = L(rng), hi = lo + W(rng);
    const auto r = inner_max(fam, DesignPoint{lo, hi}, [&](ConstSpan u) { return a * u[0] + b; },
                             Convexity::ConvexInU, wide);
    CHECK(r.value == std::max(a * lo + b, a * hi + b));
  }
}

TEST_CASE("general-flag maximization finds an interior maximum") {
  const auto fam = DesignFamily::interval();
  const Box wide({-12.0}, {12.0});
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> C(-0.9, 0.9);
  for (int t = 0; t < 50; ++t) {
    const double c = C(rng);
    const auto r = inner_max(fam, DesignPoint{-1.0, 1.0}, [&](ConstSpan u) { return -(u[0] - c) * (u[0] - c); },
                             Convexity::General, wide);
    CHECK(std::abs(r.value) <= 1e-8);
    CHECK(std::abs(r.witness[0] - c) <= 1e-5);
  }
}

TEST_CASE("general-flag maximization over a disc") {
  const auto ball = DesignFamily::ball({0.0, 0.0});
  const auto r = inner_max(ball, DesignPoint{1.0}, [](ConstSpan u) { return -(u[0] - 0.3) * (u[0] - 0.3) - u[1] * u[1]; },
                           Convexity::General, Box::cube(2, -12.0, 12.0));
  CHECK(std::abs(r.value) <= 1e-8);
  CHECK(ball.contains(DesignPoint{1.0}, r.witness.values));
}

TEST_CASE("inner maximum is monotone under nesting and the witness lies in W") {
  const auto fam = DesignFamily::interval();
  const Box wide({-12.0}, {12.0});
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> L(-3.0, 0.0), G(0.0, 2.0);
  auto phi = [](ConstSpan u) { return std::sin(3.0 * u[0]) + 0.1 * u[0]; };
  for (int t = 0; t < 50; ++t) {
    const double lo = L(rng), hi = lo + G(rng);
    const DesignPoint inner{lo, hi}, outer{lo - G(rng), hi + G(rng)};
    const auto a = inner_max(fam, inner, phi, Convexity::General, wide);
    const auto b = inner_max(fam, outer, phi, Convexity::General, wide);
    CHECK(b.value >= a.value - 1e-9);
    CHECK(fam.contains(inner, a.witness.values));
    CHECK(fam.contains(outer, b.witness.values));
  }
}

TEST_CASE("empty intersection with the box") {
  const auto fam = DesignFamily::interval();
  CHECK_THROWS_AS(inner_max(fam, DesignPoint{20.0, 30.0}, [](ConstSpan u) { return u[0]; }, Convexity::ConvexInU,
                            Box({-12.0}, {12.0})),
                  DomainError);
  CHECK_THROWS_AS(clip_to_box(fam, DesignPoint{20.0, 30.0}, Box({-12.0}, {12.0})), DomainError);
}

TEST_CASE("clipping to the box") {
  const auto fam = DesignFamily::interval();
  auto c = clip_to_box(fam, DesignPoint{-20.0, 3.0}, Box({-12.0}, {12.0}));
  CHECK(c.truncated);
  CHECK(c.d == DesignPoint{-12.0, 3.0});
  c = clip_to_box(fam, DesignPoint{-2.0, 3.0}, Box({-12.0}, {12.0}));
  CHECK_FALSE(c.truncated);
  const auto ball = DesignFamily::ball({0.0});
  CHECK(clip_to_box(ball, DesignPoint{13.0}, Box({-12.0}, {12.0})).truncated);
}

TEST_CASE("reference coordinates round-trip and map into W") {
  std::mt19937_64 rng(31);
  const DesignFamily fams[] = {DesignFamily::interval(), DesignFamily::box(2), DesignFamily::ball({0.5, -0.5}),
                               DesignFamily::scaled_set({0.0, 0.0}, {{-1.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}})};
  const DesignPoint ds[] = {DesignPoint{-1.0, 2.0}, DesignPoint{-1.0, 0.0, 1.0, 3.0}, DesignPoint{1.5},
                            DesignPoint{2.0}};
  for (int k = 0; k < 4; ++k) {
    for (int t = 0; t < 100; ++t) {
      const Vec u = fams[k].sample(ds[k], rng);
      CHECK(fams[k].contains(ds[k], u));
      const Vec back = fams[k].from_reference(ds[k], fams[k].to_reference(ds[k], u));
      for (std::size_t i = 0; i < u.size(); ++i) CHECK(back[i] == doctest::Approx(u[i]).epsilon(1e-12));
    }
  }
}
