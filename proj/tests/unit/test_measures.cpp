// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "invrob/errors.hpp"
#include "invrob/measures.hpp"
#include "oracle_values.hpp"

using namespace invrob;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("normal distribution function against high-precision values") {
  CHECK(std::abs(std_normal_cdf(1.0) - oracle::kPsi1) <= 1e-12);
  CHECK(std::abs(std_normal_cdf(1.7) - oracle::kPsi1_7) <= 1e-12);
  CHECK(std::abs(std_normal_cdf(-1.7) - oracle::kPsiMinus1_7) <= 1e-12);
  CHECK(std::abs(std_normal_cdf(0.3) - oracle::kPsi0_3) <= 1e-12);
  CHECK(rel(std_normal_cdf(-5.0), oracle::kPsiMinus5) <= 1e-12);
  CHECK(rel(std_normal_cdf(-12.0), oracle::kPsiMinus12) <= 1e-12);
  CHECK(std_normal_cdf(0.0) == 0.5);
}

TEST_CASE("normal distribution function is symmetric") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> T(-8.0, 8.0);
  for (int k = 0; k < 100; ++k) {
    const double t = T(rng);
    CHECK(std::abs(std_normal_cdf(t) + std_normal_cdf(-t) - 1.0) <= 1e-15);
  }
}

TEST_CASE("measure examples") {
  const Box wide = Box::cube(1, -12.0, 12.0);
  CHECK(measure(MeasureSpec::volume(), DesignFamily::interval(), DesignPoint{-1.0, 2.5}, wide) == 3.5);
  CHECK(measure(MeasureSpec::volume(), DesignFamily::box(2), DesignPoint{0.0, 0.0, 2.0, 3.0}, Box::cube(2, -12, 12)) ==
        6.0);
  CHECK(measure(MeasureSpec::volume(), DesignFamily::ball({0.0, 0.0}), DesignPoint{1.0}, Box::cube(2, -12, 12)) ==
        doctest::Approx(std::numbers::pi).epsilon(1e-14));
  const auto g = MeasureSpec::gaussian({0.0}, {1.0});
  CHECK(std::abs(measure(g, DesignFamily::interval(), DesignPoint{-1.0, 1.0}, wide) -
                 (2.0 * oracle::kPsi1 - 1.0)) <= 1e-12);
  // Clipping: the part beyond the box does not count.
  CHECK(measure(MeasureSpec::volume(), DesignFamily::interval(), DesignPoint{-20.0, 0.0}, wide) == 12.0);
}

TEST_CASE("distance measures") {
  const auto mind = MeasureSpec::min_dist(std::vector<Vec>{{3.0}});
  CHECK(measure(mind, DesignFamily::interval(), DesignPoint{-1.0, 1.0}, Box::cube(1, -12, 12)) ==
        doctest::Approx(2.0));
  CHECK(distance_to_bad(MeasureSpec::min_dist(Box({1.0, 1.0}, {2.0, 2.0})), Vec{0.0, 1.5}) == doctest::Approx(1.0));
  CHECK_FALSE(mind.increasing());
  CHECK(MeasureSpec::max_dist(std::vector<Vec>{{3.0}}).increasing());
}

TEST_CASE("gaussian interval mass agrees with Monte Carlo") {
  std::mt19937_64 rng(43);
  std::normal_distribution<double> N(0.0, 1.0);
  std::uniform_real_distribution<double> L(-3.0, 1.0), W(0.1, 3.0);
  const auto g = MeasureSpec::gaussian({0.0}, {1.0});
  const std::size_t samples = 1000000;
  std::vector<double> draws(samples);
  for (auto& s : draws) s = N(rng);
  for (int k = 0; k < 20; ++k) {
    const double lo = L(rng), hi = lo + W(rng);
    std::size_t hits = 0;
    for (double s : draws) hits += (s >= lo && s <= hi);
    const double p_hat = static_cast<double>(hits) / samples;
    const double p = measure(g, DesignFamily::interval(), DesignPoint{lo, hi}, Box::cube(1, -12, 12));
    const double se = std::sqrt(p * (1.0 - p) / samples);
    CHECK(std::abs(p_hat - p) <= 3.0 * se + 1e-12);
  }
}

TEST_CASE("volume scales as alpha^m on scaled sets") {
  const auto tri = DesignFamily::scaled_set({0.0, 0.0}, {{0.0, 0.0}, {2.0, 0.0}, {0.0, 1.0}});
  const auto tet = DesignFamily::scaled_set({0.0, 0.0, 0.0}, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  const auto vol = MeasureSpec::volume();
  for (double a : {0.5, 1.0, 1.7, 3.0}) {
    CHECK(measure(vol, tri, DesignPoint{a}, Box::cube(2, -12, 12)) == doctest::Approx(a * a).epsilon(1e-12));
    CHECK(measure(vol, tet, DesignPoint{a}, Box::cube(3, -12, 12)) == doctest::Approx(a * a * a / 6.0).epsilon(1e-12));
  }
}

TEST_CASE("gaussian quadrature on discs, balls and triangles") {
  const Box b2 = Box::cube(2, -12, 12), b3 = Box::cube(3, -12, 12);
  CHECK(rel(measure(MeasureSpec::gaussian({0, 0}, {1, 1}), DesignFamily::ball({0.0, 0.0}), DesignPoint{1.2}, b2),
            oracle::kGaussDiscCentered) <= 1e-6);
  CHECK(rel(measure(MeasureSpec::gaussian({0, 0}, {1, 1}), DesignFamily::ball({0.5, -0.3}), DesignPoint{1.2}, b2),
            oracle::kGaussDiscOffset) <= 1e-6);
  CHECK(rel(measure(MeasureSpec::gaussian({0, 0}, {0.5, 2.0}), DesignFamily::ball({0.2, 0.1}), DesignPoint{0.9}, b2),
            oracle::kGaussDiscAniso) <= 1e-6);
  CHECK(rel(measure(MeasureSpec::gaussian({0, 0, 0}, {1, 1, 1}), DesignFamily::ball({0.0, 0.0, 0.0}),
                    DesignPoint{1.1}, b3),
            oracle::kGaussBall3) <= 1e-6);
  const auto tri = DesignFamily::scaled_set({0.0, 0.0}, {{-1.0, -0.5}, {1.5, -0.5}, {0.0, 1.0}});
  CHECK(rel(measure(MeasureSpec::gaussian({0, 0}, {1.0, 0.7}), tri, DesignPoint{1.0}, b2), oracle::kGaussTriangle) <=
        1e-6);
}

TEST_CASE("increasing measures are monotone under nesting") {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> R(0.0, 3.0);
  const auto g2 = MeasureSpec::gaussian({0.3, -0.2}, {1.0, 0.5});
  const auto ball = DesignFamily::ball({0.0, 0.0});
  for (int k = 0; k < 30; ++k) {
    const double a = R(rng), b = a + R(rng);
    CHECK(measure(g2, ball, DesignPoint{a}, Box::cube(2, -12, 12)) <=
          measure(g2, ball, DesignPoint{b}, Box::cube(2, -12, 12)) + 1e-12);
    const auto g1 = MeasureSpec::gaussian({0.0}, {1.0});
    CHECK(measure(g1, DesignFamily::interval(), DesignPoint{-a, a}, Box::cube(1, -12, 12)) <=
          measure(g1, DesignFamily::interval(), DesignPoint{-b, b}, Box::cube(1, -12, 12)));
  }
}

TEST_CASE("measure specs are validated") {
  CHECK_THROWS_AS(MeasureSpec::gaussian({0.0}, {0.0}).validate(1), UsageError);
  CHECK_THROWS_AS(MeasureSpec::gaussian({0.0}, {1.0}).validate(2), UsageError);
  CHECK_NOTHROW(MeasureSpec::volume().validate(3));
}

TEST_CASE("Gauss-Legendre rule integrates polynomials exactly") {
  Vec x, w;
  gauss_legendre(8, x, w);
  double s0 = 0.0, s14 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s0 += w[i];
    s14 += w[i] * std::pow(x[i], 14);
  }
  CHECK(s0 == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(s14 == doctest::Approx(2.0 / 15.0).epsilon(1e-13));
}
