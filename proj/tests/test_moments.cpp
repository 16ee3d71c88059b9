#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "jumpact/moments.hpp"
#include "jumpact/normal.hpp"

using namespace jumpact;
using Catch::Approx;

TEST_CASE("absolute normal moments", "[moments]") {
  CHECK(abs_normal_moment(2.0) == 1.0);
  CHECK(abs_normal_moment(4.0) == 3.0);
  // Even moments are the double factorials, exactly.
  for (int j = 1; j <= 6; ++j) {
    CHECK(abs_normal_moment(2.0 * j) == odd_double_factorial(j));
  }
  // Odd moment through the gamma formula: m_3 = 2 sqrt(2/pi).
  CHECK(abs_normal_moment(3.0) == Approx(2.0 * std::sqrt(2.0 / M_PI)).epsilon(1e-13));
  // Non-integer power against a directly evaluated gamma expression.
  CHECK(abs_normal_moment(2.5) ==
        Approx(std::pow(2.0, 1.25) * std::tgamma(1.75) / std::sqrt(M_PI)).epsilon(1e-13));
  CHECK_THROWS_AS(abs_normal_moment(0.0), std::invalid_argument);
}

TEST_CASE("joint absolute moment: exact expansions", "[moments]") {
  // E(U^4 (U+V)^4) = E U^8 + 6 E U^6 E V^2 + 9 = 105 + 90 + 9.
  CHECK(joint_abs_moment_expansion(4, 2) == Approx(204.0));
  // a^2 = 2: 105 + 90*2 + 9*4.
  CHECK(joint_abs_moment_expansion(4, 3) == Approx(321.0));
  CHECK_THROWS_AS(joint_abs_moment_expansion(3, 2), std::invalid_argument);
}

TEST_CASE("joint absolute moment: quadrature agrees with expansion", "[moments]") {
  for (int p : {4, 6, 8}) {
    for (int k : {2, 3, 4}) {
      const double exact = joint_abs_moment_expansion(p, k);
      const double quad = joint_abs_moment_quadrature(static_cast<double>(p), k);
      INFO("p=" << p << " k=" << k);
      CHECK(quad == Approx(exact).epsilon(1e-10));
    }
  }
}

TEST_CASE("joint absolute moment dominates the product of marginals", "[moments]") {
  // Both factors share U, so the joint moment exceeds m_p^2.
  for (double p : {3.0, 4.0, 5.0, 6.0}) {
    for (int k : {2, 3, 4}) {
      const double m_p = abs_normal_moment(p);
      CHECK(joint_abs_moment(p, k) >= m_p * m_p);
    }
  }
}

TEST_CASE("variance constant N(p,k)", "[moments]") {
  CHECK(n_constant(4.0, 2) == Approx(32.0 / 7.0).epsilon(1e-12));
  // At p = 4 the constant collapses to (16/35) k (2k^2 - k - 1).
  for (int k = 2; k <= 5; ++k) {
    const double closed = 16.0 / 35.0 * k * (2.0 * k * k - k - 1.0);
    CHECK(n_constant(4.0, k) == Approx(closed).epsilon(1e-12));
  }
  for (double p : {2.5, 3.0, 4.0, 6.0}) {
    for (int k : {2, 3, 5}) {
      CHECK(n_constant(p, k) > 0.0);
    }
  }
  CHECK_THROWS_AS(n_constant(2.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(n_constant(4.0, 1), std::invalid_argument);
}

TEST_CASE("moment table bundles the constants", "[moments]") {
  const MomentTable t = MomentTable::compute(4.0, 2);
  CHECK(t.m_p == 3.0);
  CHECK(t.m_2p == 105.0);
  CHECK(t.m_kp == Approx(204.0));
  CHECK(t.n_pk == Approx(32.0 / 7.0));
  CHECK(t.m_2p > t.m_p * t.m_p);
}

TEST_CASE("normal quantile matches reference values", "[moments]") {
  CHECK(normal_upper_quantile(0.5) == Approx(0.0).margin(1e-12));
  CHECK(normal_upper_quantile(0.05) == Approx(1.6448536269514722).margin(1e-9));
  CHECK(normal_upper_quantile(0.025) == Approx(1.9599639845400545).margin(1e-9));
  CHECK(normal_upper_quantile(0.10) == Approx(1.2815515655446004).margin(1e-9));
  // Round trip through the CDF across the useful range.
  for (double a : {1e-6, 1e-3, 0.01, 0.05, 0.2, 0.5, 0.8, 0.99, 1.0 - 1e-6}) {
    CHECK(normal_cdf(normal_quantile(a)) == Approx(a).epsilon(1e-12));
  }
  CHECK_THROWS_AS(normal_quantile(0.0), std::invalid_argument);
  CHECK_THROWS_AS(normal_quantile(1.0), std::invalid_argument);
}
