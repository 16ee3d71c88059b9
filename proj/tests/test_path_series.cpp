#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <vector>

#include "jumpact/path_series.hpp"
#include "jumpact/rng.hpp"

using namespace jumpact;
using Catch::Approx;

TEST_CASE("increments differences within a single day", "[path_series]") {
  PathSeries path({0.0, 0.1, 0.3}, 1.0);

  auto one = increments(path, 1);
  REQUIRE(one.size() == 2);
  CHECK(one[0] == Approx(0.1));
  CHECK(one[1] == Approx(0.2));

  auto two = increments(path, 2);
  REQUIRE(two.size() == 1);
  CHECK(two[0] == Approx(0.3));
}

TEST_CASE("increments of a constant path are all zero", "[path_series]") {
  PathSeries path({2.5, 2.5, 2.5, 2.5}, 0.5);
  for (std::size_t k : {std::size_t{1}, std::size_t{2}, std::size_t{3}}) {
    for (double dx : increments(path, k)) CHECK(dx == 0.0);
  }
}

TEST_CASE("increments rejects bad stride and short paths", "[path_series]") {
  PathSeries path({0.0, 1.0}, 1.0);
  CHECK_THROWS_AS(increments(path, 0), std::invalid_argument);
  CHECK_THROWS_AS(increments(path, 2), std::invalid_argument);
}

TEST_CASE("increments never straddle a day boundary", "[path_series]") {
  // Two days of three observations each; the overnight gap 10.0 -> 0.0 must
  // not appear as an increment.
  PathSeries path({0.0, 1.0, 10.0, 0.0, 1.0, 2.0}, 1.0, {0, 3});
  auto one = increments(path, 1);
  REQUIRE(one.size() == 4);
  CHECK(one[0] == Approx(1.0));
  CHECK(one[1] == Approx(9.0));
  CHECK(one[2] == Approx(1.0));
  CHECK(one[3] == Approx(1.0));
}

TEST_CASE("PathSeries validates construction", "[path_series]") {
  CHECK_THROWS_AS(PathSeries({1.0}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(PathSeries({1.0, 2.0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(PathSeries({1.0, 2.0, 3.0}, 1.0, {0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(PathSeries({1.0, 2.0, 3.0}, 1.0, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(PathSeries({1.0, std::nan(""), 3.0}, 1.0), DataError);
  CHECK_THROWS_WITH(PathSeries({1.0, std::nan(""), 3.0}, 1.0),
                    Catch::Matchers::ContainsSubstring("index 1"));
}

TEST_CASE("truncated power variation keeps only small increments", "[path_series]") {
  // Increments 0.1 and 0.5; at cutoff 0.2 only the first survives.
  PathSeries path({0.0, 0.1, 0.6}, 1.0);
  CHECK(truncated_power_variation(path, 2.0, 0.2) == Approx(0.01));
  // Everything above the cutoff.
  CHECK(truncated_power_variation(path, 2.0, 0.05) == 0.0);
  // Closed comparison: an increment exactly at the cutoff is kept.
  PathSeries exact({0.0, 0.25}, 1.0);
  CHECK(truncated_power_variation(exact, 2.0, 0.25) == Approx(0.0625));
}

TEST_CASE("truncated power variation is nondecreasing in the cutoff", "[path_series]") {
  Rng rng(77);
  std::vector<double> values{0.0};
  for (int i = 0; i < 500; ++i) values.push_back(values.back() + 0.01 * rng.normal());
  PathSeries path(std::move(values), 1e-4);
  double prev = 0.0;
  for (double u : {0.001, 0.005, 0.01, 0.02, 0.05, 1.0}) {
    const double b = truncated_power_variation(path, 3.0, u);
    CHECK(b >= prev);
    prev = b;
  }
  // At a cutoff above every increment the truncation is inactive.
  double untruncated = 0.0;
  for (double dx : increments(path, 1)) untruncated += std::pow(std::abs(dx), 3.0);
  CHECK(truncated_power_variation(path, 3.0, 1.0) == Approx(untruncated));
}

TEST_CASE("stride consistency: floor(increments/k) per day", "[path_series]") {
  Rng rng(5);
  std::vector<double> values;
  std::vector<std::size_t> starts;
  for (int d = 0; d < 3; ++d) {
    starts.push_back(values.size());
    const int n_obs = 11 + 3 * d;  // 10, 13, 16 increments per day
    for (int i = 0; i < n_obs; ++i) values.push_back(rng.normal());
  }
  PathSeries path(std::move(values), 1.0, std::move(starts));
  for (std::size_t k = 1; k <= 5; ++k) {
    std::size_t expected = 0;
    for (std::size_t d = 0; d < path.day_count(); ++d) {
      expected += path.day_increment_count(d) / k;
    }
    CHECK(increments(path, k).size() == expected);
    CHECK(truncated_power_variation_counted(path, 2.0, 1e10, k).total ==
          static_cast<long>(expected));
  }
}

TEST_CASE("scaling observations by lambda scales B by lambda^p", "[path_series]") {
  Rng rng(11);
  std::vector<double> values{0.0};
  for (int i = 0; i < 300; ++i) values.push_back(values.back() + 0.02 * rng.normal());
  PathSeries path(values, 1e-5);

  const double lambda = 3.7;
  std::vector<double> scaled_values = values;
  for (double& v : scaled_values) v *= lambda;
  PathSeries scaled(std::move(scaled_values), 1e-5);

  for (double p : {2.0, 3.0, 4.0, 7.5}) {
    const double u = 0.03;
    const double b = truncated_power_variation(path, p, u);
    const double b_scaled = truncated_power_variation(scaled, p, lambda * u);
    REQUIRE(b > 0.0);
    CHECK(b_scaled == Approx(std::pow(lambda, p) * b).epsilon(1e-12));
  }
}

TEST_CASE("day permutation leaves aggregated power variation unchanged", "[path_series]") {
  Rng rng(23);
  std::vector<double> values;
  std::vector<std::size_t> starts;
  for (int d = 0; d < 5; ++d) {
    starts.push_back(values.size());
    double x = rng.normal();
    for (int i = 0; i < 40; ++i) {
      values.push_back(x);
      x += 0.01 * rng.normal();
    }
  }
  PathSeries path(std::move(values), 1e-4, std::move(starts));
  const std::vector<std::size_t> order{3, 0, 4, 2, 1};
  PathSeries permuted = path.with_day_order(order);
  for (double p : {3.0, 4.0}) {
    const double a = truncated_power_variation(path, p, 0.02);
    const double b = truncated_power_variation(permuted, p, 0.02);
    CHECK(b == Approx(a).epsilon(1e-12));
  }
}

TEST_CASE("Brownian fourth-power variation matches its scaling limit", "[path_series]") {
  // Pure Brownian path with constant volatility: B(4, inf, delta) divided by
  // delta * 3 sigma^4 T tends to 1. Oracle: direct summation of z^4 terms.
  const double sigma = 0.3;
  const double delta = 1e-5;
  const int n = 100000;
  Rng rng(2024);
  std::vector<double> values{0.0};
  values.reserve(n + 1);
  double sum_z4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum_z4 += z * z * z * z;
    values.push_back(values.back() + sigma * std::sqrt(delta) * z);
  }
  PathSeries path(std::move(values), delta);
  const double t = n * delta;
  const double b4 = truncated_power_variation(path, 4.0, 1e9);
  const double normalized = b4 / (delta * 3.0 * std::pow(sigma, 4.0) * t);
  // Same draws, computed directly: the ratio equals sum z^4 / (3 n).
  CHECK(normalized == Approx(sum_z4 / (3.0 * n)).epsilon(1e-10));
  // Monte Carlo error of the limit itself: sd ~ sqrt(96/9/n) ~ 0.0103.
  CHECK(normalized == Approx(1.0).margin(0.05));
}

TEST_CASE("cutoff_from_spec evaluates alpha * sigma * delta^varpi", "[path_series]") {
  TruncationSpec spec{6.0, 0.5, 0.25};
  const double delta = 1.0 / (252.0 * 23400.0);
  CHECK(cutoff_from_spec(spec, delta) == Approx(6.1771e-4).epsilon(1e-4));

  TruncationSpec unit{1.0, 0.5, 1.0};
  CHECK(cutoff_from_spec(unit, 1.0) == 1.0);

  TruncationSpec doubled = spec;
  doubled.alpha *= 2.0;
  CHECK(cutoff_from_spec(doubled, delta) == Approx(2.0 * cutoff_from_spec(spec, delta)));

  TruncationSpec bad{0.0, 0.5, 1.0};
  CHECK_THROWS_AS(cutoff_from_spec(bad, 1.0), std::invalid_argument);
  TruncationSpec bad_varpi{1.0, 0.6, 1.0};
  CHECK_THROWS_AS(cutoff_from_spec(bad_varpi, 1.0), std::invalid_argument);
}

TEST_CASE("rate exponents", "[path_series]") {
  auto r4 = rate_exponents(4.0);
  CHECK(r4.rho1 == Approx(0.25));
  CHECK(r4.rho2 == Approx(2.0 / 17.0));

  auto near2 = rate_exponents(2.0001);
  CHECK(near2.rho1 < 1e-4);
  CHECK(near2.rho2 < 1e-4);
  CHECK(near2.rho1 > near2.rho2);
  CHECK(near2.rho2 > 0.0);

  for (double p : {2.5, 3.0, 4.0, 6.0, 10.0}) {
    auto r = rate_exponents(p);
    CHECK(r.rho1 > r.rho2);
    CHECK(r.rho2 > 0.0);
  }
  CHECK_THROWS_AS(rate_exponents(2.0), std::invalid_argument);
}

TEST_CASE("rate condition check", "[path_series]") {
  CHECK(check_rate_condition(0.2, 0.25));
  CHECK_FALSE(check_rate_condition(0.5, rate_exponents(4.0).rho2));
  CHECK(check_rate_condition(0.3, 0.5));
}
