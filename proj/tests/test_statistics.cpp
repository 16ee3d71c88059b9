#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "jumpact/simulator.hpp"
#include "jumpact/statistics.hpp"

using namespace jumpact;
using Catch::Approx;

namespace {

PathSeries brownian_path(int n, double sigma, double delta, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> values{0.0};
  values.reserve(n + 1);
  for (int i = 0; i < n; ++i) {
    values.push_back(values.back() + sigma * std::sqrt(delta) * rng.normal());
  }
  return PathSeries(std::move(values), delta);
}

}  // namespace

TEST_CASE("one nonzero increment inside a k-block gives S_n = 1", "[statistics]") {
  // The single increment survives at both frequencies, so numerator and
  // denominator are identical.
  PathSeries path({0.0, 0.001, 0.001, 0.001, 0.001}, 1e-5);
  FiniteActivityTestConfig cfg;
  cfg.truncation = {1.0, 0.5, 1.0};  // cutoff = sqrt(delta) ~ 3.2e-3
  CHECK(s_n(path, cfg) == 1.0);
}

TEST_CASE("diagnostic mode k = 1 gives S_n = 1 exactly", "[statistics]") {
  PathSeries path = brownian_path(512, 0.25, 1e-6, 9);
  std::vector<double> cutoffs(path.day_count(), 1e9);
  CHECK(s_n_ratio(path, 4.0, cutoffs, 1) == 1.0);
}

TEST_CASE("single surviving increment collapses v_n to N(p,k)", "[statistics]") {
  PathSeries path({0.0, 0.001, 0.001, 0.001, 0.001}, 1e-5);
  FiniteActivityTestConfig cfg;
  cfg.truncation = {1.0, 0.5, 1.0};
  const MomentTable moments = MomentTable::compute(cfg.p, cfg.k);
  CHECK(v_n(path, cfg, moments) == Approx(moments.n_pk));
}

TEST_CASE("fully truncated sample raises a degenerate error", "[statistics]") {
  PathSeries path({0.0, 1.0, 2.0, 3.0}, 1e-5);
  FiniteActivityTestConfig cfg;
  cfg.truncation = {1.0, 0.5, 0.001};  // cutoff far below every increment
  CHECK_THROWS_AS(s_n(path, cfg), DegenerateSampleError);

  const MomentTable moments = MomentTable::compute(cfg.p, cfg.k);
  const TestReport rep = test_finite_activity(path, cfg, moments);
  CHECK(rep.degenerate);
  CHECK_FALSE(rep.reject);
  CHECK(rep.message.find("truncating") != std::string::npos);
}

TEST_CASE("degenerate error names the vanished factor of S'_n", "[statistics]") {
  PathSeries path({0.0, 1.0, 2.0, 3.0}, 1e-5);
  InfiniteActivityTestConfig cfg;
  cfg.truncation = {1.0, 0.5, 0.001};
  CHECK_THROWS_WITH(s_n_prime(path, cfg), Catch::Matchers::ContainsSubstring("B(p'"));
  const TestReport rep = test_infinite_activity(path, cfg);
  CHECK(rep.degenerate);
}

TEST_CASE("no increments between the two cutoffs forces S'_n = 1", "[statistics]") {
  // Increments 0.001 and 0.1: the small one sits below u, the big one above
  // gamma*u, so both powers see identical sums at both cutoffs.
  PathSeries path({0.0, 0.001, 0.101}, 1e-5);
  InfiniteActivityTestConfig cfg;
  cfg.truncation = {1.0, 0.5, 1.0};  // u ~ 3.16e-3, gamma*u ~ 6.3e-3
  CHECK(s_n_prime(path, cfg) == 1.0);
}

TEST_CASE("one surviving increment makes the raw V'_n vanish", "[statistics]") {
  // With B(q, u) = B(q, gamma u) = x^q for every power q, the bracket of the
  // variance estimator cancels term by term.
  PathSeries path({0.0, 0.002}, 1e-5);
  InfiniteActivityTestConfig cfg;
  cfg.truncation = {1.0, 0.5, 1.0};
  const double v = v_n_prime(path, cfg);
  CHECK(v == Approx(0.0).margin(1e-12));
  // Non-positive raw variance marks the test degenerate, with the raw value
  // reported.
  const TestReport rep = test_infinite_activity(path, cfg);
  CHECK(rep.degenerate);
  CHECK(rep.variance_raw == Approx(0.0).margin(1e-12));
}

TEST_CASE("V'_n is continuous as gamma approaches 1", "[statistics]") {
  PathSeries path = brownian_path(2000, 0.25, 1e-6, 31);
  InfiniteActivityTestConfig cfg;
  cfg.truncation = {6.0, 0.5, 0.25};
  double prev = std::abs(v_n_prime(path, cfg));
  for (double gamma : {1.5, 1.1, 1.01, 1.001}) {
    InfiniteActivityTestConfig c = cfg;
    c.gamma = gamma;
    const double v = std::abs(v_n_prime(path, c));
    CHECK(v <= prev + 1e-12);
    prev = v;
  }
  CHECK(prev < 1e-8);
}

TEST_CASE("scale equivariance of statistics, variances and decisions", "[statistics]") {
  SimulationConfig sim;
  sim.jumps.kind = JumpComponentSpec::Kind::compound_poisson;
  sim.jumps.lambda_per_day = 20.0;
  sim.delta = seconds_to_years(5.0);
  sim.seed = 404;
  const PathSeries path = simulate_path(sim);

  for (double lambda : {2.0, 7.3}) {
    std::vector<double> scaled_values(path.values().begin(), path.values().end());
    for (double& v : scaled_values) v *= lambda;
    const PathSeries scaled(std::move(scaled_values), path.delta(), path.day_starts());

    FiniteActivityTestConfig fa;
    fa.truncation = {8.0, 0.5, 0.25};
    FiniteActivityTestConfig fa_scaled = fa;
    fa_scaled.truncation.sigma_ref *= lambda;
    const MomentTable moments = MomentTable::compute(fa.p, fa.k);

    CHECK(s_n(scaled, fa_scaled) == Approx(s_n(path, fa)).epsilon(1e-12));
    CHECK(v_n(scaled, fa_scaled, moments) == Approx(v_n(path, fa, moments)).epsilon(1e-12));

    InfiniteActivityTestConfig ia;
    ia.truncation = {8.0, 0.5, 0.25};
    InfiniteActivityTestConfig ia_scaled = ia;
    ia_scaled.truncation.sigma_ref *= lambda;
    CHECK(s_n_prime(scaled, ia_scaled) == Approx(s_n_prime(path, ia)).epsilon(1e-12));
    CHECK(v_n_prime(scaled, ia_scaled) == Approx(v_n_prime(path, ia)).epsilon(1e-12));

    const TestReport r1 = test_finite_activity(path, fa, moments);
    const TestReport r2 = test_finite_activity(scaled, fa_scaled, moments);
    CHECK(r1.reject == r2.reject);
    CHECK(r2.z_score == Approx(r1.z_score).epsilon(1e-10));

    const TestReport q1 = test_infinite_activity(path, ia);
    const TestReport q2 = test_infinite_activity(scaled, ia_scaled);
    CHECK(q1.reject == q2.reject);
    CHECK(q1.degenerate == q2.degenerate);
  }
}

TEST_CASE("statistics are positive whenever defined", "[statistics]") {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    PathSeries path = brownian_path(4000, 0.25, 1e-6, seed);
    FiniteActivityTestConfig fa;
    fa.truncation = {5.0, 0.5, 0.25};
    InfiniteActivityTestConfig ia;
    ia.truncation = {5.0, 0.5, 0.25};
    CHECK(s_n(path, fa) > 0.0);
    CHECK(s_n_prime(path, ia) > 0.0);
  }
}

TEST_CASE("noise-dominated limits", "[statistics]") {
  FiniteActivityTestConfig fa;
  CHECK(noise_limit(fa) == 0.5);
  fa.k = 3;
  CHECK(noise_limit(fa) == Approx(1.0 / 3.0));
  InfiniteActivityTestConfig ia;
  CHECK(noise_limit(ia) == Approx(2.0));
}

TEST_CASE("level one half collapses the critical region to the null limit", "[statistics]") {
  PathSeries path = brownian_path(4000, 0.25, 1e-6, 77);
  InfiniteActivityTestConfig ia;
  ia.level = 0.5;
  ia.truncation = {5.0, 0.5, 0.25};
  const TestReport rep = test_infinite_activity(path, ia);
  if (!rep.degenerate) {
    CHECK(rep.critical_value == Approx(rep.null_limit).margin(1e-9));
    CHECK(rep.reject == (rep.statistic < rep.null_limit));
  }
}

TEST_CASE("zero variance with the statistic at the limit does not reject", "[statistics]") {
  // Rejection is strict inequality below the critical value.
  TestReport rep;
  rep.statistic = 2.0;
  rep.null_limit = 2.0;
  rep.variance = 0.0;
  CHECK(critical_value(rep.null_limit, rep.variance, 0.05) == rep.null_limit);
  CHECK_FALSE(rep.statistic < critical_value(rep.null_limit, rep.variance, 0.05));
}

TEST_CASE("report invariants: reject equals statistic below critical value", "[statistics]") {
  SimulationConfig sim;
  sim.delta = seconds_to_years(5.0);
  sim.seed = 11;
  const PathSeries path = simulate_path(sim);
  FiniteActivityTestConfig fa;
  fa.truncation = {8.0, 0.5, 0.25};
  const MomentTable moments = MomentTable::compute(fa.p, fa.k);
  const TestReport rep = test_finite_activity(path, fa, moments);
  REQUIRE_FALSE(rep.degenerate);
  CHECK(rep.reject == (rep.statistic < rep.critical_value));
  CHECK(rep.z_score ==
        Approx((rep.statistic - rep.null_limit) / std::sqrt(rep.variance)).epsilon(1e-12));
  CHECK(rep.n_increments_used > 0);
  CHECK(rep.truncation_cutoffs.size() == path.day_count());
}

TEST_CASE("config validation", "[statistics]") {
  FiniteActivityTestConfig fa;
  fa.p = 2.0;
  CHECK_THROWS_AS(fa.validate(), std::invalid_argument);
  fa = {};
  fa.k = 1;
  CHECK_THROWS_AS(fa.validate(), std::invalid_argument);
  fa = {};
  fa.level = 0.0;
  CHECK_THROWS_AS(fa.validate(), std::invalid_argument);

  InfiniteActivityTestConfig ia;
  ia.p_prime = ia.p;
  CHECK_THROWS_AS(ia.validate(), std::invalid_argument);
  ia = {};
  ia.gamma = 1.0;
  CHECK_THROWS_AS(ia.validate(), std::invalid_argument);
}

TEST_CASE("small Brownian null study: S_n near k^{p/2-1}", "[statistics][slow]") {
  // 200 one-hour paths at one-second sampling; the sample mean of S_n sits
  // near 2 on the truncation plateau.
  const int reps = 200;
  const double delta = seconds_to_years(1.0);
  double sum = 0.0;
  FiniteActivityTestConfig fa;
  fa.truncation = {8.0, 0.5, 0.25};
  for (int r = 0; r < reps; ++r) {
    PathSeries path = brownian_path(3600, 0.25, delta, 1000 + r);
    sum += s_n(path, fa);
  }
  CHECK(sum / reps == Approx(2.0).margin(0.05));
}
