#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "jumpact/common.hpp"
#include "jumpact/moments.hpp"
#include "jumpact/normal.hpp"
#include "jumpact/path_series.hpp"

namespace jumpact {

/// Configuration of the test whose null hypothesis is finite jump activity.
/// The statistic compares one truncated power variation sampled every k-th
/// observation against the full-frequency one, at a common cutoff.
struct FiniteActivityTestConfig {
  double p = 4.0;
  int k = 2;
  double level = 0.05;
  TruncationSpec truncation;

  void validate() const {
    if (!(p > 2.0)) throw std::invalid_argument("FiniteActivityTestConfig: p must be > 2");
    if (k < 2) throw std::invalid_argument("FiniteActivityTestConfig: k must be >= 2");
    if (!(level > 0.0 && level < 1.0)) {
      throw std::invalid_argument("FiniteActivityTestConfig: level must be in (0,1)");
    }
    truncation.validate();
  }

  double null_limit() const { return std::pow(static_cast<double>(k), 0.5 * p - 1.0); }
};

/// Configuration of the test whose null hypothesis is infinite jump activity.
/// The statistic plays two powers p' > p against two cutoffs u and gamma*u at
/// a single sampling frequency.
struct InfiniteActivityTestConfig {
  double p = 3.0;
  double p_prime = 4.0;
  double gamma = 2.0;
  double level = 0.05;
  TruncationSpec truncation;

  void validate() const {
    if (!(p > 2.0)) throw std::invalid_argument("InfiniteActivityTestConfig: p must be > 2");
    if (!(p_prime > p)) {
      throw std::invalid_argument("InfiniteActivityTestConfig: p_prime must exceed p");
    }
    if (!(gamma > 1.0)) throw std::invalid_argument("InfiniteActivityTestConfig: gamma must be > 1");
    if (!(level > 0.0 && level < 1.0)) {
      throw std::invalid_argument("InfiniteActivityTestConfig: level must be in (0,1)");
    }
    truncation.validate();
  }

  double null_limit() const { return std::pow(gamma, p_prime - p); }
};

/// Outcome of one hypothesis test on one sample. `variance` is the value used
/// for the decision (clamped at 0); `variance_raw` is the estimator as
/// computed, which can go negative in small samples for the two-cutoff test.
/// A degenerate report carries no decision.
struct TestReport {
  std::string test;  // "finite-activity" or "infinite-activity"
  double statistic = std::numeric_limits<double>::quiet_NaN();
  double null_limit = 0.0;
  double variance = 0.0;
  double variance_raw = 0.0;
  double z_score = std::numeric_limits<double>::quiet_NaN();
  double critical_value = std::numeric_limits<double>::quiet_NaN();
  bool reject = false;
  bool degenerate = false;
  long n_increments_used = 0;
  double level = 0.0;
  double noise_limit = 0.0;
  std::vector<double> truncation_cutoffs;
  std::string message;
};

namespace detail {

inline std::vector<double> uniform_cutoffs(const PathSeries& path, double cutoff) {
  return std::vector<double>(path.day_count(), cutoff);
}

inline std::vector<double> scaled(std::span<const double> cutoffs, double factor) {
  std::vector<double> out(cutoffs.begin(), cutoffs.end());
  for (double& u : out) u *= factor;
  return out;
}

}  // namespace detail

/// Ratio of the k-strided truncated power variation to the full-frequency
/// one, same power and same per-day cutoffs on both sides. Converges to
/// k^{p/2-1} when jumps are finite and to 1 when they are infinitely active.
/// `stride_k` = 1 is allowed as a diagnostic (the ratio is then exactly 1).
inline double s_n_ratio(const PathSeries& path, double p, std::span<const double> day_cutoffs,
                        int stride_k) {
  if (stride_k < 1) throw std::invalid_argument("s_n_ratio: k must be >= 1");
  const auto denom = truncated_power_variation_per_day(path, p, day_cutoffs, 1);
  if (!(denom.value > 0.0)) {
    throw DegenerateSampleError("s_n: denominator B(p,u) is zero after truncating " +
                                std::to_string(denom.total - denom.kept) + " of " +
                                std::to_string(denom.total) + " increments");
  }
  const auto numer = truncated_power_variation_per_day(path, p, day_cutoffs,
                                                       static_cast<std::size_t>(stride_k));
  return numer.value / denom.value;
}

inline double s_n(const PathSeries& path, const FiniteActivityTestConfig& cfg,
                  std::span<const double> day_cutoffs) {
  return s_n_ratio(path, cfg.p, day_cutoffs, cfg.k);
}

inline double s_n(const PathSeries& path, const FiniteActivityTestConfig& cfg) {
  const auto cutoffs = detail::uniform_cutoffs(path, cutoff_from_spec(cfg.truncation, path.delta()));
  return s_n(path, cfg, cutoffs);
}

/// Variance estimate of the finite-activity statistic:
/// N(p,k) * B(2p,u) / B(p,u)^2, all at the base frequency.
inline double v_n(const PathSeries& path, const FiniteActivityTestConfig& cfg,
                  const MomentTable& moments, std::span<const double> day_cutoffs) {
  const auto b_p = truncated_power_variation_per_day(path, cfg.p, day_cutoffs, 1);
  if (!(b_p.value > 0.0)) {
    throw DegenerateSampleError("v_n: B(p,u) is zero after truncating " +
                                std::to_string(b_p.total - b_p.kept) + " of " +
                                std::to_string(b_p.total) + " increments");
  }
  const auto b_2p = truncated_power_variation_per_day(path, 2.0 * cfg.p, day_cutoffs, 1);
  return moments.n_pk * b_2p.value / (b_p.value * b_p.value);
}

inline double v_n(const PathSeries& path, const FiniteActivityTestConfig& cfg,
                  const MomentTable& moments) {
  const auto cutoffs = detail::uniform_cutoffs(path, cutoff_from_spec(cfg.truncation, path.delta()));
  return v_n(path, cfg, moments, cutoffs);
}

/// Two-cutoff, two-power ratio statistic:
/// [B(p',gu) B(p,u)] / [B(p',u) B(p,gu)] at one sampling frequency.
/// Converges to gamma^{p'-p} under infinite activity and to 1 under finite
/// activity. Throws DegenerateSampleError naming the factor that vanished.
inline double s_n_prime(const PathSeries& path, const InfiniteActivityTestConfig& cfg,
                        std::span<const double> day_cutoffs) {
  const auto gamma_cutoffs = detail::scaled(day_cutoffs, cfg.gamma);
  const auto check = [](const PowerVariationResult& r, const std::string& name) {
    if (!(r.value > 0.0)) {
      throw DegenerateSampleError("s_n_prime: factor " + name + " is zero (" +
                                  std::to_string(r.kept) + " of " + std::to_string(r.total) +
                                  " increments kept)");
    }
  };
  const auto bpp_gu = truncated_power_variation_per_day(path, cfg.p_prime, gamma_cutoffs, 1);
  check(bpp_gu, "B(p',gamma*u)");
  const auto bp_u = truncated_power_variation_per_day(path, cfg.p, day_cutoffs, 1);
  check(bp_u, "B(p,u)");
  const auto bpp_u = truncated_power_variation_per_day(path, cfg.p_prime, day_cutoffs, 1);
  check(bpp_u, "B(p',u)");
  const auto bp_gu = truncated_power_variation_per_day(path, cfg.p, gamma_cutoffs, 1);
  check(bp_gu, "B(p,gamma*u)");
  return (bpp_gu.value * bp_u.value) / (bpp_u.value * bp_gu.value);
}

inline double s_n_prime(const PathSeries& path, const InfiniteActivityTestConfig& cfg) {
  const auto cutoffs = detail::uniform_cutoffs(path, cutoff_from_spec(cfg.truncation, path.delta()));
  return s_n_prime(path, cfg, cutoffs);
}

/// Variance estimate of the two-cutoff statistic. A difference of ratio
/// estimators, so small samples can push it below zero; the raw value is
/// returned as computed and decision-making clamps it (see
/// test_infinite_activity).
inline double v_n_prime(const PathSeries& path, const InfiniteActivityTestConfig& cfg,
                        std::span<const double> day_cutoffs) {
  const auto gamma_cutoffs = detail::scaled(day_cutoffs, cfg.gamma);
  const double p = cfg.p;
  const double pp = cfg.p_prime;
  const double g = cfg.gamma;

  const auto b = [&](double power, bool gamma_level) {
    const auto r = truncated_power_variation_per_day(
        path, power, gamma_level ? std::span<const double>(gamma_cutoffs) : day_cutoffs, 1);
    return r.value;
  };

  const double bp_u = b(p, false);
  const double bp_gu = b(p, true);
  const double bpp_u = b(pp, false);
  const double bpp_gu = b(pp, true);
  if (!(bp_u > 0.0) || !(bp_gu > 0.0) || !(bpp_u > 0.0) || !(bpp_gu > 0.0)) {
    throw DegenerateSampleError("v_n_prime: a power variation in a denominator is zero");
  }
  const double b2p_u = b(2.0 * p, false);
  const double b2p_gu = b(2.0 * p, true);
  const double b2pp_u = b(2.0 * pp, false);
  const double b2pp_gu = b(2.0 * pp, true);
  const double bsum_u = b(p + pp, false);
  const double bsum_gu = b(p + pp, true);

  const double bracket = b2p_u / (bp_u * bp_u) +
                         (1.0 - 2.0 * std::pow(g, -p)) * b2p_gu / (bp_gu * bp_gu) +
                         b2pp_u / (bpp_u * bpp_u) +
                         (1.0 - 2.0 * std::pow(g, -pp)) * b2pp_gu / (bpp_gu * bpp_gu) -
                         2.0 * bsum_u / (bp_u * bpp_u) -
                         2.0 * (1.0 - std::pow(g, -p) - std::pow(g, -pp)) * bsum_gu /
                             (bp_gu * bpp_gu);
  return std::pow(g, 2.0 * pp - 2.0 * p) * bracket;
}

inline double v_n_prime(const PathSeries& path, const InfiniteActivityTestConfig& cfg) {
  const auto cutoffs = detail::uniform_cutoffs(path, cutoff_from_spec(cfg.truncation, path.delta()));
  return v_n_prime(path, cfg, cutoffs);
}

/// Critical value of either test: null limit shifted down by the upper
/// level-quantile times the standard error. Rejection is strict inequality
/// below this value.
inline double critical_value(double null_limit, double variance, double level) {
  return null_limit - normal_upper_quantile(level) * std::sqrt(std::max(variance, 0.0));
}

/// Additive-noise-dominated limits: when microstructure noise swamps the
/// signal, the finite-activity statistic drifts to 1/k instead of its null
/// and alternative limits, which offers a diagnostic band.
inline double noise_limit(const FiniteActivityTestConfig& cfg) {
  return 1.0 / static_cast<double>(cfg.k);
}

/// The two-cutoff statistic tends to gamma^{p'-p} under dominant additive
/// noise regardless of jump activity, so it cannot separate noise from an
/// infinitely active jump component.
inline double noise_limit(const InfiniteActivityTestConfig& cfg) {
  return std::pow(cfg.gamma, cfg.p_prime - cfg.p);
}

/// Runs the finite-activity test: reject iff S_n < k^{p/2-1} - z_a sqrt(V_n),
/// with z_a the upper a-quantile of the standard normal. Degenerate samples
/// produce a no-decision report instead of escaping as exceptions.
inline TestReport test_finite_activity(const PathSeries& path, const FiniteActivityTestConfig& cfg,
                                       const MomentTable& moments,
                                       std::span<const double> day_cutoffs) {
  cfg.validate();
  TestReport rep;
  rep.test = "finite-activity";
  rep.level = cfg.level;
  rep.null_limit = cfg.null_limit();
  rep.noise_limit = noise_limit(cfg);
  rep.truncation_cutoffs.assign(day_cutoffs.begin(), day_cutoffs.end());
  try {
    rep.statistic = s_n(path, cfg, day_cutoffs);
    rep.variance_raw = v_n(path, cfg, moments, day_cutoffs);
    rep.variance = std::max(rep.variance_raw, 0.0);
    rep.n_increments_used =
        truncated_power_variation_per_day(path, cfg.p, day_cutoffs, 1).kept;
    rep.critical_value = critical_value(rep.null_limit, rep.variance, cfg.level);
    if (rep.variance > 0.0) {
      rep.z_score = (rep.statistic - rep.null_limit) / std::sqrt(rep.variance);
    }
    rep.reject = rep.statistic < rep.critical_value;
  } catch (const DegenerateSampleError& e) {
    rep.degenerate = true;
    rep.message = e.what();
  }
  return rep;
}

inline TestReport test_finite_activity(const PathSeries& path, const FiniteActivityTestConfig& cfg,
                                       const MomentTable& moments) {
  const auto cutoffs = detail::uniform_cutoffs(path, cutoff_from_spec(cfg.truncation, path.delta()));
  return test_finite_activity(path, cfg, moments, cutoffs);
}

/// Runs the infinite-activity test: reject iff
/// S'_n < gamma^{p'-p} - z_a sqrt(V'_n). A non-positive raw variance marks
/// the sample degenerate (no decision), with the raw value reported.
inline TestReport test_infinite_activity(const PathSeries& path,
                                         const InfiniteActivityTestConfig& cfg,
                                         std::span<const double> day_cutoffs) {
  cfg.validate();
  TestReport rep;
  rep.test = "infinite-activity";
  rep.level = cfg.level;
  rep.null_limit = cfg.null_limit();
  rep.noise_limit = noise_limit(cfg);
  rep.truncation_cutoffs.assign(day_cutoffs.begin(), day_cutoffs.end());
  try {
    rep.statistic = s_n_prime(path, cfg, day_cutoffs);
    rep.variance_raw = v_n_prime(path, cfg, day_cutoffs);
    rep.n_increments_used =
        truncated_power_variation_per_day(path, cfg.p, day_cutoffs, 1).kept;
    if (!(rep.variance_raw > 0.0)) {
      rep.degenerate = true;
      rep.message = "variance estimate V'_n is non-positive (" +
                    std::to_string(rep.variance_raw) + ")";
      return rep;
    }
    rep.variance = rep.variance_raw;
    rep.critical_value = critical_value(rep.null_limit, rep.variance, cfg.level);
    rep.z_score = (rep.statistic - rep.null_limit) / std::sqrt(rep.variance);
    rep.reject = rep.statistic < rep.critical_value;
  } catch (const DegenerateSampleError& e) {
    rep.degenerate = true;
    rep.message = e.what();
  }
  return rep;
}

inline TestReport test_infinite_activity(const PathSeries& path,
                                         const InfiniteActivityTestConfig& cfg) {
  const auto cutoffs = detail::uniform_cutoffs(path, cutoff_from_spec(cfg.truncation, path.delta()));
  return test_infinite_activity(path, cfg, cutoffs);
}

}  // namespace jumpact
