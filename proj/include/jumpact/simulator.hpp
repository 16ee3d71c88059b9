#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "jumpact/common.hpp"
#include "jumpact/moments.hpp"
#include "jumpact/path_series.hpp"
#include "jumpact/rng.hpp"

namespace jumpact {

/// Stochastic-volatility parameters: mean-reverting square-root variance with
/// leverage correlation and compound-Poisson variance jumps (uniform sizes,
/// clamped so variance stays nonnegative).
struct SvParams {
  double eta = 0.0625;  // long-run variance, 0.25^2 annualized
  double chi = 5.0;     // mean-reversion speed per year
  double xi = 0.5;      // volatility of variance
  double rho_bar = -0.5;
  double v0 = 0.0625;
  double variance_jump_rate = 12.0;  // events per year
  double variance_jump_low = -0.30;
  double variance_jump_high = 0.30;

  void validate() const {
    if (!(eta > 0.0)) throw std::invalid_argument("SvParams: eta must be > 0");
    if (chi < 0.0) throw std::invalid_argument("SvParams: chi must be >= 0");
    if (xi < 0.0) throw std::invalid_argument("SvParams: xi must be >= 0");
    if (std::abs(rho_bar) > 1.0) throw std::invalid_argument("SvParams: |rho_bar| must be <= 1");
    if (v0 < 0.0) throw std::invalid_argument("SvParams: v0 must be >= 0");
    if (variance_jump_rate < 0.0) {
      throw std::invalid_argument("SvParams: variance_jump_rate must be >= 0");
    }
    if (variance_jump_low > variance_jump_high) {
      throw std::invalid_argument("SvParams: variance jump bounds out of order");
    }
  }
};

/// Jump component added to the log price: a symmetric beta-stable process, a
/// compound Poisson process with truncated-normal sizes, or nothing.
struct JumpComponentSpec {
  enum class Kind { none, stable, compound_poisson };
  Kind kind = Kind::none;
  double beta = 1.0;          // stability index; beta = 1 is Cauchy
  double theta = 1.0;         // scale multiplier applied to the jump increment
  double lambda_per_day = 0.0;
  double size_sd = 0.10;      // compound-Poisson size law: N(0, sd^2) ...
  double size_min_abs = 0.05; // ... conditioned on |size| > this

  void validate() const {
    if (kind == Kind::stable && !(beta > 0.0 && beta < 2.0)) {
      throw std::invalid_argument("JumpComponentSpec: beta must be in (0,2)");
    }
    if (theta < 0.0) throw std::invalid_argument("JumpComponentSpec: theta must be >= 0");
    if (lambda_per_day < 0.0) {
      throw std::invalid_argument("JumpComponentSpec: lambda_per_day must be >= 0");
    }
    if (kind == Kind::compound_poisson && !(size_sd > 0.0)) {
      throw std::invalid_argument("JumpComponentSpec: size_sd must be > 0");
    }
    if (size_min_abs < 0.0) {
      throw std::invalid_argument("JumpComponentSpec: size_min_abs must be >= 0");
    }
  }
};

/// Observation noise overlaid on the latent path: i.i.d. additive Gaussian
/// noise on the log price, or rounding of the price level to a tick grid.
struct NoiseSpec {
  enum class Kind { none, additive, rounding };
  Kind kind = Kind::none;
  double additive_sd = 0.0;
  double tick = 0.01;
  double price_scale = 30.0;  // price level at log-price 0; ticks live in price units

  void validate() const {
    if (kind == Kind::additive && additive_sd < 0.0) {
      throw std::invalid_argument("NoiseSpec: additive_sd must be >= 0");
    }
    if (kind == Kind::rounding && !(tick > 0.0 && price_scale > 0.0)) {
      throw std::invalid_argument("NoiseSpec: tick and price_scale must be > 0");
    }
  }
};

/// Full data-generating-process description. Identical (config, seed) pairs
/// produce bit-identical paths, independent of thread count.
struct SimulationConfig {
  SvParams sv;
  JumpComponentSpec jumps;
  NoiseSpec noise;
  double delta = seconds_to_years(1.0);  // sampling interval in years
  int horizon_days = 1;
  std::uint64_t seed = 1;

  void validate() const {
    sv.validate();
    jumps.validate();
    noise.validate();
    if (!(delta > 0.0)) throw std::invalid_argument("SimulationConfig: delta must be > 0");
    if (delta > kDayYears) {
      throw std::invalid_argument("SimulationConfig: delta exceeds one trading day");
    }
    if (horizon_days < 1) throw std::invalid_argument("SimulationConfig: horizon_days must be >= 1");
  }

  long steps_per_day() const {
    return std::max<long>(1, std::lround(kDayYears / delta));
  }
};

/// One increment of a standard symmetric beta-stable Levy process over
/// `scale_time`, via the Chambers-Mallows-Stuck transform. For beta = 1 this
/// is scale_time * tan(pi (U - 1/2)), a Cauchy draw.
inline double stable_increment(double beta, double scale_time, Rng& rng) {
  if (!(beta > 0.0 && beta < 2.0)) {
    throw std::invalid_argument("stable_increment: beta must be in (0,2)");
  }
  if (!(scale_time > 0.0)) {
    throw std::invalid_argument("stable_increment: scale_time must be > 0");
  }
  const double pi = 3.141592653589793238462643383279502884;
  const double phi = pi * (rng.uniform01() - 0.5);
  if (beta == 1.0) {
    return scale_time * std::tan(phi);
  }
  const double e = rng.exponential();
  const double draw = std::sin(beta * phi) / std::pow(std::cos(phi), 1.0 / beta) *
                      std::pow(std::cos((1.0 - beta) * phi) / e, (1.0 - beta) / beta);
  return std::pow(scale_time, 1.0 / beta) * draw;
}

/// One size from the compound-Poisson jump law: normal rejected until its
/// magnitude exceeds the floor.
inline double truncated_normal_size(double sd, double min_abs, Rng& rng) {
  for (;;) {
    const double x = sd * rng.normal();
    if (std::abs(x) > min_abs) return x;
  }
}

/// Compound-Poisson increment over dt_days trading days: Poisson count at
/// rate lambda_per_day, i.i.d. truncated-normal sizes summed.
inline double compound_poisson_increment(double lambda_per_day, const JumpComponentSpec& law,
                                         double dt_days, Rng& rng) {
  if (lambda_per_day < 0.0) {
    throw std::invalid_argument("compound_poisson_increment: lambda must be >= 0");
  }
  const int count = rng.poisson(lambda_per_day * dt_days);
  double sum = 0.0;
  for (int i = 0; i < count; ++i) {
    sum += truncated_normal_size(law.size_sd, law.size_min_abs, rng);
  }
  return sum;
}

/// P(|S| >= q) for a standard symmetric beta-stable variable. Cauchy has a
/// closed form; other indices use the one-dimensional integral representation
/// of the stable distribution function, which is smooth on (0, pi/2).
inline double stable_abs_tail(double beta, double q) {
  if (!(beta > 0.0 && beta < 2.0)) {
    throw std::invalid_argument("stable_abs_tail: beta must be in (0,2)");
  }
  if (q <= 0.0) return 1.0;
  const double pi = 3.141592653589793238462643383279502884;
  if (beta == 1.0) {
    return 1.0 - 2.0 / pi * std::atan(q);
  }
  const double expo = beta / (beta - 1.0);
  const double x_pow = std::pow(q, expo);
  const auto integrand = [&](double theta) {
    const double v = std::pow(std::cos(theta) / std::sin(beta * theta), expo) *
                     std::cos((beta - 1.0) * theta) / std::cos(theta);
    const double e = x_pow * v;
    return e < 700.0 ? std::exp(-e) : 0.0;
  };
  const double integral =
      detail::integrate_adaptive(integrand, 1e-12, 0.5 * pi - 1e-12, 1e-12, 1e-10,
                                 "stable_abs_tail");
  if (beta > 1.0) {
    return 2.0 / pi * integral;
  }
  return 1.0 - 2.0 / pi * integral;
}

/// Quantile q with P(|S| >= q) = tail for the standard symmetric stable law,
/// found by bisection on the monotone tail function.
inline double stable_abs_tail_quantile(double beta, double tail) {
  if (!(tail > 0.0 && tail < 1.0)) {
    throw std::invalid_argument("stable_abs_tail_quantile: tail must be in (0,1)");
  }
  double lo = 1e-12, hi = 1.0;
  while (stable_abs_tail(beta, hi) > tail) {
    hi *= 2.0;
    if (hi > 1e18) {
      throw NumericalError("stable_abs_tail_quantile: bracket [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "] failed to contain the quantile");
    }
  }
  for (int i = 0; i < 200 && (hi - lo) > 1e-6 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (stable_abs_tail(beta, mid) > tail) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Scale multiplier theta such that P(|theta * dY| >= 4 sqrt(eta * delta)) =
/// tp, where dY is a beta-stable increment over delta. The threshold is four
/// per-interval standard deviations of the continuous part at long-run
/// variance eta. Cauchy inverts in closed form.
inline double calibrate_theta(double tp, double beta, double delta, double eta) {
  if (!(tp > 0.0 && tp < 1.0)) throw std::invalid_argument("calibrate_theta: tp must be in (0,1)");
  if (!(delta > 0.0)) throw std::invalid_argument("calibrate_theta: delta must be > 0");
  if (!(eta > 0.0)) throw std::invalid_argument("calibrate_theta: eta must be > 0");
  const double threshold = 4.0 * std::sqrt(eta) * std::sqrt(delta);
  const double pi = 3.141592653589793238462643383279502884;
  if (beta == 1.0) {
    return threshold / (delta * std::tan(0.5 * pi * (1.0 - tp)));
  }
  const double q = stable_abs_tail_quantile(beta, tp);
  return threshold / (std::pow(delta, 1.0 / beta) * q);
}

namespace detail {

// Substream channels per (seed, day).
enum SimChannel : std::uint64_t { kBrownian = 1, kVarianceJumps = 2, kPriceJumps = 3, kNoise = 4 };

}  // namespace detail

struct SimulatedPath {
  PathSeries path;
  std::vector<double> variance;  // spot variance after each step, diagnostics
};

/// Euler discretization of the stochastic-volatility model with an additive
/// jump component. The variance follows the square-root recursion with
/// full-truncation positivity (drift and diffusion evaluated at max(v,0)),
/// plus compound-Poisson jumps, clamped at zero after each step. The log
/// price advances by sqrt(max(v,0)) dW + theta dY with corr(dW, dB) =
/// rho_bar. Days are contiguous: each day segment opens at the previous
/// close.
inline SimulatedPath simulate_path_with_variance(const SimulationConfig& cfg) {
  cfg.validate();
  const long m = cfg.steps_per_day();
  const double dt = cfg.delta;
  const double sqrt_dt = std::sqrt(dt);
  const double rho = cfg.sv.rho_bar;
  const double rho_comp = std::sqrt(1.0 - rho * rho);
  const double dt_days = dt / kDayYears;

  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(cfg.horizon_days) * (m + 1));
  std::vector<std::size_t> day_starts;
  day_starts.reserve(cfg.horizon_days);
  std::vector<double> variance;
  variance.reserve(values.capacity());

  double x = 0.0;
  double v = cfg.sv.v0;
  for (int day = 0; day < cfg.horizon_days; ++day) {
    Rng rng_w = Rng::substream(cfg.seed, day, detail::kBrownian);
    Rng rng_vj = Rng::substream(cfg.seed, day, detail::kVarianceJumps);
    Rng rng_y = Rng::substream(cfg.seed, day, detail::kPriceJumps);

    day_starts.push_back(values.size());
    values.push_back(x);
    variance.push_back(v);
    for (long i = 0; i < m; ++i) {
      const double z1 = rng_w.normal();
      const double z2 = rng_w.normal();
      const double dw = sqrt_dt * z1;
      const double db = sqrt_dt * (rho * z1 + rho_comp * z2);

      const double v_plus = std::max(v, 0.0);
      double dy = 0.0;
      switch (cfg.jumps.kind) {
        case JumpComponentSpec::Kind::none:
          break;
        case JumpComponentSpec::Kind::stable:
          dy = stable_increment(cfg.jumps.beta, dt, rng_y);
          break;
        case JumpComponentSpec::Kind::compound_poisson:
          dy = compound_poisson_increment(cfg.jumps.lambda_per_day, cfg.jumps, dt_days, rng_y);
          break;
      }
      x += std::sqrt(v_plus) * dw + cfg.jumps.theta * dy;

      double dj = 0.0;
      const int n_vj = rng_vj.poisson(cfg.sv.variance_jump_rate * dt);
      for (int j = 0; j < n_vj; ++j) {
        dj += rng_vj.uniform(cfg.sv.variance_jump_low, cfg.sv.variance_jump_high);
      }
      v = v + cfg.sv.chi * (cfg.sv.eta - v_plus) * dt + cfg.sv.xi * std::sqrt(v_plus) * db + dj;
      v = std::max(v, 0.0);

      values.push_back(x);
      variance.push_back(v);
    }
  }

  PathSeries latent(std::move(values), dt, std::move(day_starts));
  return {std::move(latent), std::move(variance)};
}

/// Observed series Z = X + eps with eps i.i.d. centered Gaussian, independent
/// of the path. sd = 0 returns the input unchanged.
inline PathSeries apply_additive_noise(const PathSeries& path, double sd, Rng& rng) {
  if (sd < 0.0) throw std::invalid_argument("apply_additive_noise: sd must be >= 0");
  if (sd == 0.0) return path;
  std::vector<double> noisy(path.values().begin(), path.values().end());
  for (double& z : noisy) z += sd * rng.normal();
  return PathSeries(std::move(noisy), path.delta(), path.day_starts());
}

/// Rounds the price level price_scale * exp(X) to the nearest tick and maps
/// back to a log price relative to price_scale. A price that would round to
/// zero is clamped to one tick. Once the truncation cutoff drops below one
/// tick in log units, every increment is either exactly zero or larger than
/// the cutoff, so all truncated power variations vanish.
inline PathSeries apply_rounding(const PathSeries& path, double tick, double price_scale = 30.0) {
  if (!(tick > 0.0)) throw std::invalid_argument("apply_rounding: tick must be > 0");
  if (!(price_scale > 0.0)) throw std::invalid_argument("apply_rounding: price_scale must be > 0");
  std::vector<double> rounded(path.size());
  auto vals = path.values();
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const double price = price_scale * std::exp(vals[i]);
    const double ticks = std::max(1.0, std::round(price / tick));
    rounded[i] = std::log(ticks * tick) - std::log(price_scale);
  }
  return PathSeries(std::move(rounded), path.delta(), path.day_starts());
}

/// Simulates the latent path and applies the configured noise overlay.
inline PathSeries simulate_path(const SimulationConfig& cfg) {
  SimulatedPath sim = simulate_path_with_variance(cfg);
  switch (cfg.noise.kind) {
    case NoiseSpec::Kind::none:
      return std::move(sim.path);
    case NoiseSpec::Kind::additive: {
      Rng rng = Rng::substream(cfg.seed, 0, detail::kNoise);
      return apply_additive_noise(sim.path, cfg.noise.additive_sd, rng);
    }
    case NoiseSpec::Kind::rounding:
      return apply_rounding(sim.path, cfg.noise.tick, cfg.noise.price_scale);
  }
  return std::move(sim.path);
}

/// Draws one pair of standard normals with the given correlation; exposed for
/// diagnostics on the leverage channel.
inline std::pair<double, double> correlated_normal_pair(double rho, Rng& rng) {
  const double z1 = rng.normal();
  const double z2 = rng.normal();
  return {z1, rho * z1 + std::sqrt(1.0 - rho * rho) * z2};
}

}  // namespace jumpact
