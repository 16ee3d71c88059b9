#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "jumpact/common.hpp"
#include "jumpact/normal.hpp"
#include "jumpact/simulator.hpp"
#include "jumpact/statistics.hpp"

namespace jumpact {

enum class Scenario { fa_null, ia_null, fa_alt, ia_alt, noise };
enum class Intensity { low, medium, high };

inline const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::fa_null: return "fa_null";
    case Scenario::ia_null: return "ia_null";
    case Scenario::fa_alt: return "fa_alt";
    case Scenario::ia_alt: return "ia_alt";
    case Scenario::noise: return "noise";
  }
  return "?";
}

inline const char* to_string(Intensity i) {
  switch (i) {
    case Intensity::low: return "low";
    case Intensity::medium: return "medium";
    case Intensity::high: return "high";
  }
  return "?";
}

inline Scenario scenario_from_string(const std::string& s) {
  if (s == "fa_null") return Scenario::fa_null;
  if (s == "ia_null") return Scenario::ia_null;
  if (s == "fa_alt") return Scenario::fa_alt;
  if (s == "ia_alt") return Scenario::ia_alt;
  if (s == "noise") return Scenario::noise;
  throw std::invalid_argument("unknown scenario: " + s);
}

inline Intensity intensity_from_string(const std::string& s) {
  if (s == "low") return Intensity::low;
  if (s == "medium") return Intensity::medium;
  if (s == "high") return Intensity::high;
  throw std::invalid_argument("unknown intensity: " + s);
}

// Whether the finite-activity or the infinite-activity test is the one under
// study for a scenario. The noise scenario examines the finite-activity
// statistic (plus the two-cutoff one in sweeps).
inline bool uses_finite_activity_test(Scenario s) {
  return s == Scenario::fa_null || s == Scenario::fa_alt || s == Scenario::noise;
}

/// Replicated-experiment design. Per-day jump arrival rates (compound
/// Poisson) are low/medium/high = 2/10/50; stable jump scales are calibrated
/// so the per-interval jump tail probability is 0.01/0.05/0.10.
struct ExperimentGrid {
  Scenario scenario = Scenario::fa_null;
  std::vector<Intensity> intensities = {Intensity::medium};
  std::vector<double> alphas = {6, 7, 8, 9, 10, 12, 15};
  std::vector<double> deltas = {seconds_to_years(1.0)};
  int horizon_days = 1;
  int replicates = 1000;
  std::vector<double> levels = {0.10, 0.05};
  std::uint64_t base_seed = 1;
  int workers = 0;  // 0 = hardware concurrency

  double varpi = 0.5;
  double eta = 0.0625;
  double noise_sd_multiple = 3.0;  // additive noise sd as a multiple of sqrt(eta*delta)

  FiniteActivityTestConfig fa_config() const {
    FiniteActivityTestConfig cfg;
    cfg.truncation.varpi = varpi;
    cfg.truncation.sigma_ref = std::sqrt(eta);
    return cfg;
  }
  InfiniteActivityTestConfig ia_config() const {
    InfiniteActivityTestConfig cfg;
    cfg.truncation.varpi = varpi;
    cfg.truncation.sigma_ref = std::sqrt(eta);
    return cfg;
  }

  void validate() const {
    if (replicates < 1) throw std::invalid_argument("ExperimentGrid: replicates must be >= 1");
    if (intensities.empty() || alphas.empty() || deltas.empty() || levels.empty()) {
      throw std::invalid_argument("ExperimentGrid: empty axis");
    }
    for (double a : alphas) {
      if (!(a > 0.0)) throw std::invalid_argument("ExperimentGrid: alphas must be > 0");
    }
  }
};

/// Data-generating process for one scenario cell.
inline SimulationConfig make_scenario_config(Scenario scenario, Intensity intensity, double delta,
                                             int horizon_days, double eta,
                                             double noise_sd_multiple) {
  SimulationConfig cfg;
  cfg.sv.eta = eta;
  cfg.sv.v0 = eta;
  cfg.delta = delta;
  cfg.horizon_days = horizon_days;

  const bool wants_stable = scenario == Scenario::ia_null || scenario == Scenario::fa_alt;
  const bool wants_poisson = scenario == Scenario::fa_null || scenario == Scenario::ia_alt;
  if (wants_stable) {
    cfg.jumps.kind = JumpComponentSpec::Kind::stable;
    cfg.jumps.beta = 1.0;
    const double tp = intensity == Intensity::low ? 0.01
                      : intensity == Intensity::medium ? 0.05
                                                       : 0.10;
    cfg.jumps.theta = calibrate_theta(tp, cfg.jumps.beta, delta, eta);
  } else if (wants_poisson) {
    cfg.jumps.kind = JumpComponentSpec::Kind::compound_poisson;
    cfg.jumps.theta = 1.0;
    cfg.jumps.lambda_per_day = intensity == Intensity::low ? 2.0
                               : intensity == Intensity::medium ? 10.0
                                                                : 50.0;
  } else {
    // Noise study: plain Brownian motion at constant variance eta with
    // additive observation noise.
    cfg.sv.chi = 0.0;
    cfg.sv.xi = 0.0;
    cfg.sv.variance_jump_rate = 0.0;
    cfg.jumps.kind = JumpComponentSpec::Kind::none;
    cfg.noise.kind = NoiseSpec::Kind::additive;
    cfg.noise.additive_sd = noise_sd_multiple * std::sqrt(eta * delta);
  }
  return cfg;
}

/// Runs f(i) for i in [0, n) on up to `workers` threads. Work items write to
/// disjoint slots, so results do not depend on the schedule.
template <class F>
void parallel_for(long n, int workers, const F& f) {
  if (workers <= 0) {
    workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers <= 0) workers = 1;
  }
  workers = static_cast<int>(std::min<long>(workers, n));
  if (workers <= 1) {
    for (long i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<long> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const long i = next.fetch_add(1);
        if (i >= n) return;
        f(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

// Statistic and raw variance of one replicate at one truncation index.
struct StatOutcome {
  double statistic = std::numeric_limits<double>::quiet_NaN();
  double variance_raw = std::numeric_limits<double>::quiet_NaN();
  bool degenerate = true;
};

namespace detail {

// Evaluates the scenario's statistic on one simulated path for every alpha.
// The same path is reused across the alpha sweep, as in a per-path sweep of
// the truncation index.
inline void evaluate_path(const PathSeries& path, Scenario scenario,
                          const FiniteActivityTestConfig& fa_base,
                          const InfiniteActivityTestConfig& ia_base,
                          const MomentTable& moments, std::span<const double> alphas,
                          std::span<StatOutcome> out) {
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    StatOutcome& slot = out[a];
    try {
      if (uses_finite_activity_test(scenario)) {
        FiniteActivityTestConfig cfg = fa_base;
        cfg.truncation.alpha = alphas[a];
        slot.statistic = s_n(path, cfg);
        slot.variance_raw = v_n(path, cfg, moments);
        slot.degenerate = false;
      } else {
        InfiniteActivityTestConfig cfg = ia_base;
        cfg.truncation.alpha = alphas[a];
        slot.statistic = s_n_prime(path, cfg);
        slot.variance_raw = v_n_prime(path, cfg);
        slot.degenerate = !(slot.variance_raw > 0.0);
      }
    } catch (const DegenerateSampleError&) {
      slot = StatOutcome{};
    }
  }
}

}  // namespace detail

/// Replicate outcomes for one (intensity, delta) cell, indexed
/// [alpha][replicate]. Replicate r derives its seed from (base_seed, cell_id,
/// r), so cells are reproducible independently of each other and of the
/// worker count.
inline std::vector<std::vector<StatOutcome>> run_cell(const ExperimentGrid& grid,
                                                      Intensity intensity, double delta,
                                                      std::uint64_t cell_id,
                                                      const MomentTable& moments) {
  const SimulationConfig proto = make_scenario_config(grid.scenario, intensity, delta,
                                                      grid.horizon_days, grid.eta,
                                                      grid.noise_sd_multiple);
  const FiniteActivityTestConfig fa_base = grid.fa_config();
  const InfiniteActivityTestConfig ia_base = grid.ia_config();

  std::vector<std::vector<StatOutcome>> by_alpha(
      grid.alphas.size(), std::vector<StatOutcome>(grid.replicates));
  std::vector<StatOutcome> flat(static_cast<std::size_t>(grid.replicates) * grid.alphas.size());

  parallel_for(grid.replicates, grid.workers, [&](long r) {
    SimulationConfig cfg = proto;
    cfg.seed = Rng::derive_key(grid.base_seed, cell_id, static_cast<std::uint64_t>(r));
    const PathSeries path = simulate_path(cfg);
    detail::evaluate_path(path, grid.scenario, fa_base, ia_base, moments, grid.alphas,
                          std::span<StatOutcome>(flat).subspan(r * grid.alphas.size(),
                                                               grid.alphas.size()));
  });

  for (long r = 0; r < grid.replicates; ++r) {
    for (std::size_t a = 0; a < grid.alphas.size(); ++a) {
      by_alpha[a][r] = flat[r * grid.alphas.size() + a];
    }
  }
  return by_alpha;
}

/// One row of a rejection table: empirical rate of one test at one grid cell.
/// Degenerate replicates are excluded from the rate denominator and counted
/// separately.
struct RejectionCell {
  Scenario scenario;
  Intensity intensity;
  double level = 0.0;
  double alpha = 0.0;
  double delta = 0.0;
  long replicates = 0;
  long rejections = 0;
  long decisions = 0;
  long degenerate = 0;
  double rate = 0.0;
  double mc_standard_error = 0.0;
};

struct RejectionTable {
  std::vector<RejectionCell> cells;

  std::string to_csv() const {
    std::ostringstream os;
    os << "scenario,intensity,level,alpha,delta_seconds,replicates,rejections,decisions,"
          "degenerate,rate,mc_standard_error\n";
    for (const auto& c : cells) {
      os << to_string(c.scenario) << ',' << to_string(c.intensity) << ','
         << format_g17(c.level) << ',' << format_g17(c.alpha) << ','
         << format_g17(years_to_seconds(c.delta)) << ',' << c.replicates << ','
         << c.rejections << ',' << c.decisions << ',' << c.degenerate << ','
         << format_g17(c.rate) << ',' << format_g17(c.mc_standard_error) << '\n';
    }
    return os.str();
  }
};

/// Runs the full grid: for every (intensity, delta, alpha, level) cell,
/// simulates the scenario's replicates, applies the designated test and
/// tallies rejections. Bit-identical across reruns and worker counts for a
/// fixed base_seed.
inline RejectionTable run_grid(const ExperimentGrid& grid) {
  grid.validate();
  const FiniteActivityTestConfig fa_base = grid.fa_config();
  const InfiniteActivityTestConfig ia_base = grid.ia_config();
  const bool fa = uses_finite_activity_test(grid.scenario);
  const double null_limit = fa ? fa_base.null_limit() : ia_base.null_limit();
  const MomentTable moments = MomentTable::compute(fa_base.p, fa_base.k);

  RejectionTable table;
  for (std::size_t ii = 0; ii < grid.intensities.size(); ++ii) {
    for (std::size_t di = 0; di < grid.deltas.size(); ++di) {
      const std::uint64_t cell_id = ii * 1000 + di;
      const auto by_alpha = run_cell(grid, grid.intensities[ii], grid.deltas[di], cell_id, moments);
      for (std::size_t a = 0; a < grid.alphas.size(); ++a) {
        for (double level : grid.levels) {
          RejectionCell cell;
          cell.scenario = grid.scenario;
          cell.intensity = grid.intensities[ii];
          cell.level = level;
          cell.alpha = grid.alphas[a];
          cell.delta = grid.deltas[di];
          cell.replicates = grid.replicates;
          for (const StatOutcome& o : by_alpha[a]) {
            if (o.degenerate) {
              ++cell.degenerate;
              continue;
            }
            ++cell.decisions;
            const double crit = critical_value(null_limit, std::max(o.variance_raw, 0.0), level);
            if (o.statistic < crit) ++cell.rejections;
          }
          cell.rate = cell.decisions > 0
                          ? static_cast<double>(cell.rejections) / cell.decisions
                          : 0.0;
          cell.mc_standard_error =
              cell.decisions > 0 ? std::sqrt(cell.rate * (1.0 - cell.rate) / cell.decisions) : 0.0;
          table.cells.push_back(cell);
        }
      }
    }
  }
  return table;
}

/// One row of an alpha sweep: mean statistic across replicates at one alpha.
struct AlphaSweepRow {
  double alpha = 0.0;
  double mean_statistic = 0.0;
  double std_error = 0.0;
  long decisions = 0;
  long degenerate = 0;
};

struct AlphaSweepTable {
  Scenario scenario;
  Intensity intensity;
  std::vector<AlphaSweepRow> rows;

  std::string to_csv() const {
    std::ostringstream os;
    os << "scenario,intensity,alpha,mean_statistic,std_error,decisions,degenerate\n";
    for (const auto& r : rows) {
      os << to_string(scenario) << ',' << to_string(intensity) << ',' << format_g17(r.alpha)
         << ',' << format_g17(r.mean_statistic) << ',' << format_g17(r.std_error) << ','
         << r.decisions << ',' << r.degenerate << '\n';
    }
    return os.str();
  }
};

/// Mean of the scenario's statistic per truncation index. Degenerate cells
/// are reported with their counts, never interpolated.
inline AlphaSweepTable sweep_alpha(const ExperimentGrid& grid) {
  grid.validate();
  if (grid.intensities.size() != 1 || grid.deltas.size() != 1) {
    throw std::invalid_argument("sweep_alpha: expects a single intensity and delta");
  }
  const MomentTable moments = MomentTable::compute(grid.fa_config().p, grid.fa_config().k);
  const auto by_alpha = run_cell(grid, grid.intensities[0], grid.deltas[0], 0, moments);

  AlphaSweepTable table;
  table.scenario = grid.scenario;
  table.intensity = grid.intensities[0];
  for (std::size_t a = 0; a < grid.alphas.size(); ++a) {
    AlphaSweepRow row;
    row.alpha = grid.alphas[a];
    CompensatedSum sum;
    CompensatedSum sumsq;
    for (const StatOutcome& o : by_alpha[a]) {
      if (o.degenerate) {
        ++row.degenerate;
        continue;
      }
      ++row.decisions;
      sum.add(o.statistic);
      sumsq.add(o.statistic * o.statistic);
    }
    if (row.decisions > 0) {
      row.mean_statistic = sum.value() / row.decisions;
      const double var =
          std::max(0.0, sumsq.value() / row.decisions - row.mean_statistic * row.mean_statistic);
      row.std_error = std::sqrt(var / row.decisions);
    }
    table.rows.push_back(row);
  }
  return table;
}

/// Summary of a sample of standardized statistics.
struct HistogramSummary {
  std::vector<double> z_scores;
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  double ks_distance = 0.0;  // to the standard normal
  long degenerate = 0;
};

/// Kolmogorov-Smirnov distance of a sample to the standard normal.
inline double ks_distance_to_normal(std::vector<double> sample) {
  if (sample.empty()) return 0.0;
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double cdf = normal_cdf(sample[i]);
    d = std::max(d, std::abs((i + 1) / n - cdf));
    d = std::max(d, std::abs(i / n - cdf));
  }
  return d;
}

/// Collects (statistic - null limit) / sqrt(variance) across replicates of a
/// null scenario and summarizes its distribution.
inline HistogramSummary standardized_histogram(const ExperimentGrid& grid) {
  grid.validate();
  if (grid.scenario != Scenario::fa_null && grid.scenario != Scenario::ia_null) {
    throw std::invalid_argument("standardized_histogram: needs a null scenario");
  }
  if (grid.intensities.size() != 1 || grid.deltas.size() != 1 || grid.alphas.size() != 1) {
    throw std::invalid_argument("standardized_histogram: expects a single grid cell");
  }
  const bool fa = uses_finite_activity_test(grid.scenario);
  const double null_limit = fa ? grid.fa_config().null_limit() : grid.ia_config().null_limit();
  const MomentTable moments = MomentTable::compute(grid.fa_config().p, grid.fa_config().k);
  const auto by_alpha = run_cell(grid, grid.intensities[0], grid.deltas[0], 0, moments);

  HistogramSummary summary;
  for (const StatOutcome& o : by_alpha[0]) {
    if (o.degenerate || !(o.variance_raw > 0.0)) {
      ++summary.degenerate;
      continue;
    }
    summary.z_scores.push_back((o.statistic - null_limit) / std::sqrt(o.variance_raw));
  }
  const double n = static_cast<double>(summary.z_scores.size());
  if (n > 0) {
    CompensatedSum s1;
    for (double z : summary.z_scores) s1.add(z);
    summary.mean = s1.value() / n;
    CompensatedSum s2, s3;
    for (double z : summary.z_scores) {
      const double c = z - summary.mean;
      s2.add(c * c);
      s3.add(c * c * c);
    }
    summary.variance = s2.value() / n;
    if (summary.variance > 0.0) {
      summary.skewness = s3.value() / n / std::pow(summary.variance, 1.5);
    }
    summary.ks_distance = ks_distance_to_normal(summary.z_scores);
  }
  return summary;
}

/// One row of a frequency sweep: rejection rate and statistic quartiles at
/// one sampling interval, horizon fixed.
struct FrequencySweepRow {
  double delta = 0.0;
  double level = 0.0;
  long rejections = 0;
  double rate = 0.0;
  double mc_standard_error = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  long decisions = 0;
  long degenerate = 0;
};

struct FrequencySweepTable {
  Scenario scenario;
  Intensity intensity;
  double alpha = 0.0;
  std::vector<FrequencySweepRow> rows;

  std::string to_csv() const {
    std::ostringstream os;
    os << "scenario,intensity,alpha,delta_seconds,level,rate,mc_standard_error,q1,median,q3,"
          "decisions,degenerate\n";
    for (const auto& r : rows) {
      os << to_string(scenario) << ',' << to_string(intensity) << ',' << format_g17(alpha) << ','
         << format_g17(years_to_seconds(r.delta)) << ',' << format_g17(r.level) << ','
         << format_g17(r.rate) << ',' << format_g17(r.mc_standard_error) << ','
         << format_g17(r.q1) << ',' << format_g17(r.median) << ',' << format_g17(r.q3) << ','
         << r.decisions << ',' << r.degenerate << '\n';
    }
    return os.str();
  }
};

/// Rejection rates and statistic quartiles as the sampling interval varies
/// over a fixed observation window.
inline FrequencySweepTable frequency_sweep(const ExperimentGrid& grid) {
  grid.validate();
  if (grid.intensities.size() != 1 || grid.alphas.size() != 1 || grid.levels.size() != 1) {
    throw std::invalid_argument("frequency_sweep: expects one intensity, alpha and level");
  }
  std::vector<double> deltas = grid.deltas;
  std::sort(deltas.begin(), deltas.end());

  const bool fa = uses_finite_activity_test(grid.scenario);
  const double null_limit = fa ? grid.fa_config().null_limit() : grid.ia_config().null_limit();
  const MomentTable moments = MomentTable::compute(grid.fa_config().p, grid.fa_config().k);

  FrequencySweepTable table;
  table.scenario = grid.scenario;
  table.intensity = grid.intensities[0];
  table.alpha = grid.alphas[0];
  for (std::size_t di = 0; di < deltas.size(); ++di) {
    const auto by_alpha = run_cell(grid, grid.intensities[0], deltas[di], di, moments);
    FrequencySweepRow row;
    row.delta = deltas[di];
    row.level = grid.levels[0];
    std::vector<double> stats;
    for (const StatOutcome& o : by_alpha[0]) {
      if (o.degenerate) {
        ++row.degenerate;
        continue;
      }
      ++row.decisions;
      stats.push_back(o.statistic);
      const double crit =
          critical_value(null_limit, std::max(o.variance_raw, 0.0), grid.levels[0]);
      if (o.statistic < crit) ++row.rejections;
    }
    row.rate = row.decisions > 0 ? static_cast<double>(row.rejections) / row.decisions : 0.0;
    row.mc_standard_error =
        row.decisions > 0 ? std::sqrt(row.rate * (1.0 - row.rate) / row.decisions) : 0.0;
    if (!stats.empty()) {
      std::sort(stats.begin(), stats.end());
      const auto quantile = [&](double q) {
        const double pos = q * (stats.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, stats.size() - 1);
        const double frac = pos - lo;
        return stats[lo] * (1.0 - frac) + stats[hi] * frac;
      };
      row.q1 = quantile(0.25);
      row.median = quantile(0.5);
      row.q3 = quantile(0.75);
    }
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace jumpact
