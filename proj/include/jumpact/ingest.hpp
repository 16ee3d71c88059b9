#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "jumpact/common.hpp"
#include "jumpact/moments.hpp"
#include "jumpact/path_series.hpp"
#include "jumpact/statistics.hpp"

namespace jumpact {

/// One trade record: epoch milliseconds, price, and the venue's quality flag.
struct TickRecord {
  std::int64_t timestamp_ms = 0;
  double price = 0.0;
  std::string flag;
};

struct IngestOptions {
  // Flags accepted as good trades; empty means keep everything (also how a
  // file without a flag column is treated).
  std::vector<std::string> good_flags;
  // Trading session within each calendar day, seconds since midnight UTC.
  double session_open_seconds = 9.5 * 3600.0;
  double session_close_seconds = 16.0 * 3600.0;
  long min_ticks_per_day = 10;
};

struct LoadResult {
  std::vector<TickRecord> ticks;
  long rows_read = 0;
  long dropped_bad_flag = 0;
};

namespace detail {

inline bool parse_double(std::string_view s, double& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc() && res.ptr == end;
}

inline bool parse_int64(std::string_view s, std::int64_t& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc() && res.ptr == end;
}

inline std::vector<std::string_view> split_csv_line(std::string_view line,
                                                    std::vector<std::string_view>& out) {
  out.clear();
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

}  // namespace detail

/// Parses tick CSV with header `timestamp_ms,price,flag` (flag optional),
/// drops records whose flag is not in the accepted set, and stable-sorts by
/// timestamp. Malformed rows abort with their line number.
inline LoadResult load_ticks(std::istream& in, const IngestOptions& opts = {}) {
  LoadResult result;
  std::string line;
  long line_no = 0;
  bool saw_header = false;
  bool has_flag_column = true;
  std::vector<std::string_view> fields;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    detail::split_csv_line(line, fields);
    if (!saw_header) {
      if (fields.size() < 2 || fields[0] != "timestamp_ms" || fields[1] != "price") {
        throw DataError("tick file: expected header 'timestamp_ms,price[,flag]' on line 1");
      }
      has_flag_column = fields.size() >= 3 && fields[2] == "flag";
      saw_header = true;
      continue;
    }
    ++result.rows_read;
    TickRecord tick;
    if (fields.size() < 2 || !detail::parse_int64(fields[0], tick.timestamp_ms) ||
        !detail::parse_double(fields[1], tick.price) || !(tick.price > 0.0) ||
        !std::isfinite(tick.price)) {
      throw DataError("tick file: malformed row at line " + std::to_string(line_no));
    }
    if (has_flag_column && fields.size() >= 3) tick.flag = std::string(fields[2]);
    if (!opts.good_flags.empty() &&
        std::find(opts.good_flags.begin(), opts.good_flags.end(), tick.flag) ==
            opts.good_flags.end()) {
      ++result.dropped_bad_flag;
      continue;
    }
    result.ticks.push_back(std::move(tick));
  }
  std::stable_sort(result.ticks.begin(), result.ticks.end(),
                   [](const TickRecord& a, const TickRecord& b) {
                     return a.timestamp_ms < b.timestamp_ms;
                   });
  return result;
}

inline LoadResult load_ticks_file(const std::string& path, const IngestOptions& opts = {}) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open tick file: " + path);
  return load_ticks(in, opts);
}

struct ResampleReport {
  long days_used = 0;
  long days_skipped = 0;
  std::vector<std::string> skipped;  // one line per skipped day
};

/// Previous-tick resampling of log prices onto the regular session grid, one
/// day segment per calendar day. A grid value is the log of the most recent
/// price at or before the grid time, so later ticks never change earlier
/// values. Days with no tick before the first grid point, or with fewer than
/// the configured minimum of ticks, are skipped and reported.
inline PathSeries resample_to_grid(std::span<const TickRecord> ticks, double delta_seconds,
                                   const IngestOptions& opts = {},
                                   ResampleReport* report = nullptr) {
  if (!(delta_seconds > 0.0)) {
    throw std::invalid_argument("resample_to_grid: delta_seconds must be > 0");
  }
  if (ticks.empty()) throw DataError("resample_to_grid: no ticks");
  const long grid_per_day =
      static_cast<long>(std::floor((opts.session_close_seconds - opts.session_open_seconds) /
                                   delta_seconds)) + 1;
  if (grid_per_day < 2) {
    throw std::invalid_argument("resample_to_grid: session shorter than one sampling interval");
  }

  std::vector<double> values;
  std::vector<std::size_t> day_starts;
  constexpr std::int64_t kMsPerDay = 86400000;

  std::size_t i = 0;
  while (i < ticks.size()) {
    const std::int64_t day = ticks[i].timestamp_ms / kMsPerDay;
    std::size_t j = i;
    while (j < ticks.size() && ticks[j].timestamp_ms / kMsPerDay == day) ++j;

    const auto skip = [&](const std::string& why) {
      if (report) {
        ++report->days_skipped;
        report->skipped.push_back("day " + std::to_string(day) + ": " + why);
      }
    };
    if (static_cast<long>(j - i) < opts.min_ticks_per_day) {
      skip("only " + std::to_string(j - i) + " ticks");
      i = j;
      continue;
    }
    const double open_ms = day * static_cast<double>(kMsPerDay) +
                           opts.session_open_seconds * 1000.0;
    if (static_cast<double>(ticks[i].timestamp_ms) > open_ms) {
      skip("no tick at or before the session open");
      i = j;
      continue;
    }

    std::vector<double> day_values(grid_per_day);
    std::size_t cursor = i;
    for (long g = 0; g < grid_per_day; ++g) {
      const double grid_ms = open_ms + g * delta_seconds * 1000.0;
      while (cursor + 1 < j && static_cast<double>(ticks[cursor + 1].timestamp_ms) <= grid_ms) {
        ++cursor;
      }
      day_values[g] = std::log(ticks[cursor].price);
    }
    day_starts.push_back(values.size());
    values.insert(values.end(), day_values.begin(), day_values.end());
    if (report) ++report->days_used;
    i = j;
  }

  if (values.empty()) throw DataError("resample_to_grid: every day was skipped");
  return PathSeries(std::move(values), seconds_to_years(delta_seconds), std::move(day_starts));
}

/// Per-day volatility pre-estimate used to scale that day's truncation
/// cutoff.
struct DayVolatility {
  std::size_t day_index = 0;
  double sigma_hat = 0.0;  // annualized
  long n_used = 0;
  bool flagged_zero = false;
};

/// Annualized volatility of one day segment from the truncated realized
/// variance: sigma^2 = (1/T_day) sum (dX)^2 1{|dX| <= sqrt(delta)}. The
/// cutoff sqrt(delta) is an absolute level in log-return units (about four
/// per-interval standard deviations when the annualized volatility is 25%).
inline DayVolatility estimate_day_volatility(std::span<const double> day_values,
                                             double delta_years, std::size_t day_index = 0) {
  if (day_values.size() < 2) {
    throw std::invalid_argument("estimate_day_volatility: day needs at least 2 observations");
  }
  DayVolatility out;
  out.day_index = day_index;
  const double cutoff = std::sqrt(delta_years);
  CompensatedSum sum;
  for (std::size_t i = 1; i < day_values.size(); ++i) {
    const double dx = day_values[i] - day_values[i - 1];
    if (std::abs(dx) <= cutoff) {
      sum.add(dx * dx);
      ++out.n_used;
    }
  }
  const double t_day = static_cast<double>(day_values.size() - 1) * delta_years;
  const double var = sum.value() / t_day;
  out.sigma_hat = std::sqrt(std::max(var, 0.0));
  out.flagged_zero = out.n_used == 0 || out.sigma_hat == 0.0;
  return out;
}

inline std::vector<DayVolatility> estimate_volatilities(const PathSeries& path) {
  std::vector<DayVolatility> out;
  out.reserve(path.day_count());
  for (std::size_t d = 0; d < path.day_count(); ++d) {
    out.push_back(estimate_day_volatility(path.day(d), path.delta(), d));
  }
  return out;
}

/// Output of the per-day empirical procedure, one report pair per truncation
/// index.
struct PipelineResult {
  std::vector<double> alphas;
  std::vector<TestReport> finite_activity;
  std::vector<TestReport> infinite_activity;
  std::vector<DayVolatility> day_volatilities;
  long days_excluded = 0;
};

/// The day-by-day empirical procedure: estimate each day's volatility, set
/// that day's cutoff to alpha * sigma_hat * delta^varpi, accumulate per-day
/// truncated power variations across days, and form both test statistics per
/// alpha. Days whose volatility estimate is zero are excluded from every sum
/// and counted.
inline PipelineResult run_empirical_pipeline(const PathSeries& path,
                                             const FiniteActivityTestConfig& fa_cfg,
                                             const InfiniteActivityTestConfig& ia_cfg,
                                             std::span<const double> alphas,
                                             const MomentTable& moments) {
  fa_cfg.validate();
  ia_cfg.validate();
  PipelineResult result;
  result.alphas.assign(alphas.begin(), alphas.end());
  result.day_volatilities = estimate_volatilities(path);
  for (const auto& dv : result.day_volatilities) {
    if (dv.flagged_zero) ++result.days_excluded;
  }

  const double delta_pow_fa = std::pow(path.delta(), fa_cfg.truncation.varpi);
  const double delta_pow_ia = std::pow(path.delta(), ia_cfg.truncation.varpi);
  std::vector<double> fa_cutoffs(path.day_count());
  std::vector<double> ia_cutoffs(path.day_count());
  for (double alpha : alphas) {
    for (std::size_t d = 0; d < path.day_count(); ++d) {
      const DayVolatility& dv = result.day_volatilities[d];
      // Excluded days get a non-positive cutoff, which removes them from
      // every power-variation sum.
      fa_cutoffs[d] = dv.flagged_zero ? -1.0 : alpha * dv.sigma_hat * delta_pow_fa;
      ia_cutoffs[d] = dv.flagged_zero ? -1.0 : alpha * dv.sigma_hat * delta_pow_ia;
    }
    FiniteActivityTestConfig fa = fa_cfg;
    fa.truncation.alpha = alpha;
    InfiniteActivityTestConfig ia = ia_cfg;
    ia.truncation.alpha = alpha;
    result.finite_activity.push_back(test_finite_activity(path, fa, moments, fa_cutoffs));
    result.infinite_activity.push_back(test_infinite_activity(path, ia, ia_cutoffs));
  }
  return result;
}

/// Writes a path as an ingest-compatible tick CSV: one tick per grid point,
/// price = price_scale * exp(value), timestamps on the session grid of
/// consecutive calendar days starting at `first_day` (days since epoch).
inline std::string export_ticks_csv(const PathSeries& path, double price_scale = 1.0,
                                    const IngestOptions& opts = {},
                                    std::int64_t first_day = 10000) {
  std::ostringstream os;
  os << "timestamp_ms,price,flag\n";
  const double delta_ms = years_to_seconds(path.delta()) * 1000.0;
  for (std::size_t d = 0; d < path.day_count(); ++d) {
    const double open_ms = (first_day + static_cast<std::int64_t>(d)) * 86400000.0 +
                           opts.session_open_seconds * 1000.0;
    auto seg = path.day(d);
    for (std::size_t g = 0; g < seg.size(); ++g) {
      os << static_cast<std::int64_t>(open_ms + g * delta_ms) << ','
         << format_g17(price_scale * std::exp(seg[g])) << ",G\n";
    }
  }
  return os.str();
}

}  // namespace jumpact
