#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "jumpact/common.hpp"

namespace jumpact {

/// Regularly spaced observations of one path (log-price), with the sampling
/// interval in years and a segmentation into trading days. Increments are
/// always formed within a day segment; nothing straddles a day boundary.
/// Instances are immutable after construction and safe to share across
/// threads.
class PathSeries {
 public:
  PathSeries(std::vector<double> values, double delta_years,
             std::vector<std::size_t> day_starts = {0})
      : values_(std::move(values)), delta_(delta_years), day_starts_(std::move(day_starts)) {
    if (values_.size() < 2) {
      throw std::invalid_argument("PathSeries: need at least 2 observations");
    }
    if (!(delta_ > 0.0)) {
      throw std::invalid_argument("PathSeries: delta must be > 0");
    }
    if (day_starts_.empty() || day_starts_.front() != 0) {
      throw std::invalid_argument("PathSeries: day_starts must begin at index 0");
    }
    for (std::size_t d = 1; d < day_starts_.size(); ++d) {
      if (day_starts_[d] <= day_starts_[d - 1] || day_starts_[d] >= values_.size()) {
        throw std::invalid_argument("PathSeries: day_starts must be strictly increasing and in range");
      }
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i])) {
        throw DataError("non-finite observation at index " + std::to_string(i));
      }
    }
  }

  std::span<const double> values() const { return values_; }
  double delta() const { return delta_; }
  std::size_t size() const { return values_.size(); }

  std::size_t day_count() const { return day_starts_.size(); }
  const std::vector<std::size_t>& day_starts() const { return day_starts_; }

  std::span<const double> day(std::size_t d) const {
    const std::size_t lo = day_starts_[d];
    const std::size_t hi = d + 1 < day_starts_.size() ? day_starts_[d + 1] : values_.size();
    return std::span<const double>(values_).subspan(lo, hi - lo);
  }

  // Number of unit increments in day d.
  std::size_t day_increment_count(std::size_t d) const { return day(d).size() - 1; }

  /// Rebuilds the series with day segments in the given order.
  PathSeries with_day_order(std::span<const std::size_t> order) const {
    std::vector<double> vals;
    vals.reserve(values_.size());
    std::vector<std::size_t> starts;
    starts.reserve(order.size());
    for (std::size_t d : order) {
      starts.push_back(vals.size());
      auto seg = day(d);
      vals.insert(vals.end(), seg.begin(), seg.end());
    }
    return PathSeries(std::move(vals), delta_, std::move(starts));
  }

 private:
  std::vector<double> values_;
  double delta_;
  std::vector<std::size_t> day_starts_;
};

/// Rule producing a truncation cutoff from a reference volatility: the cutoff
/// at sampling interval delta is alpha * sigma_ref * delta^varpi. With
/// varpi = 1/2 (the default), alpha is the cutoff expressed as a number of
/// per-interval standard deviations of the continuous part.
struct TruncationSpec {
  double alpha = 8.0;
  double varpi = 0.5;
  double sigma_ref = 0.25;

  void validate() const {
    if (!(alpha > 0.0)) throw std::invalid_argument("TruncationSpec: alpha must be > 0");
    if (!(varpi > 0.0 && varpi <= 0.5)) {
      throw std::invalid_argument("TruncationSpec: varpi must be in (0, 1/2]");
    }
    if (!(sigma_ref > 0.0)) throw std::invalid_argument("TruncationSpec: sigma_ref must be > 0");
  }
};

inline double cutoff_from_spec(const TruncationSpec& spec, double delta) {
  spec.validate();
  if (!(delta > 0.0)) throw std::invalid_argument("cutoff_from_spec: delta must be > 0");
  return spec.alpha * spec.sigma_ref * std::pow(delta, spec.varpi);
}

/// Strided increments within each day segment, all days concatenated.
/// Each retained increment spans exactly `stride` observations of one day.
inline std::vector<double> increments(const PathSeries& path, std::size_t stride) {
  if (stride == 0) throw std::invalid_argument("increments: stride must be >= 1");
  if (path.size() < stride + 1) {
    throw std::invalid_argument("increments: path too short for stride");
  }
  std::vector<double> out;
  out.reserve(path.size() / stride);
  for (std::size_t d = 0; d < path.day_count(); ++d) {
    auto seg = path.day(d);
    for (std::size_t i = stride; i < seg.size(); i += stride) {
      out.push_back(seg[i] - seg[i - stride]);
    }
  }
  return out;
}

struct PowerVariationResult {
  double value = 0.0;
  long kept = 0;   // increments at or below the cutoff
  long total = 0;  // strided increments examined
};

namespace detail {

// Per-day partial sum; cutoff comparison is closed (|dx| <= u).
inline void tpv_day(std::span<const double> seg, double p, double cutoff,
                    std::size_t stride, CompensatedSum& acc, long& kept, long& total) {
  for (std::size_t i = stride; i < seg.size(); i += stride) {
    const double dx = seg[i] - seg[i - stride];
    ++total;
    const double mag = std::abs(dx);
    if (mag <= cutoff) {
      acc.add(pow_abs(mag, p));
      ++kept;
    }
  }
}

}  // namespace detail

/// Truncated power variation with one cutoff per day. A non-positive or
/// non-finite day cutoff marks that day excluded: its increments contribute
/// nothing and are not counted.
inline PowerVariationResult truncated_power_variation_per_day(
    const PathSeries& path, double p, std::span<const double> day_cutoffs,
    std::size_t stride = 1) {
  if (!(p > 0.0)) throw std::invalid_argument("truncated_power_variation: p must be > 0");
  if (stride == 0) throw std::invalid_argument("truncated_power_variation: stride must be >= 1");
  if (day_cutoffs.size() != path.day_count()) {
    throw std::invalid_argument("truncated_power_variation: need one cutoff per day");
  }
  PowerVariationResult res;
  CompensatedSum across_days;
  for (std::size_t d = 0; d < path.day_count(); ++d) {
    const double u = day_cutoffs[d];
    if (!(u > 0.0) || !std::isfinite(u)) continue;
    CompensatedSum day_acc;
    detail::tpv_day(path.day(d), p, u, stride, day_acc, res.kept, res.total);
    across_days.add(day_acc);
  }
  res.value = across_days.value();
  return res;
}

inline PowerVariationResult truncated_power_variation_counted(
    const PathSeries& path, double p, double cutoff, std::size_t stride = 1) {
  if (!(cutoff > 0.0)) throw std::invalid_argument("truncated_power_variation: cutoff must be > 0");
  std::vector<double> cutoffs(path.day_count(), cutoff);
  return truncated_power_variation_per_day(path, p, cutoffs, stride);
}

/// Sum of p-th absolute powers of strided increments no larger than the
/// cutoff, aggregated day by day with compensated summation.
inline double truncated_power_variation(const PathSeries& path, double p, double cutoff,
                                        std::size_t stride = 1) {
  return truncated_power_variation_counted(path, p, cutoff, stride).value;
}

struct RateExponents {
  double rho1;
  double rho2;
};

/// Truncation-rate exponents associated with a power p > 2: rho1 bounds the
/// rate needed for the probability limits, rho2 the stricter rate needed by
/// the central limit theory of the two-cutoff statistic.
inline RateExponents rate_exponents(double p) {
  if (!(p > 2.0)) throw std::invalid_argument("rate_exponents: p must be > 2");
  const double rho1 = (p - 2.0) / (2.0 * p);
  const double rho2 = std::min((p - 2.0) / (4.0 * p - 4.0), (2.0 * p - 4.0) / (11.0 * p - 10.0));
  return {rho1, rho2};
}

/// With cutoff proportional to delta^varpi, the rate condition "delta^rho /
/// cutoff stays bounded for some rho < rho_bound" holds iff varpi < rho_bound.
/// Used to warn when a chosen varpi steps outside a test's hypotheses.
inline bool check_rate_condition(double varpi, double rho_bound) {
  return varpi < rho_bound;
}

}  // namespace jumpact
