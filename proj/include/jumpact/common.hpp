#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace jumpact {

// Trading calendar used for all time conversions: one trading day is 6.5
// hours (23,400 seconds) and one trading year is 252 such days.
inline constexpr double kSecondsPerDay = 23400.0;
inline constexpr double kDaysPerYear = 252.0;
inline constexpr double kDayYears = 1.0 / kDaysPerYear;
inline constexpr double kSecondsPerYear = kSecondsPerDay * kDaysPerYear;

inline constexpr double seconds_to_years(double s) { return s / kSecondsPerYear; }
inline constexpr double years_to_seconds(double y) { return y * kSecondsPerYear; }

// Input data is unusable (non-finite values, malformed files, ...).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// A ratio statistic is undefined on this sample (a required truncated power
// variation is zero, or a variance estimate is non-positive). This is an
// expected outcome under aggressive truncation, not a bug, so callers that
// produce reports convert it into a typed no-decision result.
class DegenerateSampleError : public std::runtime_error {
 public:
  explicit DegenerateSampleError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical routine (quadrature, root finding) failed to converge.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Neumaier compensated accumulator. Used for every power-variation sum so
// that full-frequency and strided sums are reproducible across run
// configurations regardless of accumulation chunking.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  void add(const CompensatedSum& other) {
    add(other.sum_);
    add(other.comp_);
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Doubles serialized with 17 significant digits round-trip losslessly.
inline std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// |x|^p with a fast path for small integer exponents (the statistics evaluate
// powers p in {2,...,16} over millions of increments).
inline double pow_abs(double x, double p) {
  const double a = std::abs(x);
  const int ip = static_cast<int>(p);
  if (static_cast<double>(ip) == p && ip >= 0 && ip <= 16) {
    double base = a;
    double result = 1.0;
    int e = ip;
    while (e > 0) {
      if (e & 1) result *= base;
      base *= base;
      e >>= 1;
    }
    return result;
  }
  return std::pow(a, p);
}

}  // namespace jumpact
