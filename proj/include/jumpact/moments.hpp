#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "jumpact/common.hpp"
#include "jumpact/normal.hpp"

namespace jumpact {

/// p-th absolute moment of a standard normal, E|U|^p = 2^{p/2} Gamma((p+1)/2) / sqrt(pi).
/// Even integer p is computed as the double factorial (p-1)!!, which is exact.
inline double abs_normal_moment(double p) {
  if (!(p > 0.0)) throw std::invalid_argument("abs_normal_moment: p must be > 0");
  const int ip = static_cast<int>(p);
  if (static_cast<double>(ip) == p && ip % 2 == 0) {
    return odd_double_factorial(ip / 2);
  }
  return std::exp(0.5 * p * std::log(2.0) + std::lgamma(0.5 * (p + 1.0))) /
         std::sqrt(3.141592653589793238462643383279502884);
}

namespace detail {

// Gauss-Legendre nodes/weights on [-1,1], computed by Newton iteration on the
// Legendre recurrence. Cached per order.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(int n) : nodes(n), weights(n) {
    const double pi = 3.141592653589793238462643383279502884;
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double x = std::cos(pi * (i + 0.75) / (n + 0.5));
      double pp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0, p1 = 0.0;
        for (int j = 0; j < n; ++j) {
          const double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
        }
        pp = n * (x * p0 - p1) / (x * x - 1.0);
        const double dx = p0 / pp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      nodes[i] = -x;
      nodes[n - 1 - i] = x;
      weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
      weights[n - 1 - i] = weights[i];
    }
  }
};

inline const GaussLegendre& gl24() {
  static const GaussLegendre rule(24);
  return rule;
}

// Composite 24-point Gauss-Legendre over [lo, hi] split into `panels` panels.
template <class F>
double integrate_panels(const F& f, double lo, double hi, int panels) {
  const GaussLegendre& rule = gl24();
  const double h = (hi - lo) / panels;
  double total = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double a = lo + k * h;
    const double mid = a + 0.5 * h;
    double panel = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      panel += rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
    }
    total += 0.5 * h * panel;
  }
  return total;
}

// Doubles the panel count until two successive estimates agree.
template <class F>
double integrate_adaptive(const F& f, double lo, double hi, double abs_tol, double rel_tol,
                          const char* what) {
  int panels = 8;
  double prev = integrate_panels(f, lo, hi, panels);
  for (int round = 0; round < 7; ++round) {
    panels *= 2;
    const double cur = integrate_panels(f, lo, hi, panels);
    const double err = std::abs(cur - prev);
    if (err <= abs_tol + rel_tol * std::abs(cur)) return cur;
    prev = cur;
  }
  throw NumericalError(std::string(what) + ": quadrature did not converge, achieved tolerance " +
                       std::to_string(std::abs(prev)));
}

}  // namespace detail

/// E(|U|^p |U + a V|^p) by 2-D quadrature, with U, V independent standard
/// normals and a = sqrt(k-1). After substituting w = u + a v and folding by
/// the (u,w) -> (-u,-w) symmetry, the integrand is smooth on (0,inf)^2:
///   m = (2/a) int_0^inf du u^p phi(u) int_0^inf dw w^p [phi((w-u)/a) + phi((w+u)/a)].
inline double joint_abs_moment_quadrature(double p, int k) {
  if (!(p > 2.0)) throw std::invalid_argument("joint_abs_moment: p must be > 2");
  if (k < 2) throw std::invalid_argument("joint_abs_moment: k must be >= 2");
  const double a = std::sqrt(static_cast<double>(k - 1));
  const double u_max = 16.0 + p;
  const double w_max = u_max + a * (16.0 + p);

  const auto inner = [&](double u) {
    const auto g = [&](double w) {
      return pow_abs(w, p) * (normal_pdf((w - u) / a) + normal_pdf((w + u) / a));
    };
    return detail::integrate_panels(g, 0.0, w_max, 64);
  };
  const auto outer = [&](double u) { return pow_abs(u, p) * normal_pdf(u) * inner(u); };

  const double raw =
      detail::integrate_adaptive(outer, 0.0, u_max, 1e-10, 1e-12, "joint_abs_moment");
  return 2.0 / a * raw;
}

/// Exact value of E(U^p (U + a V)^p) for even integer p via the binomial
/// expansion with factorized normal moments; a^2 = k - 1.
inline double joint_abs_moment_expansion(int p, int k) {
  if (p <= 2 || p % 2 != 0) {
    throw std::invalid_argument("joint_abs_moment_expansion: p must be an even integer > 2");
  }
  if (k < 2) throw std::invalid_argument("joint_abs_moment_expansion: k must be >= 2");
  const double a2 = static_cast<double>(k - 1);
  double binom = 1.0;  // C(p, j), updated incrementally
  double total = 0.0;
  for (int j = 0; j <= p; ++j) {
    if (j % 2 == 0) {
      // E U^{p+j} * a^{p-j} * E V^{p-j}; odd-power terms vanish.
      total += binom * odd_double_factorial((p + j) / 2) *
               std::pow(a2, (p - j) / 2) * odd_double_factorial((p - j) / 2);
    }
    binom = binom * (p - j) / (j + 1);
  }
  return total;
}

/// Joint absolute moment m_{k,p} = E(|U|^p |U + sqrt(k-1) V|^p). Even integer
/// p uses the exact expansion; anything else goes through quadrature.
inline double joint_abs_moment(double p, int k) {
  const int ip = static_cast<int>(p);
  if (static_cast<double>(ip) == p && ip % 2 == 0 && ip > 2) {
    return joint_abs_moment_expansion(ip, k);
  }
  return joint_abs_moment_quadrature(p, k);
}

/// Variance constant N(p,k) of the two-frequency statistic:
///   N(p,k) = ( k^{p-2}(1+k) m_{2p} + k^{p-2}(k-1) m_p^2 - 2 k^{p/2-1} m_{k,p} ) / m_{2p}.
inline double n_constant(double p, int k) {
  if (!(p > 2.0)) throw std::invalid_argument("n_constant: p must be > 2");
  if (k < 2) throw std::invalid_argument("n_constant: k must be >= 2");
  const double m_p = abs_normal_moment(p);
  const double m_2p = abs_normal_moment(2.0 * p);
  const double m_kp = joint_abs_moment(p, k);
  const double kd = static_cast<double>(k);
  return (std::pow(kd, p - 2.0) * (1.0 + kd) * m_2p + std::pow(kd, p - 2.0) * (kd - 1.0) * m_p * m_p -
          2.0 * std::pow(kd, 0.5 * p - 1.0) * m_kp) /
         m_2p;
}

/// Precomputed moment constants for one (p, k); computed once and shared
/// read-only across workers.
struct MomentTable {
  double p = 4.0;
  int k = 2;
  double m_p = 0.0;
  double m_2p = 0.0;
  double m_kp = 0.0;
  double n_pk = 0.0;

  static MomentTable compute(double p, int k) {
    MomentTable t;
    t.p = p;
    t.k = k;
    t.m_p = abs_normal_moment(p);
    t.m_2p = abs_normal_moment(2.0 * p);
    t.m_kp = joint_abs_moment(p, k);
    t.n_pk = (std::pow(static_cast<double>(k), p - 2.0) * (1.0 + k) * t.m_2p +
              std::pow(static_cast<double>(k), p - 2.0) * (k - 1.0) * t.m_p * t.m_p -
              2.0 * std::pow(static_cast<double>(k), 0.5 * p - 1.0) * t.m_kp) /
             t.m_2p;
    return t;
  }
};

}  // namespace jumpact
