#pragma once

// Log-domain modified Bessel functions of the first kind, the Bessel ratio
// A_p, Kummer's confluent hypergeometric function M(a, c, x) and the ratio
// g(a, c; x) = M'(a, c; x) / M(a, c; x).
//
// Everything here is a pure function of its arguments.

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "dirstat/error.hpp"

namespace dirstat::specfun {

// Hard cap on the number of series terms summed in any single evaluation.
inline constexpr int kMaxSeriesTerms = 10000;

namespace detail {

inline double log_gamma(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);  // std::lgamma writes the global signgam
#else
  return std::lgamma(x);
#endif
}

inline void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) {
    throw domain_error(std::string(name) + " must be finite");
  }
}

struct SeriesSum {
  double log_peak;  // ln of the reference (peak) term
  double tail;      // sum of t_k / t_peak over k != peak
  double weighted;  // sum of h(k) t_k / t_peak over all k

  double log_sum() const { return log_peak + std::log1p(tail); }
  double weighted_mean() const { return weighted / (1.0 + tail); }
};

// Sums a series of positive terms outward from its largest term so that no
// partial sum overflows. ratio(k) = t_{k+1} / t_k must be non-increasing for
// k >= monotone_from; the geometric tail bound that stops each direction is
// only trusted there. weight(k) is accumulated alongside as sum h(k) t_k.
template <class Ratio, class Weight>
SeriesSum peak_series(long peak, double log_peak, long monotone_from, Ratio ratio,
                      Weight weight, const char* what) {
  constexpr double kEps = 1e-17;
  SeriesSum out{log_peak, 0.0, weight(peak)};
  int terms = 1;

  double term = 1.0;
  for (long k = peak;; ++k) {
    const double r = ratio(k);
    term *= r;
    out.tail += term;
    out.weighted += term * weight(k + 1);
    if (++terms > kMaxSeriesTerms) {
      throw numerical_error(std::string(what) + ": series did not converge within term cap");
    }
    if (term == 0.0) break;
    if (k >= monotone_from && r < 1.0 && term * r / (1.0 - r) <= kEps * (1.0 + out.tail)) break;
  }

  term = 1.0;
  long lowest = peak;
  for (long k = peak - 1; k >= 0; --k) {
    const double q = 1.0 / ratio(k);
    term *= q;
    out.tail += term;
    out.weighted += term * weight(k);
    lowest = k;
    if (++terms > kMaxSeriesTerms) {
      throw numerical_error(std::string(what) + ": series did not converge within term cap");
    }
    if (term == 0.0) break;
    if (k > monotone_from && q < 1.0 && term * q / (1.0 - q) <= kEps * (1.0 + out.tail)) break;
  }

  // Terms below the monotone region were not covered by the tail bound; add
  // them forward from t_0 (whose absolute value is 1).
  if (lowest > 0 && monotone_from > 0) {
    term = std::exp(-log_peak);
    const long stop = std::min(lowest, monotone_from + 1);
    for (long k = 0; k < stop && term > 0.0; ++k) {
      out.tail += term;
      out.weighted += term * weight(k);
      term *= ratio(k);
    }
  }
  return out;
}

// ---- Bessel I ------------------------------------------------------------

// Power series sum_k (x/2)^(2k+s) / (k! Gamma(k+s+1)).
inline double log_bessel_i_series(double s, double x) {
  const double q = 0.25 * x * x;
  const double crossing = 0.5 * (std::hypot(s, x) - s);
  const long peak = static_cast<long>(std::floor(crossing));
  const double log_peak = (2.0 * peak + s) * std::log(0.5 * x) - log_gamma(peak + 1.0) -
                          log_gamma(peak + s + 1.0);
  const auto ratio = [&](long k) { return q / ((k + 1.0) * (k + 1.0 + s)); };
  return peak_series(peak, log_peak, 0, ratio, [](long) { return 0.0; }, "log_bessel_i")
      .log_sum();
}

// Hankel expansion e^x / sqrt(2 pi x) sum_k (-1)^k a_k(s) / x^k, for x >> s^2.
inline double log_bessel_i_large_x(double s, double x) {
  const double mu = 4.0 * s * s;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 500; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = -term * (mu - odd * odd) / (8.0 * k * x);
    if (std::abs(next) >= std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
  }
  return x - 0.5 * std::log(2.0 * std::numbers::pi * x) + std::log(sum);
}

inline constexpr int kDebyeTerms = 13;

// Polynomials u_k(t) of the uniform large-order expansion, generated from
// u_{k+1}(t) = t^2 (1 - t^2) u_k'(t) / 2 + (1/8) int_0^t (1 - 5 s^2) u_k(s) ds.
inline const std::array<std::vector<double>, kDebyeTerms>& debye_polynomials() {
  static const auto polys = [] {
    std::array<std::vector<double>, kDebyeTerms> u;
    u[0] = {1.0};
    for (int k = 0; k + 1 < kDebyeTerms; ++k) {
      const auto& c = u[k];
      std::vector<double> next(c.size() + 3, 0.0);
      for (std::size_t j = 1; j < c.size(); ++j) {
        const double d = static_cast<double>(j) * c[j];  // coefficient of t^(j-1) in u'
        next[j + 1] += 0.5 * d;
        next[j + 3] -= 0.5 * d;
      }
      for (std::size_t j = 0; j < c.size(); ++j) {
        next[j + 1] += c[j] / (8.0 * static_cast<double>(j + 1));
        next[j + 3] -= 5.0 * c[j] / (8.0 * static_cast<double>(j + 3));
      }
      u[k + 1] = std::move(next);
    }
    return u;
  }();
  return polys;
}

// Uniform asymptotic expansion in the order; accurate for s >= ~50 at any x.
inline double log_bessel_i_debye(double s, double x) {
  const double root = std::hypot(s, x);
  const double t = s / root;
  const auto& u = debye_polynomials();
  double sum = 1.0;
  double scale = 1.0;
  for (int k = 1; k < kDebyeTerms; ++k) {
    scale /= s;
    double poly = 0.0;
    for (auto it = u[k].rbegin(); it != u[k].rend(); ++it) poly = poly * t + *it;
    const double term = poly * scale;
    sum += term;
    if (std::abs(term) <= 1e-17 * sum) break;
  }
  return root + s * std::log(x / (s + root)) - 0.5 * std::log(2.0 * std::numbers::pi * root) +
         std::log(sum);
}

// ---- Kummer M ------------------------------------------------------------

inline double kummer_asymptotic_threshold(double c) { return std::max(200.0, 40.0 * (c + 1.0)); }

// sum_k (alpha)_k (beta)_k / (k! x^k), the tail factor of the large-x
// expansion M(a, c, x) ~ Gamma(c)/Gamma(a) e^x x^(a-c) S(c-a, 1-a, x).
inline double kummer_asymptotic_sum(double alpha, double beta, double x) {
  double term = 1.0;
  double sum = 1.0;
  for (int k = 0; k < 1000; ++k) {
    const double next = term * (alpha + k) * (beta + k) / ((k + 1.0) * x);
    if (next == 0.0) break;
    if (std::abs(next) >= std::abs(term)) {
      if (std::abs(term) > 1e-14 * std::abs(sum)) {
        throw numerical_error("kummer asymptotic expansion diverged before converging");
      }
      break;
    }
    term = next;
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// Series sum_j (a)_j/(c)_j x^j/j! for a > 0, c > 0, x > 0, summed from the
// peak; weight(j) is accumulated alongside.
template <class Weight>
SeriesSum kummer_series(double a, double c, double x, Weight weight) {
  const auto ratio = [&](long j) { return (a + j) * x / ((c + j) * (j + 1.0)); };

  const double b = c + 1.0 - x;
  const double disc = b * b - 4.0 * (c - a * x);
  long peak = 0;
  if (disc >= 0.0) {
    const double root = 0.5 * (-b + std::sqrt(disc));
    if (root >= 0.0) peak = static_cast<long>(std::floor(root)) + 1;
  }
  // (a+j)/((c+j)(j+1)) is log-concave in j; it may rise before it falls.
  long monotone_from = 0;
  while (monotone_from < kMaxSeriesTerms && ratio(monotone_from + 1) > ratio(monotone_from)) {
    ++monotone_from;
  }
  double log_peak = 0.0;
  if (peak <= 512) {
    for (long j = 0; j < peak; ++j) log_peak += std::log(ratio(j));
  } else {
    log_peak = log_gamma(a + peak) - log_gamma(a) - log_gamma(c + peak) + log_gamma(c) +
               peak * std::log(x) - log_gamma(peak + 1.0);
  }
  return peak_series(peak, log_peak, monotone_from, ratio, weight, "kummer_m");
}

// ln M(a, c, x) for x > 0, a >= 0, c >= a.
inline double log_kummer_m_positive(double a, double c, double x) {
  if (a == 0.0 || x == 0.0) return 0.0;
  if (x >= kummer_asymptotic_threshold(c)) {
    const double s = kummer_asymptotic_sum(c - a, 1.0 - a, x);
    return log_gamma(c) - log_gamma(a) + x + (a - c) * std::log(x) + std::log(s);
  }
  return kummer_series(a, c, x, [](long) { return 0.0; }).log_sum();
}

inline void require_kummer_params(double a, double c, double x) {
  require_finite(a, "a");
  require_finite(c, "c");
  require_finite(x, "kappa");
  if (!(a > 0.0) || !(c >= a)) {
    throw domain_error("kummer parameters must satisfy c >= a > 0");
  }
}

}  // namespace detail

// ln I_s(x) for s >= 0, x >= 0. Returns -inf for x == 0 < s.
inline double log_bessel_i(double s, double x) {
  detail::require_finite(s, "order");
  detail::require_finite(x, "argument");
  if (s < 0.0) throw domain_error("log_bessel_i: order must be >= 0");
  if (x < 0.0) throw domain_error("log_bessel_i: argument must be >= 0");
  if (x == 0.0) return s == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();

  const double crossing = 0.5 * (std::hypot(s, x) - s);
  if (crossing <= 2500.0) return detail::log_bessel_i_series(s, x);
  if (x >= 2.0 * s * s + 50.0) return detail::log_bessel_i_large_x(s, x);
  return detail::log_bessel_i_debye(s, x);
}

// A_p(x) = I_{p/2}(x) / I_{p/2-1}(x), by Perron's continued fraction
//   A = x / (2n + x - (2n+1)x / (2n+1+2x - (2n+3)x / (2n+2+2x - ...))),
// n = p/2, evaluated with the modified Lentz method.
inline double bessel_ratio(int p, double x) {
  detail::require_finite(x, "kappa");
  if (p < 2) throw domain_error("bessel_ratio: dimension p must be >= 2");
  if (x < 0.0) throw domain_error("bessel_ratio: kappa must be >= 0");
  if (x == 0.0) return 0.0;

  constexpr double tiny = 1e-300;
  const double n = 0.5 * p;
  double f = 2.0 * n + x;
  double c = f;
  double d = 0.0;
  for (int k = 1; k <= kMaxSeriesTerms; ++k) {
    const double b = 2.0 * n + k + 2.0 * x;
    const double a = -(2.0 * n + 2.0 * k - 1.0) * x;
    d = b + a * d;
    if (d == 0.0) d = tiny;
    c = b + a / c;
    if (c == 0.0) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-15) return x / f;
  }
  throw numerical_error("bessel_ratio: continued fraction did not converge");
}

// d/dx A_p(x) = 1 - A_p(x)^2 - (p-1)/x A_p(x).
inline double bessel_ratio_derivative(int p, double x) {
  if (x == 0.0) return 1.0 / p;
  const double a = bessel_ratio(p, x);
  return 1.0 - a * a - (p - 1.0) / x * a;
}

// ln M(a, c, x), c >= a > 0, any finite x. Negative arguments go through
// Kummer's transformation M(a, c, x) = e^x M(c - a, c, -x).
inline double log_kummer_m(double a, double c, double x) {
  detail::require_kummer_params(a, c, x);
  if (x == 0.0) return 0.0;
  if (x < 0.0) return x + detail::log_kummer_m_positive(c - a, c, -x);
  return detail::log_kummer_m_positive(a, c, x);
}

// g(a, c; x) = M'(a, c; x) / M(a, c; x) = (a/c) M(a+1, c+1, x) / M(a, c, x).
//
// Computed as a weighted mean so the result is inside (0, 1) by construction:
//   x > 0:  sum_j t_j (a+j)/(c+j) / sum_j t_j,  t_j the terms of M(a, c, x);
//   x < 0:  sum_j t_j a/(c+j)     / sum_j t_j,  t_j the terms of M(c-a, c, -x).
inline double g_ratio(double a, double c, double x) {
  detail::require_kummer_params(a, c, x);
  if (x == 0.0) return a / c;
  if (a == c) return 1.0;
  const double threshold = detail::kummer_asymptotic_threshold(c + 1.0);
  if (x > 0.0) {
    if (x >= threshold) {
      return detail::kummer_asymptotic_sum(c - a, -a, x) /
             detail::kummer_asymptotic_sum(c - a, 1.0 - a, x);
    }
    return detail::kummer_series(a, c, x, [&](long j) { return (a + j) / (c + j); })
        .weighted_mean();
  }
  const double y = -x;
  if (y >= threshold) {
    return a / y * detail::kummer_asymptotic_sum(a + 1.0, 1.0 - c + a, y) /
           detail::kummer_asymptotic_sum(a, 1.0 - c + a, y);
  }
  return detail::kummer_series(c - a, c, y, [&](long j) { return a / (c + j); })
      .weighted_mean();
}

}  // namespace dirstat::specfun
