#pragma once

// Brute-force extended-precision reference values for the special functions.
// Plain power series summed term by term in multiprecision arithmetic; no
// asymptotics, no peak-centring, no continued fractions. Slow on purpose.

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <stdexcept>

namespace oracle {

using mp50 = boost::multiprecision::cpp_bin_float_50;
// Alternating Kummer series at large negative argument cancels ~|x|/ln(10)
// digits, so it gets a much wider mantissa.
using mp_wide = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<250>>;

// ln I_s(x) = ln sum_k (x/2)^(2k+s) / (k! Gamma(k+s+1))
inline double log_bessel_i(double s, double x) {
  if (x == 0.0) {
    return s == 0.0 ? 0.0 : -HUGE_VAL;
  }
  const mp50 S{s};
  const mp50 half_x = mp50{x} / 2;
  const mp50 q = half_x * half_x;
  const mp50 first = boost::multiprecision::pow(half_x, S) /
                     boost::math::tgamma(S + 1);
  mp50 term = first;
  mp50 sum = first;
  for (long k = 0;; ++k) {
    term *= q / ((k + 1) * (k + 1 + S));
    sum += term;
    if (k > 10 && term < sum * mp50{"1e-45"}) break;
    if (k > 5'000'000) throw std::runtime_error("oracle bessel series");
  }
  return static_cast<double>(boost::multiprecision::log(sum));
}

// A_p(x) = I_{p/2}(x) / I_{p/2-1}(x), both series in multiprecision.
inline double bessel_ratio(int p, double x) {
  if (x == 0.0) return 0.0;
  const mp50 nu{p / 2.0 - 1.0};
  const mp50 half_x = mp50{x} / 2;
  const mp50 q = half_x * half_x;
  auto series = [&](const mp50& s) {
    mp50 term = boost::multiprecision::pow(half_x, s) / boost::math::tgamma(s + 1);
    mp50 sum = term;
    for (long k = 0;; ++k) {
      term *= q / ((k + 1) * (k + 1 + s));
      sum += term;
      if (k > 10 && term < sum * mp50{"1e-45"}) break;
      if (k > 5'000'000) throw std::runtime_error("oracle ratio series");
    }
    return sum;
  };
  return static_cast<double>(series(nu + 1) / series(nu));
}

// M(a, c, x) = sum_j (a)_j / (c)_j x^j / j!, raw series (alternating for x < 0).
template <class Real>
Real kummer_m(double a, double c, double x) {
  const Real A{a};
  const Real C{c};
  const Real X{x};
  Real term{1};
  Real sum{1};
  for (long j = 0;; ++j) {
    term *= (A + j) * X / ((C + j) * (j + 1));
    sum += term;
    const Real mag = term < 0 ? Real{-term} : term;
    const Real ssum = sum < 0 ? Real{-sum} : sum;
    if (j > 10 && (j + 1 > std::abs(x)) && mag < ssum * Real{"1e-45"}) break;
    if (j > 5'000'000) throw std::runtime_error("oracle kummer series");
  }
  return sum;
}

// Beyond x = -300 even the wide series is too slow; use the Euler integral
//   M(a, c, x) = Gamma(c) / (Gamma(a) Gamma(c-a)) int_0^1 e^{xt} t^{a-1} (1-t)^{c-a-1} dt
// by tanh-sinh quadrature in 50-digit arithmetic. Returns ln M.
inline mp50 log_kummer_m_integral(double a, double c, double x) {
  const mp50 A{a};
  const mp50 C{c};
  const mp50 X{x};
  boost::math::quadrature::tanh_sinh<mp50> quad;
  // The second argument is the signed distance to the nearer endpoint.
  const auto f = [&](const mp50& t, const mp50& tc) {
    const mp50 one_minus = t < mp50{0.5} ? mp50{1 - t} : tc;
    if (t <= 0 || one_minus <= 0) return mp50{0};
    return mp50{boost::multiprecision::exp(X * t) * boost::multiprecision::pow(t, A - 1) *
                boost::multiprecision::pow(one_minus, C - A - 1)};
  };
  const mp50 integral = quad.integrate(f, mp50{0}, mp50{1});
  return boost::multiprecision::log(integral) + boost::math::lgamma(C) - boost::math::lgamma(A) -
         boost::math::lgamma(C - A);
}

inline double log_kummer_m(double a, double c, double x) {
  if (x >= 0) {
    return static_cast<double>(boost::multiprecision::log(kummer_m<mp50>(a, c, x)));
  }
  if (x < -300) return static_cast<double>(log_kummer_m_integral(a, c, x));
  return static_cast<double>(boost::multiprecision::log(kummer_m<mp_wide>(a, c, x)));
}

// g(a, c; x) = M'(a,c;x) / M(a,c;x) = (a/c) M(a+1, c+1, x) / M(a, c, x)
inline double g_ratio(double a, double c, double x) {
  if (x >= 0) {
    const mp50 num = kummer_m<mp50>(a + 1, c + 1, x);
    const mp50 den = kummer_m<mp50>(a, c, x);
    return static_cast<double>(mp50{a} / mp50{c} * num / den);
  }
  if (x < -300) {
    const mp50 log_ratio = log_kummer_m_integral(a + 1, c + 1, x) - log_kummer_m_integral(a, c, x);
    return static_cast<double>(mp50{a} / mp50{c} * boost::multiprecision::exp(log_ratio));
  }
  const mp_wide num = kummer_m<mp_wide>(a + 1, c + 1, x);
  const mp_wide den = kummer_m<mp_wide>(a, c, x);
  return static_cast<double>(mp_wide{a} / mp_wide{c} * num / den);
}

}  // namespace oracle
