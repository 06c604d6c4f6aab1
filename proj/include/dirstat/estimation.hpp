#pragma once

// Maximum-likelihood estimation for single von Mises-Fisher and Watson
// distributions, the concentration approximations, and the inverse problems
// A_p(kappa) = r and g(a, c; kappa) = r.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "dirstat/error.hpp"
#include "dirstat/linalg.hpp"
#include "dirstat/specfun.hpp"
#include "dirstat/types.hpp"

namespace dirstat {

enum class KappaMethod { banerjee, newton2, exact };

// Largest mean resultant length accepted before an estimate is declared
// unbounded.
inline constexpr double kMaxMeanResultant = 1.0 - 1e-12;

// ---- von Mises-Fisher ----------------------------------------------------

struct VmfSuffStats {
  Vector resultant;  // sum_i w_i x_i
  double weight = 0.0;

  Eigen::Index dim() const { return resultant.size(); }
  double mean_resultant_length() const {
    return std::min(1.0, resultant.norm() / weight);
  }
};

inline VmfSuffStats vmf_suff_stats(const Dataset& data, const Eigen::Ref<const Vector>& weights) {
  if (weights.size() != data.rows()) throw data_error("vmf_suff_stats: weight count does not match rows");
  if ((weights.array() < 0.0).any()) throw data_error("vmf_suff_stats: negative weight");
  const double total = weights.sum();
  if (!(total > 0.0)) throw data_error("vmf_suff_stats: total weight is zero");
  return {data.transpose() * weights, total};
}

inline VmfSuffStats vmf_suff_stats(const Dataset& data) {
  if (data.rows() < 1) throw data_error("vmf_suff_stats: empty dataset");
  return {data.colwise().sum().transpose(), static_cast<double>(data.rows())};
}

// kappa ~ r (p - r^2) / (1 - r^2); needs no Bessel evaluations.
inline double kappa_banerjee(double r_bar, int p) {
  if (p < 2) throw domain_error("kappa_banerjee: p must be >= 2");
  if (!(r_bar >= 0.0) || !(r_bar < 1.0)) throw domain_error("kappa_banerjee: r_bar must lie in [0, 1)");
  const double r2 = r_bar * r_bar;
  return r_bar * (p - r2) / (1.0 - r2);
}

// One Newton update on A_p(kappa) = r_bar.
inline double kappa_newton_step(double kappa, double r_bar, int p) {
  const double a = specfun::bessel_ratio(p, kappa);
  const double slope = 1.0 - a * a - (p - 1.0) / kappa * a;
  if (!(slope > 0.0)) return kappa;
  return kappa - (a - r_bar) / slope;
}

// Banerjee's estimate followed by `steps` Newton updates; never negative.
inline double kappa_newton(double r_bar, int p, int steps = 2) {
  if (!(r_bar > 0.0) || !(r_bar < 1.0)) throw domain_error("kappa_newton: r_bar must lie in (0, 1)");
  double kappa = kappa_banerjee(r_bar, p);
  for (int s = 0; s < steps; ++s) {
    kappa = kappa_newton_step(kappa, r_bar, p);
    if (!(kappa > 0.0)) return 0.0;
  }
  return kappa;
}

// Solves A_p(kappa) = r_bar to |A_p(kappa) - r_bar| <= tol with a safeguarded
// Newton iteration inside a geometrically grown bracket.
inline double ap_inverse(double r_bar, int p, double tol = 1e-12) {
  if (p < 2) throw domain_error("ap_inverse: p must be >= 2");
  if (!(r_bar >= 0.0) || !(r_bar < 1.0)) throw domain_error("ap_inverse: r_bar must lie in [0, 1)");
  if (!(tol > 0.0)) throw domain_error("ap_inverse: tol must be positive");
  if (r_bar == 0.0) return 0.0;

  double lo = 0.0;
  double hi = kappa_banerjee(r_bar, p) + 1.0;
  for (int grow = 0; specfun::bessel_ratio(p, hi) < r_bar; ++grow) {
    if (grow > 2000) throw numerical_error("ap_inverse: could not bracket the root");
    lo = hi;
    hi *= 2.0;
  }
  double x = std::clamp(kappa_banerjee(r_bar, p), lo, hi);
  if (x <= lo || x >= hi) x = 0.5 * (lo + hi);
  double best = x;
  double best_err = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 500; ++it) {
    const double a = specfun::bessel_ratio(p, x);
    const double f = a - r_bar;
    if (std::abs(f) < best_err) {
      best_err = std::abs(f);
      best = x;
    }
    if (std::abs(f) <= tol) return x;
    (f < 0.0 ? lo : hi) = x;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) return best;
    const double slope = 1.0 - a * a - (p - 1.0) / x * a;
    double next = x - f / slope;
    if (!(slope > 0.0) || !(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
    x = next;
  }
  throw numerical_error("ap_inverse: did not converge");
}

inline double estimate_vmf_kappa(double r_bar, int p, KappaMethod method) {
  switch (method) {
    case KappaMethod::banerjee:
      return std::max(0.0, kappa_banerjee(r_bar, p));
    case KappaMethod::newton2:
      return r_bar == 0.0 ? 0.0 : kappa_newton(r_bar, p, 2);
    case KappaMethod::exact:
      return ap_inverse(r_bar, p, 1e-13);
  }
  throw domain_error("unknown kappa method");
}

inline VmfParams vmf_mle(const Dataset& data, KappaMethod method = KappaMethod::newton2) {
  require_unit_rows(data);
  const VmfSuffStats stats = vmf_suff_stats(data);
  const double r_bar = stats.mean_resultant_length();
  if (!(r_bar > 1e-12)) throw data_error("vmf_mle: zero resultant, mean direction undefined");
  if (r_bar >= kMaxMeanResultant) throw data_error("vmf_mle: mean resultant length is 1, kappa unbounded");
  const int p = static_cast<int>(data.cols());
  return {UnitVector::normalized(stats.resultant), estimate_vmf_kappa(r_bar, p, method)};
}

// ---- Watson --------------------------------------------------------------

// Lower, middle and upper approximations to the root of g(a, c; kappa) = r.
struct BoundTriple {
  double lower;
  double mid;
  double upper;
};

inline void require_watson_r(double a, double c, double r, const char* what) {
  if (!(a > 0.0) || !(c > a) || !std::isfinite(c)) {
    throw domain_error(std::string(what) + ": parameters must satisfy c > a > 0");
  }
  if (!(r > 0.0) || !(r < 1.0)) throw domain_error(std::string(what) + ": r must lie in (0, 1)");
}

inline BoundTriple watson_bounds(double a, double c, double r) {
  require_watson_r(a, c, r, "watson_bounds");
  if (r == a / c) return {0.0, 0.0, 0.0};
  const double base = (r * c - a) / (r * (1.0 - r));
  const double lower = base * (1.0 + (1.0 - r) / (c - a));
  const double mid =
      0.5 * base * (1.0 + std::sqrt(1.0 + 4.0 * (c + 1.0) * r * (1.0 - r) / (a * (c - a))));
  const double upper = base * (1.0 + r / a);
  return {lower, mid, upper};
}

// Earlier continued-fraction heuristic, kept for benchmarking.
inline double kappa_bbg(double a, double c, double r) {
  require_watson_r(a, c, r, "kappa_bbg");
  return (c * r - a) / (r * (1.0 - r)) + r / (2.0 * c * (1.0 - r));
}

// Root of g(a, c; kappa) = r, bracketed by [L(r), U(r)] and refined by
// bisection-safeguarded Newton steps with a central-difference slope.
inline double g_inverse(double a, double c, double r, double tol = 1e-12) {
  require_watson_r(a, c, r, "g_inverse");
  if (!(tol > 0.0)) throw domain_error("g_inverse: tol must be positive");
  if (r == a / c) return 0.0;

  const BoundTriple bounds = watson_bounds(a, c, r);
  double lo = bounds.lower;
  double hi = bounds.upper;
  // Near r = 1, g(a, c; k) is within a few ulps of 1 and cannot separate
  // nearby k; there the residual is computed from the complement
  // 1 - g(a, c; k) = g(c - a, c; -k) (Kummer's transformation), which keeps
  // full relative accuracy. Both forms increase with k.
  const bool complement = r > 0.5 && r > a / c;
  const double one_minus_r = 1.0 - r;
  const auto f = [&](double k) {
    return complement ? one_minus_r - specfun::g_ratio(c - a, c, -k) : specfun::g_ratio(a, c, k) - r;
  };
  const double f_lo = f(lo);
  const double f_hi = f(hi);
  // An endpoint on the wrong side by no more than tol is rounding noise in g
  // (it happens when kappa is so large that g is within a few ulps of 0 or 1).
  if (f_lo >= 0.0 && f_lo <= tol) return lo;
  if (f_hi <= 0.0 && -f_hi <= tol) return hi;
  if (f_lo > 0.0 || f_hi < 0.0) {
    throw numerical_error("g_inverse: root not inside [L(r), U(r)] (a=" + std::to_string(a) +
                          ", c=" + std::to_string(c) + ", r=" + std::to_string(r) + ")");
  }

  // g flattens out as |kappa| grows, so a small residual alone can leave
  // kappa far from the root (near r = 1 the residual at L(r) is already
  // below 1e-12). Accept a point only once the Newton correction has also
  // shrunk to rounding level.
  double x = bounds.mid;
  if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
  double best = x;
  double best_err = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 500; ++it) {
    const double fx = f(x);
    if (std::abs(fx) < best_err) {
      best_err = std::abs(fx);
      best = x;
    }
    if (fx == 0.0) return x;
    (fx < 0.0 ? lo : hi) = x;
    const double h = std::max(1e-6, 1e-6 * std::abs(x));
    const double slope = (f(x + h) - f(x - h)) / (2.0 * h);
    const double step = fx / slope;
    const double settled = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x));
    if (std::abs(fx) <= tol && slope > 0.0 && std::abs(step) <= settled) return x;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi))) {
      return best;
    }
    double next = x - step;
    if (!(slope > 0.0) || !(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
    x = next;
  }
  throw numerical_error("g_inverse: did not converge");
}

// Accepted range of r = mu^T S mu before solving for a Watson kappa; the
// endpoints correspond to infinite concentration.
inline constexpr double kWatsonRMin = 1e-8;
inline constexpr double kWatsonRMax = 1.0 - 1e-8;
inline constexpr double kSpectralGapTol = 1e-12;

struct WatsonFit {
  WatsonParams params;
  double r = 0.0;            // mu^T S mu for the chosen axis
  bool degenerate = false;   // the chosen eigenvalue is not simple
};

// Per-unit-weight Watson log-likelihood up to a constant: kappa r - ln M(1/2, p/2, kappa).
inline double watson_profile_loglik(int p, double kappa, double r) {
  return kappa * r - specfun::log_kummer_m(0.5, 0.5 * p, kappa);
}

// Maximizes the Watson likelihood given a (weighted) scatter matrix. Both
// candidates, the top axis with kappa >= 0 and the bottom axis with
// kappa <= 0, are solved and the one with the higher likelihood is kept.
// With fixed_kappa the axis is chosen by its sign and kappa is not estimated.
inline WatsonFit watson_fit_scatter(const ScatterMatrix& scatter, std::optional<double> fixed_kappa = std::nullopt) {
  const SymmetricEigen eig = symmetric_eigs(scatter);
  const Eigen::Index p = eig.values.size();
  if (p < 2) throw data_error("watson fit: dimension must be >= 2");
  const double a = 0.5;
  const double c = 0.5 * static_cast<double>(p);
  const auto clamp_r = [](double r) { return std::clamp(r, kWatsonRMin, kWatsonRMax); };
  const double top_gap = eig.values(0) - eig.values(1);
  const double bottom_gap = eig.values(p - 2) - eig.values(p - 1);

  if (fixed_kappa) {
    const bool positive = *fixed_kappa >= 0.0;
    const Eigen::Index k = positive ? 0 : p - 1;
    return {{UnitVector::normalized(eig.vectors.col(k)), *fixed_kappa},
            eig.values(k),
            (positive ? top_gap : bottom_gap) <= kSpectralGapTol};
  }

  const double r_top = clamp_r(eig.values(0));
  const double r_bottom = clamp_r(eig.values(p - 1));
  const double k_top = r_top == a / c ? 0.0 : g_inverse(a, c, r_top);
  const double k_bottom = r_bottom == a / c ? 0.0 : g_inverse(a, c, r_bottom);
  const int pi = static_cast<int>(p);
  const double ll_top = watson_profile_loglik(pi, k_top, eig.values(0));
  const double ll_bottom = watson_profile_loglik(pi, k_bottom, eig.values(p - 1));
  if (ll_top >= ll_bottom) {
    return {{UnitVector::normalized(eig.vectors.col(0)), k_top}, eig.values(0), top_gap <= kSpectralGapTol};
  }
  return {{UnitVector::normalized(eig.vectors.col(p - 1)), k_bottom},
          eig.values(p - 1),
          bottom_gap <= kSpectralGapTol};
}

inline WatsonFit watson_mle(const Dataset& data) {
  require_unit_rows(data);
  return watson_fit_scatter(scatter(data));
}

}  // namespace dirstat
