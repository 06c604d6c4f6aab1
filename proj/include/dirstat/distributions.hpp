#pragma once

// Uniform, von Mises-Fisher and Watson distributions on the unit sphere:
// log densities and exact samplers.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "dirstat/error.hpp"
#include "dirstat/random.hpp"
#include "dirstat/specfun.hpp"
#include "dirstat/types.hpp"

namespace dirstat {

// ln(Gamma(p/2) / (2 pi^(p/2))), the log density of the uniform distribution
// with respect to surface measure on S^{p-1}.
inline double log_uniform_density(int p) {
  if (p < 2) throw domain_error("log_uniform_density: p must be >= 2");
  return specfun::detail::log_gamma(0.5 * p) - std::numbers::ln2 -
         0.5 * p * std::log(std::numbers::pi);
}

// ln c_p(kappa) = (p/2 - 1) ln kappa - (p/2) ln(2 pi) - ln I_{p/2-1}(kappa).
inline double log_vmf_normalizer(int p, double kappa) {
  if (p < 2) throw domain_error("vmf: p must be >= 2");
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw domain_error("vmf: kappa must be finite and >= 0");
  if (kappa == 0.0) return log_uniform_density(p);
  const double nu = 0.5 * p - 1.0;
  return nu * std::log(kappa) - 0.5 * p * std::log(2.0 * std::numbers::pi) -
         specfun::log_bessel_i(nu, kappa);
}

// ln d_p(kappa) = ln Gamma(p/2) - ln 2 - (p/2) ln pi - ln M(1/2, p/2, kappa).
inline double log_watson_normalizer(int p, double kappa) {
  if (p < 2) throw domain_error("watson: p must be >= 2");
  if (!std::isfinite(kappa)) throw domain_error("watson: kappa must be finite");
  return log_uniform_density(p) - specfun::log_kummer_m(0.5, 0.5 * p, kappa);
}

inline double vmf_log_pdf(const VmfParams& params, const Eigen::Ref<const Vector>& x) {
  if (x.size() != params.mu.dim()) throw data_error("vmf_log_pdf: dimension mismatch");
  if (!(params.kappa >= 0.0)) throw domain_error("vmf: kappa must be >= 0");
  const int p = static_cast<int>(x.size());
  if (params.kappa == 0.0) return log_uniform_density(p);
  return log_vmf_normalizer(p, params.kappa) + params.kappa * params.mu.coords().dot(x);
}

inline double vmf_log_pdf(const VmfParams& params, const UnitVector& x) {
  return vmf_log_pdf(params, x.coords());
}

inline double watson_log_pdf(const WatsonParams& params, const Eigen::Ref<const Vector>& x) {
  if (x.size() != params.mu.dim()) throw data_error("watson_log_pdf: dimension mismatch");
  const int p = static_cast<int>(x.size());
  const double t = params.mu.coords().dot(x);
  return log_watson_normalizer(p, params.kappa) + params.kappa * t * t;
}

inline double watson_log_pdf(const WatsonParams& params, const UnitVector& x) {
  return watson_log_pdf(params, x.coords());
}

inline Dataset sample_uniform(int p, Eigen::Index n, std::uint64_t seed) {
  if (p < 2) throw domain_error("sample_uniform: p must be >= 2");
  if (n < 1) throw domain_error("sample_uniform: n must be >= 1");
  Engine rng = stream(seed, stream_id::kSampler);
  Dataset out(n, p);
  for (Eigen::Index i = 0; i < n; ++i) out.row(i) = random_unit_vector(p, rng).transpose();
  return out;
}

namespace detail {

inline constexpr int kRejectionCap = 1'000'000;

// Reflection mapping e_1 onto mu, applied in place to y.
inline void reflect_north_pole_to(const Vector& mu, Eigen::Ref<Vector> y) {
  Vector h = -mu;
  h(0) += 1.0;
  const double hh = h.squaredNorm();
  if (hh < 1e-30) return;
  y -= (2.0 * h.dot(y) / hh) * h;
}

// Uniform unit vector orthogonal to mu.
inline Vector random_orthogonal_unit(const Vector& mu, Engine& rng) {
  std::normal_distribution<double> normal;
  Vector v(mu.size());
  for (;;) {
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
    v -= mu.dot(v) * mu;
    const double n = v.norm();
    if (n > 1e-8) return v / n;
  }
}

// Rejection envelope for u = (mu^T x)^2 under a Watson law. The target
// density is u^{-1/2} (1-u)^{(p-3)/2} e^{kappa u}; the envelope is
// Beta(1/2, beta) with beta <= (p-1)/2, so the ratio is
//   w(u) = (1-u)^m e^{kappa u},  m = (p-1)/2 - beta >= 0.
// For kappa > 0, beta is chosen to maximize the acceptance probability.
struct WatsonEnvelope {
  double beta;
  double m;
  double log_w_max;
};

inline double watson_log_w_max(double m, double kappa) {
  if (kappa > m) return m > 0.0 ? m * std::log(m / kappa) + kappa - m : kappa;
  return 0.0;
}

inline WatsonEnvelope watson_envelope(int p, double kappa) {
  const double full = 0.5 * (p - 1);
  if (kappa <= 0.0) return {full, 0.0, 0.0};
  // -log acceptance up to a constant: ln B(1/2, beta) + ln w_max(beta)
  const auto cost = [&](double log_beta) {
    const double beta = std::exp(log_beta);
    const double log_b = specfun::detail::log_gamma(beta) - specfun::detail::log_gamma(beta + 0.5);
    return log_b + watson_log_w_max(std::max(0.0, full - beta), kappa);
  };
  const double lo = std::log(full) - 40.0;
  const double hi = std::log(full);
  constexpr int kGrid = 128;
  int best = kGrid;
  double best_cost = cost(hi);
  for (int i = 0; i < kGrid; ++i) {
    const double c = cost(lo + (hi - lo) * i / kGrid);
    if (c < best_cost) {
      best_cost = c;
      best = i;
    }
  }
  double a = lo + (hi - lo) * std::max(0, best - 1) / kGrid;
  double b = lo + (hi - lo) * std::min(kGrid, best + 1) / kGrid;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 60; ++it) {
    const double x1 = b - phi * (b - a);
    const double x2 = a + phi * (b - a);
    if (cost(x1) < cost(x2)) {
      b = x2;
    } else {
      a = x1;
    }
  }
  const double beta = std::min(full, std::exp(0.5 * (a + b)));
  const double m = std::max(0.0, full - beta);
  return {beta, m, watson_log_w_max(m, kappa)};
}

}  // namespace detail

// Wood's rejection sampler: draw w = mu^T x from its marginal with a
// Beta((p-1)/2, (p-1)/2) proposal, attach a uniform tangent direction, then
// reflect the north pole onto mu.
inline Dataset sample_vmf(const VmfParams& params, Eigen::Index n, std::uint64_t seed) {
  const Eigen::Index p = params.mu.dim();
  const double kappa = params.kappa;
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw domain_error("sample_vmf: kappa must be finite and >= 0");
  if (n < 1) throw domain_error("sample_vmf: n must be >= 1");

  Engine rng = stream(seed, stream_id::kSampler);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double dim1 = static_cast<double>(p - 1);
  const double b = dim1 / (2.0 * kappa + std::sqrt(4.0 * kappa * kappa + dim1 * dim1));
  const double x0 = (1.0 - b) / (1.0 + b);
  const double c = kappa * x0 + dim1 * std::log1p(-x0 * x0);
  const Vector north = Vector::Unit(p, 0);

  Dataset out(n, p);
  Vector y(p);
  for (Eigen::Index i = 0; i < n; ++i) {
    double w = 0.0;
    double one_minus_w = 0.0;
    for (int attempt = 0;; ++attempt) {
      if (attempt >= detail::kRejectionCap) throw numerical_error("sample_vmf: rejection cap exceeded");
      const BetaDraw z = beta_draw(0.5 * dim1, 0.5 * dim1, rng);
      const double denom = 1.0 - (1.0 - b) * z.z;
      w = (1.0 - (1.0 + b) * z.z) / denom;
      one_minus_w = 2.0 * b * z.z / denom;
      const double u = unif(rng);
      if (kappa * w + dim1 * std::log1p(-x0 * w) - c >= std::log(u)) break;
    }
    const double radial = std::sqrt(std::max(0.0, one_minus_w * (1.0 + w)));
    const Vector v = detail::random_orthogonal_unit(north, rng);
    y = radial * v;
    y(0) = w;
    detail::reflect_north_pole_to(params.mu.coords(), y);
    out.row(i) = (y / y.norm()).transpose();
  }
  return out;
}

// Draws u = (mu^T x)^2 by rejection from a tuned Beta(1/2, beta) envelope,
// takes t = +-sqrt(u) with a fair sign and adds a uniform orthogonal part.
inline Dataset sample_watson(const WatsonParams& params, Eigen::Index n, std::uint64_t seed) {
  const Eigen::Index p = params.mu.dim();
  const double kappa = params.kappa;
  if (!std::isfinite(kappa)) throw domain_error("sample_watson: kappa must be finite");
  if (n < 1) throw domain_error("sample_watson: n must be >= 1");

  Engine rng = stream(seed, stream_id::kSampler);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const detail::WatsonEnvelope env = detail::watson_envelope(static_cast<int>(p), kappa);
  const Vector& mu = params.mu.coords();

  Dataset out(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    BetaDraw u{};
    for (int attempt = 0;; ++attempt) {
      if (attempt >= detail::kRejectionCap) throw numerical_error("sample_watson: rejection cap exceeded");
      u = beta_draw(0.5, env.beta, rng);
      const double log_w = (env.m > 0.0 ? env.m * std::log(u.one_minus_z) : 0.0) + kappa * u.z;
      if (std::log(unif(rng)) <= log_w - env.log_w_max) break;
    }
    const double t = (unif(rng) < 0.5 ? -1.0 : 1.0) * std::sqrt(u.z);
    const Vector v = detail::random_orthogonal_unit(mu, rng);
    Vector x = t * mu + std::sqrt(u.one_minus_z) * v;
    out.row(i) = (x / x.norm()).transpose();
  }
  return out;
}

}  // namespace dirstat
