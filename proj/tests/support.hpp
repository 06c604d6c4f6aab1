#pragma once

// Fixtures and independent reference algorithms shared by the tests.

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <vector>

#include "dirstat/dirstat.hpp"

namespace testing_support {

using dirstat::Dataset;
using dirstat::Matrix;
using dirstat::Vector;

// |got - want| <= tol * max(1, |want|): relative error, measured in absolute
// terms when the reference is close to zero.
inline bool close_scaled(double got, double want, double tol) {
  return std::abs(got - want) <= tol * std::max(1.0, std::abs(want));
}

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline double log_uniform(std::mt19937_64& g, double lo, double hi) {
  return std::exp(uniform(g, std::log(lo), std::log(hi)));
}

inline Vector random_direction(Eigen::Index p, std::mt19937_64& g) {
  std::normal_distribution<double> normal;
  Vector v(p);
  for (Eigen::Index i = 0; i < p; ++i) v(i) = normal(g);
  return v / v.norm();
}

// Haar-random orthogonal matrix from the QR factorization of a Gaussian matrix.
inline Matrix random_rotation(Eigen::Index p, std::mt19937_64& g) {
  std::normal_distribution<double> normal;
  Matrix a(p, p);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j) a(i, j) = normal(g);
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ();
  const Vector d = qr.matrixQR().diagonal();
  for (Eigen::Index j = 0; j < p; ++j)
    if (d(j) < 0) q.col(j) = -q.col(j);
  return q;
}

inline dirstat::MixtureModel random_model(dirstat::Family family, int p, int K, std::uint64_t seed,
                                          double kappa_lo = 5.0, double kappa_hi = 60.0) {
  auto g = rng(seed);
  dirstat::MixtureModel m{family, {}};
  std::vector<double> w(static_cast<std::size_t>(K));
  double total = 0.0;
  for (double& x : w) total += (x = uniform(g, 0.5, 1.5));
  for (int j = 0; j < K; ++j) {
    double kappa = uniform(g, kappa_lo, kappa_hi);
    if (family == dirstat::Family::watson && j % 3 == 2) kappa = -kappa;
    m.components.push_back({w[static_cast<std::size_t>(j)] / total,
                            dirstat::UnitVector(random_direction(p, g)), kappa});
  }
  double s = 0.0;
  for (auto& c : m.components) s += c.weight;
  m.components.back().weight += 1.0 - s;
  return m;
}

// Points scattered around +-axis_k on the circle (p = 2) or sphere (p = 3),
// half on each pole; labels are the axis index.
struct AxialSample {
  Dataset data;
  std::vector<int> labels;
};

inline AxialSample two_axis_data(int p, int per_axis, double spread, std::uint64_t seed) {
  auto g = rng(seed);
  std::vector<Vector> axes;
  if (p == 2) {
    axes.push_back(Vector{{1.0, 0.0}});
    const double t = 70.0 * std::numbers::pi / 180.0;
    axes.push_back(Vector{{std::cos(t), std::sin(t)}});
  } else {
    axes.push_back(Vector{{1.0, 0.0, 0.0}});
    const double t = 70.0 * std::numbers::pi / 180.0;
    axes.push_back(Vector{{std::cos(t), std::sin(t), 0.0}});
  }
  std::normal_distribution<double> normal(0.0, spread);
  AxialSample out{Dataset(2 * per_axis, p), {}};
  Eigen::Index row = 0;
  for (int k = 0; k < 2; ++k) {
    for (int i = 0; i < per_axis; ++i, ++row) {
      Vector x = (i % 2 == 0 ? 1.0 : -1.0) * axes[static_cast<std::size_t>(k)];
      for (Eigen::Index d = 0; d < p; ++d) x(d) += normal(g);
      out.data.row(row) = (x / x.norm()).transpose();
      out.labels.push_back(k);
    }
  }
  return out;
}

// Fraction of points whose predicted cluster's majority true class matches
// their own true class.
inline double purity(const std::vector<int>& truth, const std::vector<int>& pred) {
  std::map<int, std::map<int, int>> table;
  for (std::size_t i = 0; i < truth.size(); ++i) ++table[pred[i]][truth[i]];
  int hit = 0;
  for (const auto& [cluster, counts] : table) {
    int best = 0;
    for (const auto& [cls, n] : counts) best = std::max(best, n);
    hit += best;
  }
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

// Plain Lloyd k-means with Euclidean distance and free (off-sphere)
// centroids, best of several random initializations.
inline std::vector<int> euclidean_kmeans(const Dataset& data, int K, std::uint64_t seed, int restarts = 10) {
  auto g = rng(seed);
  const Eigen::Index n = data.rows();
  std::vector<int> best_labels;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    std::shuffle(idx.begin(), idx.end(), g);
    Matrix centers(K, data.cols());
    for (int k = 0; k < K; ++k) centers.row(k) = data.row(idx[static_cast<std::size_t>(k)]);
    std::vector<int> labels(static_cast<std::size_t>(n), -1);
    double cost = 0.0;
    for (int it = 0; it < 200; ++it) {
      bool changed = false;
      cost = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        int arg = 0;
        double dmin = std::numeric_limits<double>::infinity();
        for (int k = 0; k < K; ++k) {
          const double d = (data.row(i) - centers.row(k)).squaredNorm();
          if (d < dmin) {
            dmin = d;
            arg = k;
          }
        }
        cost += dmin;
        if (labels[static_cast<std::size_t>(i)] != arg) changed = true;
        labels[static_cast<std::size_t>(i)] = arg;
      }
      if (!changed) break;
      centers.setZero();
      std::vector<int> counts(static_cast<std::size_t>(K), 0);
      for (Eigen::Index i = 0; i < n; ++i) {
        centers.row(labels[static_cast<std::size_t>(i)]) += data.row(i);
        ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
      }
      for (int k = 0; k < K; ++k)
        if (counts[static_cast<std::size_t>(k)] > 0) centers.row(k) /= counts[static_cast<std::size_t>(k)];
    }
    if (cost < best_cost) {
      best_cost = cost;
      best_labels = labels;
    }
  }
  return best_labels;
}

// Pearson chi-square goodness-of-fit p-value for observed bin counts
// against bin probabilities.
inline double chi_square_pvalue(const std::vector<long>& observed, const std::vector<double>& probs) {
  long n = 0;
  for (long o : observed) n += o;
  double stat = 0.0;
  for (std::size_t b = 0; b < observed.size(); ++b) {
    const double e = probs[b] * static_cast<double>(n);
    stat += (static_cast<double>(observed[b]) - e) * (static_cast<double>(observed[b]) - e) / e;
  }
  boost::math::chi_squared dist(static_cast<double>(observed.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

// Simpson's rule on [a, b] with an even number of panels.
template <class F>
double simpson(F&& f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace testing_support
