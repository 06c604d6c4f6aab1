#pragma once

// Spherical k-means and diametrical k-means: the hard-assignment limits of
// vMF and Watson mixtures as the shared concentration grows without bound.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "dirstat/error.hpp"
#include "dirstat/linalg.hpp"
#include "dirstat/parallel.hpp"
#include "dirstat/random.hpp"
#include "dirstat/types.hpp"

namespace dirstat {

using Labels = std::vector<int>;

inline void require_labels(const Labels& labels, Eigen::Index n, int K, const char* what) {
  if (static_cast<Eigen::Index>(labels.size()) != n) {
    throw data_error(std::string(what) + ": label count does not match rows");
  }
  for (int l : labels) {
    if (l < 0 || l >= K) throw data_error(std::string(what) + ": label outside [0, K)");
  }
}

inline Matrix one_hot(const Labels& labels, int K) {
  Matrix beta = Matrix::Zero(static_cast<Eigen::Index>(labels.size()), K);
  for (std::size_t i = 0; i < labels.size(); ++i) beta(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
  return beta;
}

// Column j is sum_i beta(i, j) x_i. Shared by the vMF M-step and the
// spherical k-means centroid update so both round identically.
inline Matrix weighted_resultants(const Dataset& data, const Matrix& beta) {
  return data.transpose() * beta;
}

// Top eigenvector of the beta-weighted scatter of the rows. Shared by the
// Watson M-step (kappa > 0) and the diametrical centroid update.
inline Vector top_scatter_axis(const Dataset& data, const Eigen::Ref<const Vector>& weights) {
  return symmetric_eigs(weighted_scatter(data, weights)).vectors.col(0);
}

// Row-wise argmax with ties going to the lowest column.
inline Labels argmax_rows(const Matrix& scores) {
  Labels labels(static_cast<std::size_t>(scores.rows()));
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    int best = 0;
    for (Eigen::Index j = 1; j < scores.cols(); ++j) {
      if (scores(i, j) > scores(i, best)) best = static_cast<int>(j);
    }
    labels[static_cast<std::size_t>(i)] = best;
  }
  return labels;
}

// Empty-cluster rescue: each empty cluster, in increasing index order,
// receives the point whose best score is lowest among points whose current
// cluster has more than one member (ties to the lowest row). Returns the
// number of points moved.
inline int rescue_empty_clusters(Labels& labels, const Eigen::Ref<const Vector>& best_score, int K) {
  std::vector<Eigen::Index> counts(static_cast<std::size_t>(K), 0);
  for (int l : labels) ++counts[static_cast<std::size_t>(l)];
  int moved = 0;
  for (int j = 0; j < K; ++j) {
    if (counts[static_cast<std::size_t>(j)] > 0) continue;
    std::ptrdiff_t pick = -1;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (counts[static_cast<std::size_t>(labels[i])] <= 1) continue;
      const auto ii = static_cast<Eigen::Index>(i);
      if (pick < 0 || best_score(ii) < best_score(pick)) pick = static_cast<std::ptrdiff_t>(i);
    }
    if (pick < 0) throw data_error("cluster rescue: fewer points than clusters");
    --counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(pick)])];
    labels[static_cast<std::size_t>(pick)] = j;
    ++counts[static_cast<std::size_t>(j)];
    ++moved;
  }
  return moved;
}

struct PartitionOptions {
  std::uint64_t seed = 0;
  int max_iters = 100;
  // Stop early when the relative objective gain falls below tol; 0 means
  // run to a label fixpoint.
  double tol = 0.0;
  int threads = 0;
  // Independent seedings; the run with the highest final objective wins.
  int restarts = 1;
  std::optional<Labels> initial_labels{};  // skips seeding and restarts
  bool record_labels = false;
};

struct Partition {
  Labels labels;
  std::vector<UnitVector> centroids;
  double objective = 0.0;
  std::vector<double> objective_trace;
  std::vector<Labels> label_trace;  // labels after each assignment step, if recorded
  int iterations = 0;
  bool converged = false;
};

namespace detail {

// Similarity of every row to every centroid: x^T mu or (x^T mu)^2.
inline Matrix centroid_scores(const Dataset& data, const std::vector<Vector>& centroids, bool axial, int threads) {
  const auto K = static_cast<Eigen::Index>(centroids.size());
  Matrix scores(data.rows(), K);
  parallel_for(data.rows(), threads, [&](std::ptrdiff_t begin, std::ptrdiff_t end) {
    for (std::ptrdiff_t i = begin; i < end; ++i) {
      for (Eigen::Index j = 0; j < K; ++j) {
        const double t = data.row(i).dot(centroids[static_cast<std::size_t>(j)].transpose());
        scores(i, j) = axial ? t * t : t;
      }
    }
  });
  return scores;
}

inline double similarity_distance(double t, bool axial) { return std::max(0.0, 1.0 - (axial ? t * t : t)); }

// Greedy k-means++ seeding with distance 1 - similarity: each new centroid
// is the best of a few distance-weighted candidates, judged by the total
// distance that remains after adding it.
inline std::vector<Vector> seed_centroids(const Dataset& data, int K, bool axial, std::uint64_t seed) {
  const Eigen::Index n = data.rows();
  const int candidates = 2 + static_cast<int>(std::log(static_cast<double>(K)));
  Engine rng = stream(seed, stream_id::kMeans);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Vector> centroids;
  centroids.emplace_back(data.row(std::uniform_int_distribution<Eigen::Index>(0, n - 1)(rng)).transpose());
  Vector dist(n);
  for (Eigen::Index i = 0; i < n; ++i) dist(i) = similarity_distance(data.row(i).dot(centroids[0].transpose()), axial);

  Vector trial(n);
  Vector best_dist(n);
  while (static_cast<int>(centroids.size()) < K) {
    const double total = dist.sum();
    Eigen::Index best = -1;
    double best_total = std::numeric_limits<double>::infinity();
    for (int c = 0; c < candidates; ++c) {
      Eigen::Index pick = -1;
      if (total > 0.0) {
        double target = unif(rng) * total;
        for (Eigen::Index i = 0; i < n; ++i) {
          if (dist(i) <= 0.0) continue;
          pick = i;
          target -= dist(i);
          if (target < 0.0) break;
        }
      } else {
        // Every point coincides with a centroid; fall back to a uniform draw.
        pick = std::uniform_int_distribution<Eigen::Index>(0, n - 1)(rng);
      }
      for (Eigen::Index i = 0; i < n; ++i) {
        trial(i) = std::min(dist(i), similarity_distance(data.row(i).dot(data.row(pick)), axial));
      }
      const double trial_total = trial.sum();
      if (trial_total < best_total) {
        best_total = trial_total;
        best = pick;
        best_dist = trial;
      }
    }
    centroids.emplace_back(data.row(best).transpose());
    dist = best_dist;
  }
  return centroids;
}

inline std::vector<Vector> update_centroids(const Dataset& data, const Labels& labels, int K, bool axial) {
  const Matrix beta = one_hot(labels, K);
  std::vector<Vector> centroids;
  centroids.reserve(static_cast<std::size_t>(K));
  if (!axial) {
    const Matrix r = weighted_resultants(data, beta);
    for (int j = 0; j < K; ++j) {
      const double norm = r.col(j).norm();
      // A cluster whose members cancel keeps a deterministic direction: its first member.
      if (norm > 0.0) {
        centroids.push_back(UnitVector::normalized(r.col(j)).coords());
      } else {
        const auto it = std::find(labels.begin(), labels.end(), j);
        centroids.emplace_back(data.row(it - labels.begin()).transpose());
      }
    }
  } else {
    for (int j = 0; j < K; ++j) centroids.push_back(UnitVector::normalized(top_scatter_axis(data, beta.col(j))).coords());
  }
  return centroids;
}

// Alternates centroid updates and assignments from a starting partition
// until the labels stop changing (or the gain drops below tol).
inline Partition refine_partition(const Dataset& data, int K, Labels labels, const PartitionOptions& opts, bool axial) {
  const Eigen::Index n = data.rows();
  Partition out;
  if (opts.record_labels) out.label_trace.push_back(labels);
  std::vector<Vector> centroids;
  for (int it = 1; it <= opts.max_iters; ++it) {
    centroids = update_centroids(data, labels, K, axial);
    const Matrix scores = centroid_scores(data, centroids, axial, opts.threads);
    Labels next = argmax_rows(scores);
    rescue_empty_clusters(next, scores.rowwise().maxCoeff(), K);
    double objective = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) objective += scores(i, next[static_cast<std::size_t>(i)]);
    out.iterations = it;
    if (opts.record_labels) out.label_trace.push_back(next);
    const bool fixpoint = next == labels;
    const bool small_gain = opts.tol > 0.0 && !out.objective_trace.empty() &&
                            std::abs(objective - out.objective_trace.back()) <
                                opts.tol * (std::abs(out.objective_trace.back()) + 1.0);
    out.objective_trace.push_back(objective);
    labels = std::move(next);
    if (fixpoint || small_gain) {
      out.converged = true;
      break;
    }
  }
  out.labels = std::move(labels);
  out.objective = out.objective_trace.back();
  out.centroids.reserve(centroids.size());
  for (const Vector& c : centroids) out.centroids.push_back(UnitVector::normalized(c));
  return out;
}

inline Partition run_partitional(const Dataset& data, int K, const PartitionOptions& opts, bool axial) {
  require_unit_rows(data);
  const Eigen::Index n = data.rows();
  if (K < 1) throw domain_error("k must be >= 1");
  if (n < K) throw data_error("need at least k rows");
  if (opts.max_iters < 1) throw domain_error("max_iters must be >= 1");
  if (opts.restarts < 1) throw domain_error("restarts must be >= 1");

  if (opts.initial_labels) {
    require_labels(*opts.initial_labels, n, K, "initial labels");
    return refine_partition(data, K, *opts.initial_labels, opts, axial);
  }
  std::optional<Partition> best{};
  for (int r = 0; r < opts.restarts; ++r) {
    const std::uint64_t seed = r == 0 ? opts.seed : stream(opts.seed, stream_id::kRestartBase + r)();
    const Matrix scores = centroid_scores(data, seed_centroids(data, K, axial, seed), axial, opts.threads);
    Labels labels = argmax_rows(scores);
    rescue_empty_clusters(labels, scores.rowwise().maxCoeff(), K);
    Partition run = refine_partition(data, K, std::move(labels), opts, axial);
    if (!best || run.objective > best->objective) best = std::move(run);
  }
  return std::move(*best);
}

}  // namespace detail

inline Partition spkmeans(const Dataset& data, int K, const PartitionOptions& opts = {}) {
  return detail::run_partitional(data, K, opts, false);
}

// Centroids are axes; their sign carries no meaning.
inline Partition diametrical_kmeans(const Dataset& data, int K, const PartitionOptions& opts = {}) {
  return detail::run_partitional(data, K, opts, true);
}

}  // namespace dirstat
