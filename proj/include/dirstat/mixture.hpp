#pragma once

// Finite mixtures of von Mises-Fisher (movMF) or Watson (moW) components,
// fitted by EM with soft or hard assignments.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dirstat/distributions.hpp"
#include "dirstat/error.hpp"
#include "dirstat/estimation.hpp"
#include "dirstat/linalg.hpp"
#include "dirstat/parallel.hpp"
#include "dirstat/partitional.hpp"
#include "dirstat/random.hpp"
#include "dirstat/types.hpp"

namespace dirstat {

enum class Family { vmf, watson };
enum class AssignMode { soft, hard };
enum class InitStrategy { spkmeans, diametrical, random };

struct Component {
  double weight;
  UnitVector mu;
  double kappa;
};

struct MixtureModel {
  Family family;
  std::vector<Component> components;

  int size() const { return static_cast<int>(components.size()); }
  Eigen::Index dim() const { return components.front().mu.dim(); }
};

inline constexpr double kWeightSumTolerance = 1e-12;

inline void validate(const MixtureModel& model) {
  if (model.components.empty()) throw domain_error("mixture: need at least one component");
  double total = 0.0;
  for (const Component& c : model.components) {
    if (c.mu.dim() != model.dim()) throw domain_error("mixture: component dimensions differ");
    if (!(c.weight >= 0.0) || !std::isfinite(c.weight)) throw domain_error("mixture: weights must be >= 0");
    if (!std::isfinite(c.kappa)) throw domain_error("mixture: kappa must be finite");
    if (model.family == Family::vmf && c.kappa < 0.0) throw domain_error("mixture: vMF kappa must be >= 0");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > kWeightSumTolerance) {
    throw domain_error("mixture: weights sum to " + std::to_string(total) + ", not 1");
  }
}

// beta(i, j) is the posterior probability that row i came from component j.
struct Responsibilities {
  Matrix beta;
};

namespace detail {

inline double log_component_normalizer(Family family, int p, double kappa) {
  return family == Family::vmf ? log_vmf_normalizer(p, kappa) : log_watson_normalizer(p, kappa);
}

// Per-point, per-component terms split as
//   ln pi_j + ln p(x_i | j) = log_const(j) + kappa_term(i, j),
// where kappa_term is kappa_j x^T mu_j (vMF) or kappa_j (x^T mu_j)^2 (Watson).
struct ComponentTerms {
  Vector log_const;
  Matrix kappa_term;
};

inline ComponentTerms component_terms(const MixtureModel& model, const Dataset& data, int threads) {
  validate(model);
  if (data.cols() != model.dim()) throw data_error("mixture: data dimension does not match the model");
  const int K = model.size();
  const int p = static_cast<int>(data.cols());
  ComponentTerms t{Vector(K), Matrix(data.rows(), K)};
  for (int j = 0; j < K; ++j) {
    const Component& c = model.components[static_cast<std::size_t>(j)];
    t.log_const(j) = std::log(c.weight) + log_component_normalizer(model.family, p, c.kappa);
  }
  const bool axial = model.family == Family::watson;
  parallel_for(data.rows(), threads, [&](std::ptrdiff_t begin, std::ptrdiff_t end) {
    for (std::ptrdiff_t i = begin; i < end; ++i) {
      for (int j = 0; j < K; ++j) {
        const Component& c = model.components[static_cast<std::size_t>(j)];
        const double dot = data.row(i).dot(c.mu.coords().transpose());
        t.kappa_term(i, j) = c.kappa * (axial ? dot * dot : dot);
      }
    }
  });
  return t;
}

struct EStep {
  Responsibilities resp;
  double log_likelihood = 0.0;
  Labels labels;     // hard mode only
  Vector best_score; // hard mode only: the winning score per row
};

inline EStep e_step(const MixtureModel& model, const Dataset& data, AssignMode mode, int threads) {
  const ComponentTerms t = component_terms(model, data, threads);
  const Eigen::Index n = data.rows();
  const int K = model.size();
  EStep out{{Matrix(n, K)}, 0.0, {}, {}};
  Vector row_ll(n);
  parallel_for(n, threads, [&](std::ptrdiff_t begin, std::ptrdiff_t end) {
    Vector terms(K);
    for (std::ptrdiff_t i = begin; i < end; ++i) {
      for (int j = 0; j < K; ++j) terms(j) = t.log_const(j) + t.kappa_term(i, j);
      if (terms.hasNaN()) throw numerical_error("e-step: non-finite log density at row " + std::to_string(i));
      const double m = terms.maxCoeff();
      if (m == -std::numeric_limits<double>::infinity()) {
        throw data_error("e-step: row " + std::to_string(i) + " has zero density under every component");
      }
      const Vector e = (terms.array() - m).exp().matrix();
      const double s = e.sum();
      row_ll(i) = m + std::log(s);
      out.resp.beta.row(i) = (e / s).transpose();
    }
  });
  out.log_likelihood = row_ll.sum();

  if (mode == AssignMode::hard) {
    // Scores relative to the largest finite constant, so components that
    // share pi and kappa compare on kappa * similarity alone.
    const double ref = t.log_const.maxCoeff();
    Matrix scores = t.kappa_term;
    for (int j = 0; j < K; ++j) scores.col(j).array() += t.log_const(j) - ref;
    out.labels = argmax_rows(scores);
    out.best_score = scores.rowwise().maxCoeff();
    out.resp.beta = one_hot(out.labels, K);
  }
  return out;
}

}  // namespace detail

// sum_i ln sum_j pi_j p(x_i | mu_j, kappa_j), by log-sum-exp over components.
inline double mixture_log_likelihood(const MixtureModel& model, const Dataset& data, int threads = 0) {
  return detail::e_step(model, data, AssignMode::soft, threads).log_likelihood;
}

inline Responsibilities e_step_soft(const MixtureModel& model, const Dataset& data, int threads = 0) {
  return std::move(detail::e_step(model, data, AssignMode::soft, threads).resp);
}

// One-hot rows: the component maximizing ln pi_j + ln p(x_i | j), lowest index on ties.
inline Responsibilities e_step_hard(const MixtureModel& model, const Dataset& data, int threads = 0) {
  return std::move(detail::e_step(model, data, AssignMode::hard, threads).resp);
}

inline Labels assign_labels(const MixtureModel& model, const Dataset& data, int threads = 0) {
  return detail::e_step(model, data, AssignMode::hard, threads).labels;
}

struct MStepOptions {
  KappaMethod kappa_method = KappaMethod::newton2;
  std::optional<double> fixed_kappa{};  // shared by every component when set
  bool equal_weights = false;         // keep pi_j = 1/K
};

// Mean resultant length ceiling inside mixtures; keeps singleton clusters
// from sending kappa to infinity.
inline constexpr double kMixtureMaxMeanResultant = 1.0 - 1e-8;
// Column mass below which a component counts as empty.
inline constexpr double kEmptyComponentWeight = 1e-10;

namespace detail {

inline double dataset_kappa(Family family, const Dataset& data, const MStepOptions& opts) {
  if (opts.fixed_kappa) return *opts.fixed_kappa;
  if (family == Family::watson) return watson_fit_scatter(scatter(data)).params.kappa;
  const double r_bar = std::min(vmf_suff_stats(data).mean_resultant_length(), kMixtureMaxMeanResultant);
  if (r_bar <= 1e-12) return 0.0;
  return estimate_vmf_kappa(r_bar, static_cast<int>(data.cols()), opts.kappa_method);
}

}  // namespace detail

// Weighted maximum-likelihood update of every component. A component whose
// column mass is (numerically) zero, or whose vMF resultant vanishes, is
// reseeded: mean at the least-claimed point, kappa at the whole-data
// estimate, weight 1/n taken proportionally from the others.
inline MixtureModel m_step(Family family, const Dataset& data, const Responsibilities& resp,
                           const MStepOptions& opts = {}) {
  const Matrix& beta = resp.beta;
  const Eigen::Index n = data.rows();
  const int K = static_cast<int>(beta.cols());
  const int p = static_cast<int>(data.cols());
  if (beta.rows() != n) throw data_error("m-step: responsibilities do not match rows");
  if (K < 1) throw domain_error("m-step: need at least one component");
  if (opts.fixed_kappa && (!std::isfinite(*opts.fixed_kappa) || (family == Family::vmf && *opts.fixed_kappa < 0.0))) {
    throw domain_error("m-step: invalid fixed kappa");
  }

  const Vector mass = beta.colwise().sum().transpose();
  const Matrix resultants = family == Family::vmf ? weighted_resultants(data, beta) : Matrix();
  std::vector<std::optional<Component>> fitted(static_cast<std::size_t>(K));
  for (int j = 0; j < K; ++j) {
    if (!(mass(j) > kEmptyComponentWeight)) continue;
    if (family == Family::vmf) {
      const double norm = resultants.col(j).norm();
      if (!(norm > 1e-12 * mass(j))) continue;
      const double r_bar = std::min(norm / mass(j), kMixtureMaxMeanResultant);
      const double kappa = opts.fixed_kappa ? *opts.fixed_kappa : estimate_vmf_kappa(r_bar, p, opts.kappa_method);
      fitted[static_cast<std::size_t>(j)] = Component{mass(j) / static_cast<double>(n),
                                                      UnitVector::normalized(resultants.col(j)), kappa};
    } else {
      const WatsonFit fit = watson_fit_scatter(weighted_scatter(data, beta.col(j)), opts.fixed_kappa);
      fitted[static_cast<std::size_t>(j)] = Component{mass(j) / static_cast<double>(n), fit.params.mu, fit.params.kappa};
    }
  }

  const auto rescued = static_cast<int>(std::count(fitted.begin(), fitted.end(), std::nullopt));
  if (rescued > 0) {
    // Least-claimed points first, lowest row on ties.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    const Vector claim = beta.rowwise().maxCoeff();
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return claim(a) < claim(b); });
    const double kappa = detail::dataset_kappa(family, data, opts);
    const double kept = 1.0 - static_cast<double>(rescued) / static_cast<double>(n);
    double kept_mass = 0.0;
    for (const auto& c : fitted) kept_mass += c ? c->weight : 0.0;
    std::size_t next = 0;
    for (auto& c : fitted) {
      if (c) {
        c->weight = kept_mass > 0.0 ? c->weight * kept / kept_mass : 0.0;
      } else {
        c = Component{1.0 / static_cast<double>(n), UnitVector::normalized(data.row(order[next++]).transpose()), kappa};
      }
    }
  }

  MixtureModel model{family, {}};
  model.components.reserve(static_cast<std::size_t>(K));
  double total = 0.0;
  for (const auto& c : fitted) total += c->weight;
  for (auto& c : fitted) {
    c->weight = opts.equal_weights ? 1.0 / K : c->weight / total;
    model.components.push_back(std::move(*c));
  }
  return model;
}

inline constexpr int kInitRestarts = 10;

// Hard initial partition: spherical or diametrical k-means, or a balanced
// random assignment. Never leaves a cluster empty.
inline Labels init_assignments(const Dataset& data, int K, InitStrategy strategy, std::uint64_t seed, int threads = 0) {
  const Eigen::Index n = data.rows();
  if (K < 1) throw domain_error("init: k must be >= 1");
  if (n < K) throw data_error("init: need at least k rows");
  for (int attempt = 0; attempt < 16; ++attempt) {
    const std::uint64_t s = attempt == 0 ? seed : stream(seed, stream_id::kReseedBase + attempt)();
    Labels labels;
    switch (strategy) {
      case InitStrategy::spkmeans:
        labels = spkmeans(data, K, {s, 100, 0.0, threads, kInitRestarts, std::nullopt, false}).labels;
        break;
      case InitStrategy::diametrical:
        labels = diametrical_kmeans(data, K, {s, 100, 0.0, threads, kInitRestarts, std::nullopt, false}).labels;
        break;
      case InitStrategy::random: {
        labels.resize(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = static_cast<int>(i % K);
        Engine rng = stream(s, stream_id::kLabels);
        std::shuffle(labels.begin(), labels.end(), rng);
        break;
      }
    }
    std::vector<bool> seen(static_cast<std::size_t>(K), false);
    for (int l : labels) seen[static_cast<std::size_t>(l)] = true;
    if (std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) return labels;
  }
  throw numerical_error("init: could not produce a partition without empty clusters");
}

struct EmConfig {
  AssignMode assignment = AssignMode::soft;
  KappaMethod kappa_method = KappaMethod::newton2;
  int max_iters = 200;
  // Stop when |l_t - l_{t-1}| / (|l_{t-1}| + 1) < rel_tol.
  double rel_tol = 1e-6;
  std::uint64_t seed = 0;
  // Defaults to spkmeans for vMF and diametrical for Watson.
  std::optional<InitStrategy> init{};
  std::optional<Labels> initial_labels{};  // overrides init
  std::optional<double> fixed_kappa{};
  bool equal_weights = false;
  int threads = 0;
  bool record_labels = false;  // hard mode: keep the labels of every E-step
};

struct FitReport {
  // Log-likelihood of the model entering each E-step; the last entry belongs
  // to final_model.
  std::vector<double> log_likelihood_trace;
  int iterations = 0;
  bool converged = false;
  MixtureModel final_model;
  std::vector<Labels> label_trace;  // initial partition, then one per hard E-step
};

inline InitStrategy default_init(Family family) {
  return family == Family::vmf ? InitStrategy::spkmeans : InitStrategy::diametrical;
}

inline FitReport fit_em(Family family, const Dataset& data, int K, const EmConfig& config = {}) {
  require_unit_rows(data);
  const Eigen::Index n = data.rows();
  if (K < 1) throw domain_error("fit_em: k must be >= 1");
  if (n < K) throw data_error("fit_em: need at least k rows");
  if (config.max_iters < 1) throw domain_error("fit_em: max_iters must be >= 1");
  if (!(config.rel_tol >= 0.0)) throw domain_error("fit_em: rel_tol must be >= 0");
  const bool hard = config.assignment == AssignMode::hard;

  Labels labels;
  if (config.initial_labels) {
    require_labels(*config.initial_labels, n, K, "fit_em");
    labels = *config.initial_labels;
  } else {
    labels = init_assignments(data, K, config.init.value_or(default_init(family)), config.seed, config.threads);
  }
  const MStepOptions mopts{config.kappa_method, config.fixed_kappa, config.equal_weights};
  std::vector<double> trace;
  std::vector<Labels> label_trace;
  if (hard && config.record_labels) label_trace.push_back(labels);

  MixtureModel model = m_step(family, data, {one_hot(labels, K)}, mopts);
  int iterations = 0;
  bool converged = false;
  for (int it = 1; it <= config.max_iters; ++it) {
    detail::EStep e = detail::e_step(model, data, config.assignment, config.threads);
    if (!std::isfinite(e.log_likelihood)) {
      throw numerical_error("fit_em: non-finite log-likelihood at iteration " + std::to_string(it));
    }
    iterations = it;
    const bool small_gain = !trace.empty() && std::abs(e.log_likelihood - trace.back()) <
                                                  config.rel_tol * (std::abs(trace.back()) + 1.0);
    trace.push_back(e.log_likelihood);
    bool fixpoint = false;
    if (hard) {
      rescue_empty_clusters(e.labels, e.best_score, K);
      e.resp.beta = one_hot(e.labels, K);
      if (config.record_labels) label_trace.push_back(e.labels);
      fixpoint = e.labels == labels;
      labels = std::move(e.labels);
    }
    if (fixpoint || small_gain) {
      converged = true;
      break;
    }
    if (it == config.max_iters) break;
    model = m_step(family, data, e.resp, mopts);
  }
  return {std::move(trace), iterations, converged, std::move(model), std::move(label_trace)};
}

// ---- evaluation against a known model -----------------------------------

// Greedy matching by |mu^T mu_hat|: repeatedly pair the closest unmatched
// (true, fitted) components. match[j] is the fitted index for true j, or -1.
inline std::vector<int> match_components(const MixtureModel& truth, const MixtureModel& fitted) {
  const int kt = truth.size();
  const int kf = fitted.size();
  Matrix sim(kt, kf);
  for (int j = 0; j < kt; ++j) {
    for (int k = 0; k < kf; ++k) {
      sim(j, k) = std::abs(truth.components[static_cast<std::size_t>(j)].mu.coords().dot(
          fitted.components[static_cast<std::size_t>(k)].mu.coords()));
    }
  }
  std::vector<int> match(static_cast<std::size_t>(kt), -1);
  std::vector<bool> used(static_cast<std::size_t>(kf), false);
  for (int round = 0; round < std::min(kt, kf); ++round) {
    int bj = -1;
    int bk = -1;
    for (int j = 0; j < kt; ++j) {
      if (match[static_cast<std::size_t>(j)] >= 0) continue;
      for (int k = 0; k < kf; ++k) {
        if (used[static_cast<std::size_t>(k)]) continue;
        if (bj < 0 || sim(j, k) > sim(bj, bk)) {
          bj = j;
          bk = k;
        }
      }
    }
    match[static_cast<std::size_t>(bj)] = bk;
    used[static_cast<std::size_t>(bk)] = true;
  }
  return match;
}

struct RecoveryMetrics {
  std::vector<int> match;
  double min_cosine = 1.0;          // mu^T mu_hat (vMF) or |mu^T mu_hat| (Watson)
  double max_kappa_rel_error = 0.0; // |kappa - kappa_hat| / |kappa|
  double max_weight_rel_error = 0.0;
};

inline RecoveryMetrics recovery_metrics(const MixtureModel& truth, const MixtureModel& fitted) {
  if (truth.family != fitted.family) throw domain_error("recovery: model families differ");
  if (truth.dim() != fitted.dim()) throw domain_error("recovery: model dimensions differ");
  if (truth.size() != fitted.size()) throw domain_error("recovery: component counts differ");
  RecoveryMetrics m{match_components(truth, fitted)};
  for (int j = 0; j < truth.size(); ++j) {
    const Component& t = truth.components[static_cast<std::size_t>(j)];
    const Component& f = fitted.components[static_cast<std::size_t>(m.match[static_cast<std::size_t>(j)])];
    double cosine = t.mu.coords().dot(f.mu.coords());
    if (truth.family == Family::watson) cosine = std::abs(cosine);
    m.min_cosine = std::min(m.min_cosine, cosine);
    m.max_kappa_rel_error = std::max(m.max_kappa_rel_error, std::abs(t.kappa - f.kappa) / std::abs(t.kappa));
    m.max_weight_rel_error = std::max(m.max_weight_rel_error, std::abs(t.weight - f.weight) / t.weight);
  }
  return m;
}

// ---- sampling -----------------------------------------------------------

// Counts n_j = round(pi_j n) by largest remainder, summing to n; remainder
// ties go to the lower index.
inline std::vector<Eigen::Index> component_counts(const std::vector<double>& weights, Eigen::Index n) {
  const std::size_t K = weights.size();
  std::vector<Eigen::Index> counts(K);
  std::vector<double> rem(K);
  Eigen::Index assigned = 0;
  for (std::size_t j = 0; j < K; ++j) {
    const double exact = weights[j] * static_cast<double>(n);
    counts[j] = static_cast<Eigen::Index>(std::floor(exact));
    rem[j] = exact - static_cast<double>(counts[j]);
    assigned += counts[j];
  }
  std::vector<std::size_t> order(K);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
  for (std::size_t k = 0; assigned < n; k = (k + 1) % K, ++assigned) ++counts[order[k]];
  return counts;
}

struct LabeledSample {
  Dataset data;
  Labels labels;
};

// Draws exactly component_counts(pi, n) points from each component (so the
// empirical proportions match pi up to rounding), then shuffles the rows.
inline LabeledSample sample_mixture(const MixtureModel& model, Eigen::Index n, std::uint64_t seed) {
  validate(model);
  if (n < 1) throw domain_error("sample_mixture: n must be >= 1");
  std::vector<double> weights;
  for (const Component& c : model.components) weights.push_back(c.weight);
  const std::vector<Eigen::Index> counts = component_counts(weights, n);

  Dataset ordered(n, model.dim());
  Labels ordered_labels(static_cast<std::size_t>(n));
  Eigen::Index row = 0;
  for (int j = 0; j < model.size(); ++j) {
    const Eigen::Index m = counts[static_cast<std::size_t>(j)];
    if (m == 0) continue;
    const Component& c = model.components[static_cast<std::size_t>(j)];
    const std::uint64_t component_seed = stream(seed, stream_id::kComponentBase + static_cast<std::uint64_t>(j))();
    ordered.middleRows(row, m) = model.family == Family::vmf ? sample_vmf({c.mu, c.kappa}, m, component_seed)
                                                             : sample_watson({c.mu, c.kappa}, m, component_seed);
    std::fill_n(ordered_labels.begin() + row, m, j);
    row += m;
  }

  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  Engine rng = stream(seed, stream_id::kLabels);
  std::shuffle(perm.begin(), perm.end(), rng);
  LabeledSample out{Dataset(n, model.dim()), Labels(static_cast<std::size_t>(n))};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.data.row(i) = ordered.row(perm[static_cast<std::size_t>(i)]);
    out.labels[static_cast<std::size_t>(i)] = ordered_labels[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
  }
  return out;
}

// The four-component simulation setting: p = 1000, n = 5000, weights
// (0.25, 0.24, 0.25, 0.26), kappas (651.0, 267.8, 267.8, 612.9), means
// uniform on the sphere from the given seed.
namespace bigsim {
inline constexpr int kDim = 1000;
inline constexpr Eigen::Index kPoints = 5000;
inline constexpr double kWeights[4] = {0.25, 0.24, 0.25, 0.26};
inline constexpr double kKappas[4] = {651.0, 267.8, 267.8, 612.9};

inline MixtureModel model(std::uint64_t seed) {
  Engine rng = stream(seed, stream_id::kMeans);
  MixtureModel m{Family::vmf, {}};
  for (int j = 0; j < 4; ++j) {
    m.components.push_back({kWeights[j], UnitVector(random_unit_vector(kDim, rng)), kKappas[j]});
  }
  return m;
}
}  // namespace bigsim

}  // namespace dirstat
