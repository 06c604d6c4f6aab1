#pragma once

// External cluster validation: plug-in entropy, mutual information and
// normalized mutual information, all in nats.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "dirstat/error.hpp"

namespace dirstat {

// counts(a, b) = #{i : y1[i] = a, y2[i] = b}.
struct Contingency {
  std::vector<std::vector<long long>> counts;
  std::vector<long long> row_totals;
  std::vector<long long> col_totals;
  long long n = 0;
};

namespace detail {

inline void require_label_vector(const std::vector<int>& y, const char* what) {
  if (y.empty()) throw data_error(std::string(what) + ": label vector is empty");
  for (int v : y) {
    if (v < 0) throw data_error(std::string(what) + ": labels must be non-negative");
  }
}

inline double plogp_sum(const std::vector<long long>& counts, long long n) {
  double h = 0.0;
  for (long long c : counts) {
    if (c == 0) continue;
    const double q = static_cast<double>(c) / static_cast<double>(n);
    h -= q * std::log(q);
  }
  return h;
}

}  // namespace detail

inline Contingency contingency(const std::vector<int>& y1, const std::vector<int>& y2) {
  detail::require_label_vector(y1, "contingency");
  detail::require_label_vector(y2, "contingency");
  if (y1.size() != y2.size()) throw data_error("contingency: label vectors differ in length");
  const int r = *std::max_element(y1.begin(), y1.end()) + 1;
  const int c = *std::max_element(y2.begin(), y2.end()) + 1;
  Contingency t;
  t.counts.assign(static_cast<std::size_t>(r), std::vector<long long>(static_cast<std::size_t>(c), 0));
  t.row_totals.assign(static_cast<std::size_t>(r), 0);
  t.col_totals.assign(static_cast<std::size_t>(c), 0);
  for (std::size_t i = 0; i < y1.size(); ++i) {
    ++t.counts[static_cast<std::size_t>(y1[i])][static_cast<std::size_t>(y2[i])];
    ++t.row_totals[static_cast<std::size_t>(y1[i])];
    ++t.col_totals[static_cast<std::size_t>(y2[i])];
  }
  t.n = static_cast<long long>(y1.size());
  return t;
}

inline double entropy(const std::vector<int>& y) {
  detail::require_label_vector(y, "entropy");
  std::vector<long long> counts(static_cast<std::size_t>(*std::max_element(y.begin(), y.end())) + 1, 0);
  for (int v : y) ++counts[static_cast<std::size_t>(v)];
  return detail::plogp_sum(counts, static_cast<long long>(y.size()));
}

inline double mutual_information(const Contingency& t) {
  const auto n = static_cast<double>(t.n);
  double mi = 0.0;
  for (std::size_t a = 0; a < t.counts.size(); ++a) {
    for (std::size_t b = 0; b < t.counts[a].size(); ++b) {
      const long long c = t.counts[a][b];
      if (c == 0) continue;
      const double ratio = static_cast<double>(c) * n /
                           (static_cast<double>(t.row_totals[a]) * static_cast<double>(t.col_totals[b]));
      mi += static_cast<double>(c) / n * std::log(ratio);
    }
  }
  // Rounding can leave a tiny negative value for independent labelings.
  return std::max(0.0, mi);
}

inline double mutual_information(const std::vector<int>& y1, const std::vector<int>& y2) {
  return mutual_information(contingency(y1, y2));
}

// I / sqrt(H1 H2). When either labeling has a single class the ratio is
// 0/0; it is defined as 1 if both are single-class (identical partitions)
// and 0 otherwise.
inline double nmi(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
  const Contingency t = contingency(y_true, y_pred);
  const double h1 = detail::plogp_sum(t.row_totals, t.n);
  const double h2 = detail::plogp_sum(t.col_totals, t.n);
  if (h1 <= 0.0 || h2 <= 0.0) return (h1 <= 0.0 && h2 <= 0.0) ? 1.0 : 0.0;
  return std::clamp(mutual_information(t) / std::sqrt(h1 * h2), 0.0, 1.0);
}

}  // namespace dirstat
