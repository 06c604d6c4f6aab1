#pragma once

// Synthetic bag-of-words corpus standing in for real document collections.
// Each topic owns a block of keywords; a document draws its words from its
// topic's keywords with probability `topicality` and otherwise from a
// Zipf-distributed background vocabulary shared by all topics. Rows are
// log(1 + tf) weighted and scaled to unit length, the usual preprocessing
// before spherical clustering of text.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "dirstat/error.hpp"
#include "dirstat/random.hpp"
#include "dirstat/types.hpp"

namespace dirstat_tools {

struct CorpusSpec {
  int vocabulary = 2000;
  int topics = 5;
  Eigen::Index documents = 1000;
  double mean_length = 80.0;
  double topicality = 0.35;
  int keywords_per_topic = 60;
};

struct Corpus {
  dirstat::Dataset data;
  std::vector<int> labels;
};

inline Corpus generate_corpus(const CorpusSpec& spec, std::uint64_t seed) {
  if (spec.vocabulary < 2 || spec.topics < 1 || spec.documents < 1 || spec.keywords_per_topic < 1 ||
      !(spec.mean_length >= 1.0) || !(spec.topicality >= 0.0 && spec.topicality <= 1.0)) {
    throw dirstat::domain_error("text corpus: invalid parameters");
  }
  if (static_cast<long long>(spec.topics) * spec.keywords_per_topic > spec.vocabulary) {
    throw dirstat::domain_error("text corpus: topics * keywords exceeds the vocabulary");
  }
  dirstat::Engine rng = dirstat::stream(seed, dirstat::stream_id::kSampler);

  // Keywords are disjoint random blocks of a shuffled vocabulary.
  std::vector<int> words(static_cast<std::size_t>(spec.vocabulary));
  for (int w = 0; w < spec.vocabulary; ++w) words[static_cast<std::size_t>(w)] = w;
  std::shuffle(words.begin(), words.end(), rng);

  std::vector<double> zipf(static_cast<std::size_t>(spec.vocabulary));
  for (int w = 0; w < spec.vocabulary; ++w) zipf[static_cast<std::size_t>(w)] = 1.0 / (w + 1.0);
  std::discrete_distribution<int> background(zipf.begin(), zipf.end());
  std::discrete_distribution<int> keyword(zipf.begin(), zipf.begin() + spec.keywords_per_topic);
  std::poisson_distribution<int> length(spec.mean_length);
  std::uniform_int_distribution<int> topic(0, spec.topics - 1);
  std::bernoulli_distribution on_topic(spec.topicality);

  Corpus out{dirstat::Dataset::Zero(spec.documents, spec.vocabulary), {}};
  out.labels.reserve(static_cast<std::size_t>(spec.documents));
  for (Eigen::Index d = 0; d < spec.documents; ++d) {
    const int t = topic(rng);
    out.labels.push_back(t);
    const int n = std::max(1, length(rng));
    for (int i = 0; i < n; ++i) {
      const int w = on_topic(rng) ? words[static_cast<std::size_t>(t * spec.keywords_per_topic + keyword(rng))]
                                  : background(rng);
      out.data(d, w) += 1.0;
    }
    out.data.row(d) = out.data.row(d).array().log1p();
    out.data.row(d) /= out.data.row(d).norm();
  }
  return out;
}

}  // namespace dirstat_tools
