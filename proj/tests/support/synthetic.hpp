#pragma once

// Seeded synthetic embeddings and corpora for tests.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "wmdecomp/corpus_model.hpp"
#include "wmdecomp/embedding_store.hpp"
#include "wmdecomp/random.hpp"

namespace wmdecomp::testing {

inline std::vector<double> unit_gaussian(Rng& rng, std::size_t dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(dim);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& x : v) {
      x = normal(rng);
      norm += x * x;
    }
  } while (norm == 0.0);
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

// `n` words `w0..w{n-1}` with vectors uniform on the unit sphere.
inline EmbeddingStore random_store(std::size_t n, std::size_t dim, std::uint64_t seed,
                                   Metric metric = Metric::kCosine) {
  Rng rng(seed);
  std::vector<std::string> words;
  std::vector<double> matrix;
  for (std::size_t i = 0; i < n; ++i) {
    words.push_back("w" + std::to_string(i));
    auto v = unit_gaussian(rng, dim);
    matrix.insert(matrix.end(), v.begin(), v.end());
  }
  return EmbeddingStore(std::move(words), std::move(matrix), dim, metric);
}

// Random L1-normalised document over 1..max_unique distinct words.
inline DocumentVector random_document(Rng& rng, std::size_t vocab_size, std::size_t max_unique,
                                      const std::string& id = "doc") {
  const std::size_t k = 1 + uniform_index(rng, std::min(max_unique, vocab_size));
  auto picked = sample_without_replacement(rng, vocab_size, k);
  std::sort(picked.begin(), picked.end());
  DocumentVector d;
  d.doc_id = id;
  double total = 0.0;
  for (std::size_t w : picked) {
    const double m = 0.05 + uniform_unit(rng);
    d.entries.emplace_back(w, m);
    total += m;
  }
  for (auto& e : d.entries) e.second /= total;
  return d;
}

inline DocumentSet random_set(Rng& rng, std::size_t size, std::size_t vocab_size,
                              std::size_t max_unique, const std::string& label) {
  DocumentSet s;
  s.label = label;
  for (std::size_t i = 0; i < size; ++i)
    s.vectors.push_back(random_document(rng, vocab_size, max_unique, label + std::to_string(i)));
  return s;
}

// Embeddings where words cluster around `topics` anchor directions.
// Word t * words_per_topic + i belongs to topic t.
inline EmbeddingStore topic_store(std::size_t topics, std::size_t words_per_topic, std::size_t dim,
                                  double spread, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, spread);
  std::vector<std::string> words;
  std::vector<double> matrix;
  for (std::size_t t = 0; t < topics; ++t) {
    const auto anchor = unit_gaussian(rng, dim);
    for (std::size_t i = 0; i < words_per_topic; ++i) {
      words.push_back("t" + std::to_string(t) + "_" + std::to_string(i));
      for (std::size_t k = 0; k < dim; ++k) matrix.push_back(anchor[k] + normal(rng));
    }
  }
  return EmbeddingStore(std::move(words), std::move(matrix), dim);
}

// Token lists whose words are mostly drawn from one topic in [first, last].
inline std::vector<TokenizedDocument> topic_corpus(std::size_t docs, std::size_t first_topic,
                                                   std::size_t last_topic,
                                                   std::size_t words_per_topic,
                                                   std::size_t length, std::size_t total_topics,
                                                   Rng& rng, const std::string& prefix) {
  std::vector<TokenizedDocument> out;
  for (std::size_t d = 0; d < docs; ++d) {
    const std::size_t topic = first_topic + uniform_index(rng, last_topic - first_topic + 1);
    TokenizedDocument doc;
    doc.id = prefix + std::to_string(d);
    for (std::size_t k = 0; k < length; ++k) {
      // One token in five comes from any topic.
      const std::size_t t = uniform_index(rng, 5) == 0 ? uniform_index(rng, total_topics) : topic;
      const std::size_t w = uniform_index(rng, words_per_topic);
      doc.tokens.push_back("t" + std::to_string(t) + "_" + std::to_string(w));
    }
    out.push_back(std::move(doc));
  }
  return out;
}

}  // namespace wmdecomp::testing
