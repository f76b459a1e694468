#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace wmdecomp {

using WordIndex = std::size_t;

enum class Metric { kCosine, kEuclidean };

enum class EmbeddingFormat {
  kText,            // `word c_1 ... c_d` per line
  kTextWithHeader,  // first line `n d`, then as kText
  kAuto,            // header if the first line is exactly two integers
};

std::string_view to_string(Metric metric);
Metric parse_metric(std::string_view name);

// Dense |rows| x |cols| matrix of word-to-word transport costs.
struct CostMatrix {
  std::vector<WordIndex> rows;
  std::vector<WordIndex> cols;
  std::vector<double> values;  // row-major

  std::size_t num_rows() const { return rows.size(); }
  std::size_t num_cols() const { return cols.size(); }
  double operator()(std::size_t i, std::size_t j) const { return values[i * cols.size() + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values[i * cols.size() + j]; }
};

// Vocabulary-indexed word vectors plus the metric used to compare them.
// Immutable after construction, so concurrent reads are safe.
class EmbeddingStore {
 public:
  EmbeddingStore(std::vector<std::string> words, std::vector<double> matrix, std::size_t dim,
                 Metric metric = Metric::kCosine);

  std::size_t size() const { return words_.size(); }
  std::size_t dim() const { return dim_; }
  Metric metric() const { return metric_; }

  const std::string& word(WordIndex i) const { return words_.at(i); }
  const std::vector<std::string>& words() const { return words_; }
  std::optional<WordIndex> find(std::string_view word) const;
  bool contains(std::string_view word) const { return find(word).has_value(); }

  std::span<const double> vector(WordIndex i) const {
    return {matrix_.data() + i * dim_, dim_};
  }
  const std::vector<double>& matrix() const { return matrix_; }

  // Same vectors under a different metric.
  EmbeddingStore with_metric(Metric metric) const;

  // cosine: 1 - <x_i, x_j> / (|x_i| |x_j|), clamped to [0, 2];
  // euclidean: |x_i - x_j|_2.
  double cost(WordIndex i, WordIndex j) const;

  CostMatrix cost_matrix(std::span<const WordIndex> src, std::span<const WordIndex> dst) const;

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, WordIndex> index_;
  std::vector<double> matrix_;
  std::vector<double> norms_;
  std::size_t dim_;
  Metric metric_;
};

EmbeddingStore load_embeddings(const std::filesystem::path& path,
                               EmbeddingFormat format = EmbeddingFormat::kAuto,
                               Metric metric = Metric::kCosine);

// Parses embedding text already in memory; `load_embeddings` forwards here.
EmbeddingStore parse_embeddings(std::string_view text, EmbeddingFormat format,
                                Metric metric = Metric::kCosine);

}  // namespace wmdecomp
