#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "wmdecomp/embedding_store.hpp"

namespace wmdecomp {

struct TokenizedDocument {
  std::string id;
  std::vector<std::string> tokens;
};

// Sparse L1-normalised bag of words. Entries are (embedding row, mass),
// sorted by embedding row.
struct DocumentVector {
  std::string doc_id;
  std::vector<std::pair<WordIndex, double>> entries;

  std::size_t size() const { return entries.size(); }
  std::vector<WordIndex> words() const;
  std::vector<double> weights() const;
  double total_mass() const;
};

struct DocumentSet {
  std::string label;
  std::vector<DocumentVector> vectors;

  std::size_t size() const { return vectors.size(); }
};

// Words kept for a comparison run, in first-occurrence order. Each entry maps
// to its row in the embedding store.
class Vocabulary {
 public:
  Vocabulary() = default;

  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  const std::vector<WordIndex>& embedding_ids() const { return ids_; }
  const std::vector<std::string>& words() const { return words_; }
  // Position of a word in first-occurrence order.
  std::optional<std::size_t> position(std::string_view word) const;
  std::optional<std::size_t> position_of_id(WordIndex id) const;

  void add(std::string word, WordIndex embedding_id);

 private:
  std::vector<WordIndex> ids_;
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> by_word_;
  std::unordered_map<WordIndex, std::size_t> by_id_;
};

enum class Weighting { kNbow, kTfidf };

std::string_view to_string(Weighting weighting);
Weighting parse_weighting(std::string_view name);

// Inverse document frequency per vocabulary position.
struct IdfTable {
  std::vector<double> weights;
};

struct IngestStats {
  std::size_t documents_read = 0;
  std::size_t documents_skipped = 0;
  std::size_t tokens_read = 0;
  std::size_t tokens_dropped = 0;

  IngestStats& operator+=(const IngestStats& o);
  std::string to_string() const;
};

// Words with corpus frequency >= min_count that are present in `store`.
Vocabulary build_vocabulary(std::span<const TokenizedDocument> docs, const EmbeddingStore& store,
                            std::size_t min_count = 1);

// idf_t = ln((1 + N) / (1 + df_t)) + 1 over the documents given.
IdfTable idf(const Vocabulary& vocab, std::span<const TokenizedDocument> docs);

// nbow: count / total; tfidf: count * idf, then L1-normalised. Out-of-vocabulary
// tokens are dropped first; nullopt when nothing survives.
std::optional<DocumentVector> vectorize(const TokenizedDocument& doc, const Vocabulary& vocab,
                                        Weighting weighting, const IdfTable* idf = nullptr,
                                        IngestStats* stats = nullptr);

// Vectorises every document, skipping the empty ones (counted in `stats`).
DocumentSet vectorize_all(std::string label, std::span<const TokenizedDocument> docs,
                          const Vocabulary& vocab, Weighting weighting,
                          const IdfTable* idf = nullptr, IngestStats* stats = nullptr);

// Uniform sample without replacement among documents with at least
// `min_length` tokens, in draw order.
std::vector<TokenizedDocument> filter_and_sample(std::span<const TokenizedDocument> docs,
                                                 std::size_t min_length, std::size_t sample_size,
                                                 std::uint64_t seed);

enum class CorpusFormat { kAuto, kJsonl, kText };

CorpusFormat parse_corpus_format(std::string_view name);

// One document per line: either `{"id": ..., "tokens": [...]}` records or
// whitespace-tokenised plain text (ids become 1-based line numbers).
std::vector<TokenizedDocument> read_corpus(const std::filesystem::path& path,
                                           CorpusFormat format = CorpusFormat::kAuto);
std::vector<TokenizedDocument> parse_corpus(std::string_view text,
                                            CorpusFormat format = CorpusFormat::kAuto);

}  // namespace wmdecomp
