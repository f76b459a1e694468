#include "wmdecomp/corpus_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "wmdecomp/error.hpp"
#include "wmdecomp/random.hpp"

namespace wmdecomp {

std::vector<WordIndex> DocumentVector::words() const {
  std::vector<WordIndex> out;
  out.reserve(entries.size());
  for (const auto& [w, _] : entries) out.push_back(w);
  return out;
}

std::vector<double> DocumentVector::weights() const {
  std::vector<double> out;
  out.reserve(entries.size());
  for (const auto& [_, m] : entries) out.push_back(m);
  return out;
}

double DocumentVector::total_mass() const {
  double s = 0.0;
  for (const auto& [_, m] : entries) s += m;
  return s;
}

std::optional<std::size_t> Vocabulary::position(std::string_view word) const {
  auto it = by_word_.find(std::string(word));
  if (it == by_word_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Vocabulary::position_of_id(WordIndex id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

void Vocabulary::add(std::string word, WordIndex embedding_id) {
  if (by_word_.contains(word)) throw Error("duplicate vocabulary word '" + word + "'");
  const std::size_t pos = ids_.size();
  by_word_.emplace(word, pos);
  by_id_.emplace(embedding_id, pos);
  ids_.push_back(embedding_id);
  words_.push_back(std::move(word));
}

std::string_view to_string(Weighting weighting) {
  return weighting == Weighting::kNbow ? "nbow" : "tfidf";
}

Weighting parse_weighting(std::string_view name) {
  if (name == "nbow") return Weighting::kNbow;
  if (name == "tfidf") return Weighting::kTfidf;
  throw Error("unknown weighting '" + std::string(name) + "'");
}

IngestStats& IngestStats::operator+=(const IngestStats& o) {
  documents_read += o.documents_read;
  documents_skipped += o.documents_skipped;
  tokens_read += o.tokens_read;
  tokens_dropped += o.tokens_dropped;
  return *this;
}

std::string IngestStats::to_string() const {
  std::ostringstream os;
  os << "documents_read=" << documents_read << " documents_skipped=" << documents_skipped
     << " tokens_read=" << tokens_read << " tokens_dropped=" << tokens_dropped;
  return os.str();
}

Vocabulary build_vocabulary(std::span<const TokenizedDocument> docs, const EmbeddingStore& store,
                            std::size_t min_count) {
  if (docs.empty()) throw Error("cannot build a vocabulary from zero documents");
  if (min_count == 0) min_count = 1;

  std::unordered_map<std::string_view, std::size_t> counts;
  std::vector<std::string_view> order;
  for (const auto& doc : docs) {
    for (const auto& tok : doc.tokens) {
      auto [it, inserted] = counts.try_emplace(tok, 0);
      if (inserted) order.push_back(tok);
      ++it->second;
    }
  }

  Vocabulary vocab;
  for (std::string_view w : order) {
    if (counts[w] < min_count) continue;
    if (auto id = store.find(w)) vocab.add(std::string(w), *id);
  }
  if (vocab.empty()) throw Error("vocabulary is empty after frequency and embedding filters");
  return vocab;
}

IdfTable idf(const Vocabulary& vocab, std::span<const TokenizedDocument> docs) {
  if (docs.empty()) throw Error("idf needs at least one document");
  std::vector<std::size_t> df(vocab.size(), 0);
  std::vector<std::size_t> last_seen(vocab.size(), SIZE_MAX);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (const auto& tok : docs[d].tokens) {
      auto pos = vocab.position(tok);
      if (!pos || last_seen[*pos] == d) continue;
      last_seen[*pos] = d;
      ++df[*pos];
    }
  }
  const double n = static_cast<double>(docs.size());
  IdfTable table;
  table.weights.resize(vocab.size());
  for (std::size_t i = 0; i < vocab.size(); ++i)
    table.weights[i] = std::log((1.0 + n) / (1.0 + static_cast<double>(df[i]))) + 1.0;
  return table;
}

std::optional<DocumentVector> vectorize(const TokenizedDocument& doc, const Vocabulary& vocab,
                                        Weighting weighting, const IdfTable* idf_table,
                                        IngestStats* stats) {
  if (weighting == Weighting::kTfidf && (!idf_table || idf_table->weights.size() != vocab.size()))
    throw Error("tfidf weighting needs an idf table covering the vocabulary");

  // Keyed by embedding row so entries come out sorted.
  std::map<WordIndex, std::pair<std::size_t, std::size_t>> counts;  // id -> (position, count)
  std::size_t kept = 0;
  for (const auto& tok : doc.tokens) {
    auto pos = vocab.position(tok);
    if (!pos) continue;
    auto& slot = counts[vocab.embedding_ids()[*pos]];
    slot.first = *pos;
    ++slot.second;
    ++kept;
  }
  if (stats) {
    ++stats->documents_read;
    stats->tokens_read += doc.tokens.size();
    stats->tokens_dropped += doc.tokens.size() - kept;
    if (kept == 0) ++stats->documents_skipped;
  }
  if (kept == 0) return std::nullopt;

  DocumentVector out;
  out.doc_id = doc.id;
  out.entries.reserve(counts.size());
  if (weighting == Weighting::kNbow) {
    const double total = static_cast<double>(kept);
    for (const auto& [id, pc] : counts)
      out.entries.emplace_back(id, static_cast<double>(pc.second) / total);
  } else {
    double total = 0.0;
    for (const auto& [id, pc] : counts) {
      const double w = static_cast<double>(pc.second) * idf_table->weights[pc.first];
      out.entries.emplace_back(id, w);
      total += w;
    }
    for (auto& e : out.entries) e.second /= total;
  }
  return out;
}

DocumentSet vectorize_all(std::string label, std::span<const TokenizedDocument> docs,
                          const Vocabulary& vocab, Weighting weighting, const IdfTable* idf_table,
                          IngestStats* stats) {
  DocumentSet set;
  set.label = std::move(label);
  set.vectors.reserve(docs.size());
  for (const auto& doc : docs) {
    if (auto v = vectorize(doc, vocab, weighting, idf_table, stats)) set.vectors.push_back(std::move(*v));
  }
  return set;
}

std::vector<TokenizedDocument> filter_and_sample(std::span<const TokenizedDocument> docs,
                                                 std::size_t min_length, std::size_t sample_size,
                                                 std::uint64_t seed) {
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < docs.size(); ++i)
    if (docs[i].tokens.size() >= min_length) eligible.push_back(i);
  if (sample_size > eligible.size())
    throw Error("requested sample of " + std::to_string(sample_size) + " documents but only " +
                std::to_string(eligible.size()) + " eligible");
  Rng rng(seed);
  std::vector<TokenizedDocument> out;
  out.reserve(sample_size);
  for (std::size_t k : sample_without_replacement(rng, eligible.size(), sample_size))
    out.push_back(docs[eligible[k]]);
  return out;
}

CorpusFormat parse_corpus_format(std::string_view name) {
  if (name == "auto") return CorpusFormat::kAuto;
  if (name == "jsonl") return CorpusFormat::kJsonl;
  if (name == "text") return CorpusFormat::kText;
  throw Error("unknown corpus format '" + std::string(name) + "'");
}

namespace {

std::vector<std::string> split_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.emplace_back(s.substr(start, i - start));
  }
  return out;
}

TokenizedDocument parse_record(std::string_view line, std::size_t line_no) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what(), line_no);
  }
  if (!j.is_object() || !j.contains("tokens")) throw ParseError("record lacks `tokens`", line_no);
  TokenizedDocument doc;
  if (j.contains("id")) {
    const auto& id = j["id"];
    doc.id = id.is_string() ? id.get<std::string>() : id.dump();
  } else {
    doc.id = std::to_string(line_no);
  }
  const auto& tokens = j["tokens"];
  if (tokens.is_string()) {
    doc.tokens = split_tokens(tokens.get<std::string>());
  } else if (tokens.is_array()) {
    for (const auto& t : tokens) {
      if (!t.is_string()) throw ParseError("non-string token", line_no);
      doc.tokens.push_back(t.get<std::string>());
    }
  } else {
    throw ParseError("`tokens` must be an array or a string", line_no);
  }
  return doc;
}

}  // namespace

std::vector<TokenizedDocument> parse_corpus(std::string_view text, CorpusFormat format) {
  std::vector<TokenizedDocument> docs;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos) continue;

    if (format == CorpusFormat::kAuto)
      format = line[first] == '{' ? CorpusFormat::kJsonl : CorpusFormat::kText;
    if (format == CorpusFormat::kJsonl) {
      docs.push_back(parse_record(line, line_no));
    } else {
      docs.push_back({std::to_string(line_no), split_tokens(line)});
    }
  }
  return docs;
}

std::vector<TokenizedDocument> read_corpus(const std::filesystem::path& path, CorpusFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open corpus file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_corpus(ss.str(), format);
}

}  // namespace wmdecomp
