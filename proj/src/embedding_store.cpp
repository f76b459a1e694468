#include "wmdecomp/embedding_store.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "wmdecomp/error.hpp"

namespace wmdecomp {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

bool parse_double(std::string_view s, double& out) {
  // strtod accepts forms (e.g. "1e-3", "+1") that from_chars rejects on some
  // toolchains; the copy keeps it null-terminated.
  std::string buf(s);
  char* end = nullptr;
  out = std::strtod(buf.c_str(), &end);
  return end == buf.c_str() + buf.size() && !buf.empty();
}

bool parse_size(std::string_view s, std::size_t& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

std::string_view to_string(Metric metric) {
  return metric == Metric::kCosine ? "cosine" : "euclidean";
}

Metric parse_metric(std::string_view name) {
  if (name == "cosine") return Metric::kCosine;
  if (name == "euclidean") return Metric::kEuclidean;
  throw Error("unknown metric '" + std::string(name) + "'");
}

EmbeddingStore::EmbeddingStore(std::vector<std::string> words, std::vector<double> matrix,
                               std::size_t dim, Metric metric)
    : words_(std::move(words)), matrix_(std::move(matrix)), dim_(dim), metric_(metric) {
  if (words_.empty()) throw Error("embedding store is empty");
  if (dim_ == 0) throw Error("embedding dimension must be >= 1");
  if (matrix_.size() != words_.size() * dim_)
    throw Error("embedding matrix size does not match word count x dimension");
  index_.reserve(words_.size());
  norms_.resize(words_.size());
  for (WordIndex i = 0; i < words_.size(); ++i) {
    if (!index_.emplace(words_[i], i).second) throw Error("duplicate word '" + words_[i] + "'");
    double sq = 0.0;
    for (double v : vector(i)) {
      if (!std::isfinite(v)) throw Error("non-finite component for word '" + words_[i] + "'");
      sq += v * v;
    }
    norms_[i] = std::sqrt(sq);
    if (metric_ == Metric::kCosine && norms_[i] == 0.0)
      throw Error("zero-norm vector for word '" + words_[i] + "' under cosine metric");
  }
}

std::optional<WordIndex> EmbeddingStore::find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

EmbeddingStore EmbeddingStore::with_metric(Metric metric) const {
  return EmbeddingStore(words_, matrix_, dim_, metric);
}

double EmbeddingStore::cost(WordIndex i, WordIndex j) const {
  const double* x = matrix_.data() + i * dim_;
  const double* y = matrix_.data() + j * dim_;
  if (metric_ == Metric::kCosine) {
    if (i == j) return 0.0;
    double dot = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) dot += x[k] * y[k];
    const double c = 1.0 - dot / (norms_[i] * norms_[j]);
    return std::clamp(c, 0.0, 2.0);
  }
  double sq = 0.0;
  for (std::size_t k = 0; k < dim_; ++k) {
    const double d = x[k] - y[k];
    sq += d * d;
  }
  return std::sqrt(sq);
}

CostMatrix EmbeddingStore::cost_matrix(std::span<const WordIndex> src,
                                       std::span<const WordIndex> dst) const {
  if (src.empty() || dst.empty()) throw Error("cost matrix needs non-empty source and target");
  CostMatrix m;
  m.rows.assign(src.begin(), src.end());
  m.cols.assign(dst.begin(), dst.end());
  m.values.resize(src.size() * dst.size());
  for (WordIndex w : src)
    if (w >= size()) throw Error("word index out of range");
  for (WordIndex w : dst)
    if (w >= size()) throw Error("word index out of range");
  for (std::size_t i = 0; i < src.size(); ++i)
    for (std::size_t j = 0; j < dst.size(); ++j) m(i, j) = cost(src[i], dst[j]);
  return m;
}

EmbeddingStore parse_embeddings(std::string_view text, EmbeddingFormat format, Metric metric) {
  std::vector<std::string> words;
  std::vector<double> matrix;
  std::size_t dim = 0;
  std::optional<std::size_t> declared_rows;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool first = true;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    auto fields = split_ws(line);
    if (fields.empty()) continue;

    if (first) {
      first = false;
      std::size_t n = 0, d = 0;
      const bool looks_like_header =
          fields.size() == 2 && parse_size(fields[0], n) && parse_size(fields[1], d);
      if (format == EmbeddingFormat::kTextWithHeader && !looks_like_header)
        throw ParseError("expected header `n d`", line_no);
      if (looks_like_header && format != EmbeddingFormat::kText) {
        if (d == 0) throw ParseError("header declares zero dimensions", line_no);
        declared_rows = n;
        dim = d;
        continue;
      }
    }

    if (fields.size() < 2) throw ParseError("expected a word followed by components", line_no);
    const std::size_t d = fields.size() - 1;
    if (dim == 0) dim = d;
    if (d != dim)
      throw ParseError("dimension mismatch: expected " + std::to_string(dim) + ", got " +
                           std::to_string(d),
                       line_no);
    for (std::size_t k = 1; k < fields.size(); ++k) {
      double v = 0.0;
      if (!parse_double(fields[k], v) || !std::isfinite(v))
        throw ParseError("invalid component '" + std::string(fields[k]) + "'", line_no);
      matrix.push_back(v);
    }
    words.emplace_back(fields[0]);
  }

  if (words.empty()) throw Error("embedding file contains no vectors");
  if (declared_rows && *declared_rows != words.size())
    throw Error("header declares " + std::to_string(*declared_rows) + " vectors, found " +
                std::to_string(words.size()));
  return EmbeddingStore(std::move(words), std::move(matrix), dim, metric);
}

EmbeddingStore load_embeddings(const std::filesystem::path& path, EmbeddingFormat format,
                               Metric metric) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open embeddings file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_embeddings(ss.str(), format, metric);
}

}  // namespace wmdecomp
