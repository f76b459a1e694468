#include "wmdecomp/pairing.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "wmdecomp/error.hpp"
#include "wmdecomp/random.hpp"

namespace wmdecomp {

std::string_view to_string(PairingMethod method) {
  switch (method) {
    case PairingMethod::kGaleShapley:
      return "gale-shapley";
    case PairingMethod::kRandom:
      return "random";
    case PairingMethod::kExternal:
      return "external";
  }
  return "?";
}

PairingMethod parse_pairing_method(std::string_view name) {
  if (name == "gs" || name == "gale-shapley") return PairingMethod::kGaleShapley;
  if (name == "random") return PairingMethod::kRandom;
  if (name == "external") return PairingMethod::kExternal;
  throw Error("unknown pairing method '" + std::string(name) + "'");
}

namespace {

void check_square(const DistanceMatrix& d, std::string_view what) {
  if (d.rows != d.cols)
    throw Error(std::string(what) + " must be square, got " + std::to_string(d.rows) + "x" +
                std::to_string(d.cols));
  if (d.values.size() != d.rows * d.cols) throw Error(std::string(what) + " has wrong size");
  for (double v : d.values)
    if (!std::isfinite(v)) throw Error(std::string(what) + " contains non-finite entries");
}

// Distance from `self` (on side `side`) to `other` on the opposite side.
double dist(const DistanceMatrix& d, Side side, std::size_t self, std::size_t other) {
  return side == Side::kA ? d(self, other) : d(other, self);
}

// Strict preference: closer first, then lower opposing index.
bool prefers(const DistanceMatrix& d, Side side, std::size_t self, std::size_t x, std::size_t y) {
  const double dx = dist(d, side, self, x), dy = dist(d, side, self, y);
  if (dx != dy) return dx < dy;
  return x < y;
}

}  // namespace

PairingResult gale_shapley(const DistanceMatrix& prefs, Side suitor_side,
                           const DistanceMatrix* reviewer_prefs) {
  check_square(prefs, "preference matrix");
  const DistanceMatrix& rev = reviewer_prefs ? *reviewer_prefs : prefs;
  if (reviewer_prefs) {
    check_square(rev, "reviewer preference matrix");
    if (rev.rows != prefs.rows) throw Error("reviewer preference matrix size differs");
  }
  const std::size_t n = prefs.rows;
  const Side reviewer_side = suitor_side == Side::kA ? Side::kB : Side::kA;

  // Each suitor's ranked list of reviewers.
  std::vector<std::vector<std::size_t>> lists(n, std::vector<std::size_t>(n));
  for (std::size_t s = 0; s < n; ++s) {
    auto& list = lists[s];
    std::iota(list.begin(), list.end(), 0);
    std::sort(list.begin(), list.end(), [&](std::size_t x, std::size_t y) {
      return prefers(prefs, suitor_side, s, x, y);
    });
  }

  constexpr std::size_t kFree = static_cast<std::size_t>(-1);
  std::vector<std::size_t> next(n, 0);
  std::vector<std::size_t> engaged_to(n, kFree);  // reviewer -> suitor
  // Free suitors are served lowest index first.
  std::vector<std::size_t> free_suitors(n);
  std::iota(free_suitors.rbegin(), free_suitors.rend(), 0);
  while (!free_suitors.empty()) {
    const std::size_t s = free_suitors.back();
    free_suitors.pop_back();
    const std::size_t r = lists[s][next[s]++];
    const std::size_t current = engaged_to[r];
    if (current == kFree) {
      engaged_to[r] = s;
    } else if (prefers(rev, reviewer_side, r, s, current)) {
      engaged_to[r] = s;
      free_suitors.push_back(current);
    } else {
      free_suitors.push_back(s);
    }
  }

  PairingResult result;
  result.method = PairingMethod::kGaleShapley;
  result.pairs.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t s = engaged_to[r];
    if (suitor_side == Side::kA)
      result.pairs[s] = {s, r};
    else
      result.pairs[r] = {r, s};
  }
  return result;
}

PairingResult random_pairs(std::size_t n_a, std::size_t n_b, std::size_t count,
                           std::uint64_t seed) {
  if (count == 0) throw Error("random pairing needs count >= 1");
  if (n_a == 0 || n_b == 0) throw Error("random pairing needs non-empty sets");
  Rng rng(seed);
  PairingResult result;
  result.method = PairingMethod::kRandom;
  result.seed = seed;
  result.pairs.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t i = uniform_index(rng, n_a);
    const std::size_t j = uniform_index(rng, n_b);
    result.pairs.emplace_back(i, j);
  }
  return result;
}

StabilityResult verify_stable(const PairingResult& pairing, const DistanceMatrix& prefs,
                              const DistanceMatrix* b_prefs) {
  check_square(prefs, "preference matrix");
  const DistanceMatrix& bp = b_prefs ? *b_prefs : prefs;
  const std::size_t n = prefs.rows;
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> partner_of_a(n, kNone), partner_of_b(n, kNone);
  for (const auto& [i, j] : pairing.pairs) {
    if (i >= n || j >= n || partner_of_a[i] != kNone || partner_of_b[j] != kNone)
      throw Error("pairing is not a perfect matching");
    partner_of_a[i] = j;
    partner_of_b[j] = i;
  }
  if (pairing.pairs.size() != n) throw Error("pairing is not a perfect matching");

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (partner_of_a[i] == j) continue;
      if (prefers(prefs, Side::kA, i, j, partner_of_a[i]) &&
          prefers(bp, Side::kB, j, i, partner_of_b[j]))
        return {false, std::make_pair(i, j)};
    }
  return {};
}

DocumentSet subsample(const DocumentSet& set, std::size_t size, std::uint64_t seed) {
  if (size > set.size())
    throw Error("cannot subsample " + std::to_string(set.size()) + " documents to " +
                std::to_string(size));
  Rng rng(seed);
  auto picked = sample_without_replacement(rng, set.size(), size);
  std::sort(picked.begin(), picked.end());
  DocumentSet out;
  out.label = set.label;
  out.vectors.reserve(size);
  for (std::size_t k : picked) out.vectors.push_back(set.vectors[k]);
  return out;
}

std::string format_pairs_csv(const PairingResult& pairing) {
  std::ostringstream os;
  os << "# method=" << to_string(pairing.method);
  if (pairing.seed) os << " seed=" << *pairing.seed;
  os << "\na_index,b_index\n";
  for (const auto& [i, j] : pairing.pairs) os << i << ',' << j << '\n';
  return os.str();
}

void write_pairs_csv(const std::filesystem::path& path, const PairingResult& pairing) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write pairs file " + path.string());
  out << format_pairs_csv(pairing);
}

PairingResult parse_pairs_csv(std::string_view text) {
  PairingResult result;
  result.method = PairingMethod::kExternal;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::istringstream meta{std::string(line.substr(1))};
      std::string kv;
      while (meta >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
        if (key == "method") result.method = parse_pairing_method(value);
        if (key == "seed") result.seed = std::stoull(value);
      }
      continue;
    }
    if (line.starts_with("a_index")) continue;
    const auto comma = line.find(',');
    if (comma == std::string_view::npos) throw ParseError("expected `a_index,b_index`", line_no);
    std::size_t i = 0, j = 0;
    auto a = line.substr(0, comma), b = line.substr(comma + 1);
    auto r1 = std::from_chars(a.data(), a.data() + a.size(), i);
    auto r2 = std::from_chars(b.data(), b.data() + b.size(), j);
    if (r1.ec != std::errc() || r2.ec != std::errc() || r1.ptr != a.data() + a.size() ||
        r2.ptr != b.data() + b.size())
      throw ParseError("invalid pair indices", line_no);
    result.pairs.emplace_back(i, j);
  }
  return result;
}

PairingResult read_pairs_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open pairs file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_pairs_csv(ss.str());
}

}  // namespace wmdecomp
