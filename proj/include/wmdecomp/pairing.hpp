#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wmdecomp/corpus_model.hpp"
#include "wmdecomp/ot_solver.hpp"

namespace wmdecomp {

enum class PairingMethod { kGaleShapley, kRandom, kExternal };

std::string_view to_string(PairingMethod method);
PairingMethod parse_pairing_method(std::string_view name);

enum class Side { kA, kB };

// Pairs are always (index in S^a, index in S^b), whichever side proposed.
struct PairingResult {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  PairingMethod method = PairingMethod::kGaleShapley;
  std::optional<std::uint64_t> seed;

  std::size_t size() const { return pairs.size(); }
};

// Deferred acceptance with preferences by ascending distance, ties broken
// towards the lower index on the opposing side. Rows of `prefs` are S^a
// documents and columns S^b documents. The reviewing side ranks suitors by
// `reviewer_prefs` when given (same orientation), otherwise by `prefs`.
PairingResult gale_shapley(const DistanceMatrix& prefs, Side suitor_side = Side::kA,
                           const DistanceMatrix* reviewer_prefs = nullptr);

// `count` independent uniform draws of (i, j), with replacement.
PairingResult random_pairs(std::size_t n_a, std::size_t n_b, std::size_t count,
                           std::uint64_t seed);

struct StabilityResult {
  bool stable = true;
  std::optional<std::pair<std::size_t, std::size_t>> blocking_pair;
};

// First blocking pair in row-major (a, b) order, if any. S^a documents rank by
// rows of `prefs`, S^b documents by columns of `b_prefs` (default `prefs`).
StabilityResult verify_stable(const PairingResult& pairing, const DistanceMatrix& prefs,
                              const DistanceMatrix* b_prefs = nullptr);

// Uniform subsample of `set` down to `size` documents, order preserved.
DocumentSet subsample(const DocumentSet& set, std::size_t size, std::uint64_t seed);

// Two-column CSV with a `# method=... seed=...` comment line.
void write_pairs_csv(const std::filesystem::path& path, const PairingResult& pairing);
std::string format_pairs_csv(const PairingResult& pairing);
PairingResult read_pairs_csv(const std::filesystem::path& path);
PairingResult parse_pairs_csv(std::string_view text);

}  // namespace wmdecomp
