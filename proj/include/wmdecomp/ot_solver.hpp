#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "wmdecomp/corpus_model.hpp"
#include "wmdecomp/embedding_store.hpp"

namespace wmdecomp {

// Which way mass moves. kSymmetricMax is only meaningful for relaxed bounds,
// where it takes the larger (tighter) of the two one-sided estimates.
enum class Direction { kAToB, kBToA, kSymmetricMax };

std::string_view to_string(Direction direction);
// Accepts "ab", "ba", "max" (CLI spelling) and "a->b", "b->a", "symmetric-max".
Direction parse_direction(std::string_view name);

// Optimal flow between two documents over their own words.
struct TransportPlan {
  std::vector<WordIndex> src_indices;
  std::vector<WordIndex> dst_indices;
  std::vector<double> flows;  // row-major |src| x |dst|
  double total_cost = 0.0;

  std::size_t num_rows() const { return src_indices.size(); }
  std::size_t num_cols() const { return dst_indices.size(); }
  double flow(std::size_t i, std::size_t j) const { return flows[i * dst_indices.size() + j]; }

  // Plan for the reverse direction. With symmetric costs it is optimal for
  // the reverse problem whenever this plan is optimal for the forward one.
  TransportPlan transposed() const;
};

struct SolverOptions {
  // Consecutive zero-step pivots tolerated under the steepest-edge rule
  // before switching to smallest-index (Bland) selection.
  std::size_t max_degenerate_pivots = 64;
  // Hard cap on pivots; 0 selects 50 * rows * cols + 1000.
  std::size_t max_iterations = 0;
  // Flows below this are reported as exactly zero.
  double flow_clamp = 1e-12;
  // Marginal totals may deviate from 1 by at most this before erroring.
  double normalization_tolerance = 1e-6;
};

struct SolverStats {
  std::size_t iterations = 0;
  std::size_t degenerate_pivots = 0;
  std::size_t bland_pivots = 0;
};

// Minimum-cost transportation problem: rows with `supply`, columns with
// `demand`, unit costs row-major. Supplies and demands must have equal totals
// up to `options.normalization_tolerance` (relative); the demand side is
// rescaled to match exactly. Returns the flow matrix of an optimal basic
// feasible solution.
std::vector<double> solve_transportation(std::span<const double> supply,
                                         std::span<const double> demand,
                                         std::span<const double> costs,
                                         const SolverOptions& options = {},
                                         SolverStats* stats = nullptr);

// Exact Word Mover's Distance plan. `costs` must be dimensioned
// |a| x |b| with rows/cols matching the documents' word order.
TransportPlan solve_transport(const DocumentVector& a, const DocumentVector& b,
                              const CostMatrix& costs, const SolverOptions& options = {},
                              SolverStats* stats = nullptr);

// Convenience overload building the cost matrix over the pair's unique words.
TransportPlan solve_transport(const DocumentVector& a, const DocumentVector& b,
                              const EmbeddingStore& store, const SolverOptions& options = {});

// Relaxed WMD: each word sends all its mass to its nearest counterpart.
double rwmd(const DocumentVector& a, const DocumentVector& b, const CostMatrix& costs,
            Direction direction);

// |S^a| x |S^b| relaxed distances; entry (p, q) concerns sa[p] and sb[q].
struct DistanceMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // row-major
  Direction direction = Direction::kAToB;

  double operator()(std::size_t p, std::size_t q) const { return values[p * cols + q]; }
  double& operator()(std::size_t p, std::size_t q) { return values[p * cols + q]; }
};

// Batched relaxed WMD. For each target document the nearest-word cost of every
// word used on the source side is computed once; each entry is then a sparse
// dot product of source weights with those minima.
DistanceMatrix lc_rwmd_matrix(const DocumentSet& sa, const DocumentSet& sb,
                              const EmbeddingStore& store, Direction direction,
                              unsigned threads = 1);

// Checks that a document is L1-normalised within `tolerance`.
void check_normalized(const DocumentVector& v, double tolerance, std::string_view side);

}  // namespace wmdecomp
