#include "wmdecomp/ot_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "wmdecomp/error.hpp"
#include "wmdecomp/parallel.hpp"

namespace wmdecomp {

std::string_view to_string(Direction direction) {
  switch (direction) {
    case Direction::kAToB:
      return "a->b";
    case Direction::kBToA:
      return "b->a";
    case Direction::kSymmetricMax:
      return "symmetric-max";
  }
  return "?";
}

Direction parse_direction(std::string_view name) {
  if (name == "ab" || name == "a->b") return Direction::kAToB;
  if (name == "ba" || name == "b->a") return Direction::kBToA;
  if (name == "max" || name == "symmetric-max") return Direction::kSymmetricMax;
  throw Error("unknown direction '" + std::string(name) + "'");
}

TransportPlan TransportPlan::transposed() const {
  TransportPlan t;
  t.src_indices = dst_indices;
  t.dst_indices = src_indices;
  t.total_cost = total_cost;
  t.flows.resize(flows.size());
  const std::size_t m = num_rows(), n = num_cols();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) t.flows[j * m + i] = flows[i * n + j];
  return t;
}

void check_normalized(const DocumentVector& v, double tolerance, std::string_view side) {
  if (v.entries.empty())
    throw Error("document '" + v.doc_id + "' (" + std::string(side) + ") is empty");
  const double mass = v.total_mass();
  if (std::abs(mass - 1.0) > tolerance)
    throw Error("document '" + v.doc_id + "' (" + std::string(side) +
                ") is not L1-normalised: total mass " + std::to_string(mass));
}

namespace {

void check_dimensions(const DocumentVector& a, const DocumentVector& b, const CostMatrix& costs) {
  if (costs.num_rows() != a.size() || costs.num_cols() != b.size() ||
      costs.values.size() != a.size() * b.size())
    throw Error("cost matrix is not dimensioned |a| x |b|");
}

}  // namespace

TransportPlan solve_transport(const DocumentVector& a, const DocumentVector& b,
                              const CostMatrix& costs, const SolverOptions& options,
                              SolverStats* stats) {
  check_normalized(a, options.normalization_tolerance, "source");
  check_normalized(b, options.normalization_tolerance, "target");
  check_dimensions(a, b, costs);

  const auto supply = a.weights();
  const auto demand = b.weights();

  TransportPlan plan;
  plan.src_indices = a.words();
  plan.dst_indices = b.words();
  plan.flows = solve_transportation(supply, demand, costs.values, options, stats);
  double total = 0.0;
  for (std::size_t k = 0; k < plan.flows.size(); ++k) {
    if (plan.flows[k] < options.flow_clamp) plan.flows[k] = 0.0;
    total += plan.flows[k] * costs.values[k];
  }
  plan.total_cost = total;
  return plan;
}

TransportPlan solve_transport(const DocumentVector& a, const DocumentVector& b,
                              const EmbeddingStore& store, const SolverOptions& options) {
  const auto src = a.words();
  const auto dst = b.words();
  return solve_transport(a, b, store.cost_matrix(src, dst), options);
}

double rwmd(const DocumentVector& a, const DocumentVector& b, const CostMatrix& costs,
            Direction direction) {
  const SolverOptions defaults;
  check_normalized(a, defaults.normalization_tolerance, "source");
  check_normalized(b, defaults.normalization_tolerance, "target");
  check_dimensions(a, b, costs);

  const std::size_t m = a.size(), n = b.size();
  auto forward = [&] {
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < n; ++j) best = std::min(best, costs(i, j));
      total += a.entries[i].second * best;
    }
    return total;
  };
  auto backward = [&] {
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i) best = std::min(best, costs(i, j));
      total += b.entries[j].second * best;
    }
    return total;
  };
  switch (direction) {
    case Direction::kAToB:
      return forward();
    case Direction::kBToA:
      return backward();
    case Direction::kSymmetricMax:
      return std::max(forward(), backward());
  }
  return 0.0;
}

namespace {

// Union of words used by a set, in ascending embedding-row order, plus the
// reverse lookup.
struct WordUnion {
  std::vector<WordIndex> words;
  std::unordered_map<WordIndex, std::size_t> slot;
};

WordUnion word_union(const DocumentSet& set) {
  WordUnion u;
  for (const auto& v : set.vectors)
    for (const auto& [w, _] : v.entries) u.words.push_back(w);
  std::sort(u.words.begin(), u.words.end());
  u.words.erase(std::unique(u.words.begin(), u.words.end()), u.words.end());
  u.slot.reserve(u.words.size());
  for (std::size_t k = 0; k < u.words.size(); ++k) u.slot.emplace(u.words[k], k);
  return u;
}

// out(p, q) = sum_i src[p]_i * min_{j in dst[q]} cost(i, j). When
// `transpose_out`, writes out(q, p) instead. `source_is_a` keeps the cost
// call orientation as (a-word, b-word) regardless of role.
void one_sided(const DocumentSet& src, const DocumentSet& dst, const EmbeddingStore& store,
               bool source_is_a, unsigned threads, std::vector<double>& out,
               bool transpose_out) {
  const WordUnion u = word_union(src);
  const std::size_t ns = src.size(), nd = dst.size();
  std::vector<std::vector<std::size_t>> src_slots(ns);
  for (std::size_t p = 0; p < ns; ++p)
    for (const auto& [w, _] : src.vectors[p].entries) src_slots[p].push_back(u.slot.at(w));

  parallel_for(nd, threads, [&](std::size_t q) {
    const auto& target = dst.vectors[q].entries;
    std::vector<double> nearest(u.words.size());
    for (std::size_t k = 0; k < u.words.size(); ++k) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& [w, _] : target) {
        const double c = source_is_a ? store.cost(u.words[k], w) : store.cost(w, u.words[k]);
        best = std::min(best, c);
      }
      nearest[k] = best;
    }
    for (std::size_t p = 0; p < ns; ++p) {
      const auto& entries = src.vectors[p].entries;
      double total = 0.0;
      for (std::size_t e = 0; e < entries.size(); ++e)
        total += entries[e].second * nearest[src_slots[p][e]];
      if (transpose_out)
        out[q * ns + p] = total;
      else
        out[p * nd + q] = total;
    }
  });
}

}  // namespace

DistanceMatrix lc_rwmd_matrix(const DocumentSet& sa, const DocumentSet& sb,
                              const EmbeddingStore& store, Direction direction, unsigned threads) {
  if (sa.vectors.empty() || sb.vectors.empty())
    throw Error("relaxed distance matrix needs non-empty document sets");
  DistanceMatrix d;
  d.rows = sa.size();
  d.cols = sb.size();
  d.direction = direction;
  d.values.assign(d.rows * d.cols, 0.0);
  if (direction == Direction::kAToB || direction == Direction::kSymmetricMax)
    one_sided(sa, sb, store, true, threads, d.values, false);
  if (direction == Direction::kBToA) {
    one_sided(sb, sa, store, false, threads, d.values, true);
  } else if (direction == Direction::kSymmetricMax) {
    std::vector<double> back(d.values.size());
    one_sided(sb, sa, store, false, threads, back, true);
    for (std::size_t k = 0; k < back.size(); ++k) d.values[k] = std::max(d.values[k], back[k]);
  }
  return d;
}

}  // namespace wmdecomp
