#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wmdecomp/clustering.hpp"
#include "wmdecomp/embedding_store.hpp"
#include "wmdecomp/ot_solver.hpp"
#include "wmdecomp/pairing.hpp"

namespace wmdecomp {

// Aggregate distance moved by each source word over all pairs of one
// direction. After `apply_difference`, values are signed.
struct WordContributionTable {
  Direction direction = Direction::kAToB;
  std::map<std::string, double> contributions;
  std::map<std::string, std::size_t> doc_frequency;  // distinct source docs containing the word
  std::size_t pair_count = 0;
  double pair_total = 0.0;  // sum of per-pair WMD totals
  bool differenced = false;

  double total() const;
};

using RankedWords = std::vector<std::pair<std::string, double>>;

struct ClusterContribution {
  int cluster = 0;
  double distance = 0.0;  // sum of member word contributions
  RankedWords keywords;
};

struct ClusterDistanceTable {
  Direction direction = Direction::kAToB;
  std::vector<ClusterContribution> clusters;  // ordered by cluster id

  double total() const;
  // Clusters by distance, descending; ties by lower id.
  std::vector<ClusterContribution> ranked() const;
};

// Streaming form of `accumulate_word_costs`: feed plans in pair order.
class WordCostAccumulator {
 public:
  WordCostAccumulator(const EmbeddingStore& store, Direction direction);

  void add(const TransportPlan& plan, std::size_t source_doc);
  WordContributionTable finish() const;

 private:
  const EmbeddingStore* store_;
  Direction direction_;
  std::size_t pairs_ = 0;
  double pair_total_ = 0.0;
  std::vector<double> acc_;
  std::vector<WordIndex> order_;
  std::vector<std::vector<std::size_t>> docs_;  // per word, source doc of every pair
};

// Sums flow(w -> j) * cost(w, j) for each source word w over every pair.
// `plans[k]` belongs to `pairs.pairs[k]` and is oriented from the direction's
// origin set. Accumulation order is (pair, source word, target word).
WordContributionTable accumulate_word_costs(const PairingResult& pairs,
                                            std::span<const TransportPlan> plans,
                                            Direction direction, const EmbeddingStore& store);

// Subtracts each shared word's aggregate from the opposite direction's;
// words present on only one side pass through unchanged.
std::pair<WordContributionTable, WordContributionTable> apply_difference(
    const WordContributionTable& table_a, const WordContributionTable& table_b);

ClusterDistanceTable cluster_distance(const WordContributionTable& table,
                                      const ClusterModel& clusters,
                                      std::size_t keywords_per_cluster);

// k largest contributions, descending, ties by word.
RankedWords top_words(const WordContributionTable& table, std::size_t k);

// `word cost` rows with two decimals.
std::string format_top_words(const RankedWords& words);

// `word,cost[,cluster]` rows.
std::string format_word_table_csv(const WordContributionTable& table,
                                  const ClusterModel* clusters = nullptr);

}  // namespace wmdecomp
