#include "wmdecomp/decomposition.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "wmdecomp/error.hpp"

namespace wmdecomp {

double WordContributionTable::total() const {
  double s = 0.0;
  for (const auto& [_, v] : contributions) s += v;
  return s;
}

double ClusterDistanceTable::total() const {
  double s = 0.0;
  for (const auto& c : clusters) s += c.distance;
  return s;
}

std::vector<ClusterContribution> ClusterDistanceTable::ranked() const {
  std::vector<ClusterContribution> out = clusters;
  std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    if (x.distance != y.distance) return x.distance > y.distance;
    return x.cluster < y.cluster;
  });
  return out;
}

WordCostAccumulator::WordCostAccumulator(const EmbeddingStore& store, Direction direction)
    : store_(&store), direction_(direction), acc_(store.size(), 0.0), docs_(store.size()) {
  if (direction == Direction::kSymmetricMax)
    throw Error("word contributions need a one-way direction");
}

void WordCostAccumulator::add(const TransportPlan& plan, std::size_t source_doc) {
  const std::size_t n = plan.num_cols();
  if (plan.flows.size() != plan.num_rows() * n) throw Error("malformed transport plan");
  for (std::size_t i = 0; i < plan.num_rows(); ++i) {
    const WordIndex w = plan.src_indices[i];
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double f = plan.flows[i * n + j];
      if (f != 0.0) row += f * store_->cost(w, plan.dst_indices[j]);
    }
    if (docs_[w].empty()) order_.push_back(w);
    acc_[w] += row;
    docs_[w].push_back(source_doc);
  }
  pair_total_ += plan.total_cost;
  ++pairs_;
}

WordContributionTable WordCostAccumulator::finish() const {
  WordContributionTable table;
  table.direction = direction_;
  table.pair_count = pairs_;
  table.pair_total = pair_total_;
  for (WordIndex w : order_) {
    table.contributions.emplace(store_->word(w), acc_[w]);
    auto d = docs_[w];
    std::sort(d.begin(), d.end());
    const auto distinct = static_cast<std::size_t>(std::unique(d.begin(), d.end()) - d.begin());
    table.doc_frequency.emplace(store_->word(w), distinct);
  }
  return table;
}

WordContributionTable accumulate_word_costs(const PairingResult& pairs,
                                            std::span<const TransportPlan> plans,
                                            Direction direction, const EmbeddingStore& store) {
  if (plans.size() != pairs.pairs.size())
    throw Error("got " + std::to_string(plans.size()) + " plans for " +
                std::to_string(pairs.pairs.size()) + " pairs");
  WordCostAccumulator acc(store, direction);
  for (std::size_t p = 0; p < plans.size(); ++p) {
    const auto& [a, b] = pairs.pairs[p];
    acc.add(plans[p], direction == Direction::kAToB ? a : b);
  }
  return acc.finish();
}

std::pair<WordContributionTable, WordContributionTable> apply_difference(
    const WordContributionTable& table_a, const WordContributionTable& table_b) {
  if (table_a.direction == table_b.direction)
    throw Error("differencing needs tables from opposite directions");
  if (table_a.differenced || table_b.differenced) throw Error("table is already differenced");
  WordContributionTable out_a = table_a, out_b = table_b;
  for (auto& [word, value] : out_a.contributions) {
    auto it = table_b.contributions.find(word);
    if (it != table_b.contributions.end()) value = table_a.contributions.at(word) - it->second;
  }
  for (auto& [word, value] : out_b.contributions) {
    auto it = table_a.contributions.find(word);
    if (it != table_a.contributions.end()) value = table_b.contributions.at(word) - it->second;
  }
  out_a.differenced = out_b.differenced = true;
  return {std::move(out_a), std::move(out_b)};
}

namespace {

bool ranks_before(const std::pair<std::string, double>& x, const std::pair<std::string, double>& y) {
  if (x.second != y.second) return x.second > y.second;
  return x.first < y.first;
}

}  // namespace

ClusterDistanceTable cluster_distance(const WordContributionTable& table,
                                      const ClusterModel& clusters,
                                      std::size_t keywords_per_cluster) {
  ClusterDistanceTable out;
  out.direction = table.direction;
  std::vector<RankedWords> members(clusters.k);
  // contributions is a std::map, so each cluster sums its words in word order.
  for (const auto& [word, value] : table.contributions) {
    auto c = clusters.cluster_of(word);
    if (!c) throw Error("word '" + word + "' has no cluster assignment");
    if (static_cast<std::size_t>(*c) >= members.size()) members.resize(static_cast<std::size_t>(*c) + 1);
    members[static_cast<std::size_t>(*c)].emplace_back(word, value);
  }
  out.clusters.reserve(members.size());
  for (std::size_t c = 0; c < members.size(); ++c) {
    ClusterContribution entry;
    entry.cluster = static_cast<int>(c);
    for (const auto& [_, v] : members[c]) entry.distance += v;
    auto& words = members[c];
    const std::size_t k = std::min(keywords_per_cluster, words.size());
    std::partial_sort(words.begin(), words.begin() + static_cast<std::ptrdiff_t>(k), words.end(),
                      ranks_before);
    entry.keywords.assign(words.begin(), words.begin() + static_cast<std::ptrdiff_t>(k));
    out.clusters.push_back(std::move(entry));
  }
  return out;
}

RankedWords top_words(const WordContributionTable& table, std::size_t k) {
  RankedWords all(table.contributions.begin(), table.contributions.end());
  k = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(),
                    ranks_before);
  all.resize(k);
  return all;
}

std::string format_top_words(const RankedWords& words) {
  std::ostringstream os;
  char buf[64];
  for (const auto& [word, cost] : words) {
    std::snprintf(buf, sizeof buf, "%.2f", cost);
    os << word << ' ' << buf << '\n';
  }
  return os.str();
}

std::string format_word_table_csv(const WordContributionTable& table,
                                  const ClusterModel* clusters) {
  std::ostringstream os;
  os << (clusters ? "word,cost,cluster\n" : "word,cost\n");
  char buf[64];
  for (const auto& [word, cost] : table.contributions) {
    std::snprintf(buf, sizeof buf, "%.17g", cost);
    os << word << ',' << buf;
    if (clusters) {
      auto c = clusters->cluster_of(word);
      os << ',';
      if (c) os << *c;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace wmdecomp
