#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wmdecomp/clustering.hpp"
#include "wmdecomp/corpus_model.hpp"
#include "wmdecomp/decomposition.hpp"
#include "wmdecomp/embedding_store.hpp"
#include "wmdecomp/ot_solver.hpp"
#include "wmdecomp/pairing.hpp"

namespace wmdecomp {

struct TTestResult {
  double t = 0.0;
  double dof = 0.0;
  double p = 1.0;  // two-sided
};

// Welch's unequal-variance t-test with Welch-Satterthwaite degrees of freedom.
TTestResult welch_t_test(std::span<const double> x, std::span<const double> y);

struct SummaryStats {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation (n - 1); 0 when n < 2
  std::size_t n = 0;
};

SummaryStats summarize(std::span<const double> values);

struct Histogram {
  std::vector<double> edges;  // bins + 1
  std::vector<std::size_t> counts;
};

// Equal-width bins over [min, max] of the data; the last bin is closed.
Histogram histogram(std::span<const double> values, std::size_t bins);
std::string format_histogram_csv(const Histogram& h);

// Where cluster assignments for a comparison come from.
struct ClusterSpec {
  enum class Source { kNone, kModel, kKmeans };
  Source source = Source::kKmeans;
  ClusterModel model;  // kModel
  std::size_t k = 100;
  ReductionMethod reduction = ReductionMethod::kNone;
  std::size_t dims = 2;
  std::optional<std::filesystem::path> coordinates;  // externally reduced points
  std::size_t max_iter = 300;
};

struct CompareConfig {
  std::string weighting = "nbow";  // recorded in the report only
  PairingMethod method = PairingMethod::kGaleShapley;
  std::optional<PairingResult> pairs;  // kExternal
  Direction preference_direction = Direction::kAToB;
  Side suitor = Side::kA;
  std::size_t random_count = 0;  // 0 selects |S^a|
  std::uint64_t seed = 0;
  bool subsample_unequal = false;
  ClusterSpec clusters;
  std::size_t keywords_per_cluster = 10;
  unsigned threads = 1;
  SolverOptions solver;
  std::map<std::string, std::string> extra_metadata;
};

struct PairDistance {
  std::size_t a = 0;
  std::size_t b = 0;
  std::string a_id;
  std::string b_id;
  double distance = 0.0;
};

struct ComparisonReport {
  // Run metadata.
  std::string metric;
  std::string weighting;
  std::string pairing_method;
  std::string preference_direction;
  std::string suitor;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> pairing_seed;
  std::string label_a;
  std::string label_b;
  std::size_t size_a = 0;
  std::size_t size_b = 0;
  std::size_t cluster_k = 0;
  std::string cluster_reduction;
  std::uint64_t cluster_seed = 0;
  std::map<std::string, std::string> extra_metadata;

  std::vector<PairDistance> pairs;
  SummaryStats summary;

  WordContributionTable raw_ab, raw_ba;
  WordContributionTable diff_ab, diff_ba;
  std::optional<ClusterDistanceTable> clusters_ab, clusters_ba;

  std::vector<double> distances() const;
  const WordContributionTable& table(Direction direction, bool differenced) const;
};

// Relaxed-bound preferences -> pairing -> exact solves -> word tables in both
// directions -> differencing -> cluster tables. Deterministic given the config.
ComparisonReport compare_sets(const DocumentSet& sa, const DocumentSet& sb,
                              const EmbeddingStore& store, const CompareConfig& config);

// Fits word clusters for the given words according to `spec`.
ClusterModel fit_word_clusters(const EmbeddingStore& store, std::span<const std::string> words,
                               const ClusterSpec& spec, std::uint64_t seed);

constexpr int kReportSchemaVersion = 1;

std::string report_to_json(const ComparisonReport& report);
ComparisonReport report_from_json(std::string_view text);
void write_report(const std::filesystem::path& path, const ComparisonReport& report);
ComparisonReport read_report(const std::filesystem::path& path);

struct CostChangeRecord {
  std::string word;
  double cost_t0 = 0.0;
  double cost_t1 = 0.0;
  double change = 0.0;                      // cost_t1 - cost_t0
  std::optional<double> change_pct;         // null when cost_t0 <= 0
  std::optional<double> freq_ratio_a;       // doc frequency t1 / t0 in S^a, null when t0 is 0
  std::optional<double> freq_ratio_b;       // same for S^b
};

// One record per word in either report's table for `direction`.
std::vector<CostChangeRecord> cost_change(const ComparisonReport& report_t0,
                                          const ComparisonReport& report_t1,
                                          Direction direction, bool differenced = true);

// Keeps words that lost distance while staying in use on both sides:
// change_pct < 0, both frequency ratios at or above their thresholds, and
// cost_t0 >= min_t0_cost. Sorted by change_pct ascending.
std::vector<CostChangeRecord> assimilation_filter(std::span<const CostChangeRecord> records,
                                                  double min_freq_ratio_a,
                                                  double min_freq_ratio_b, double min_t0_cost);

// Linear-interpolated percentile (0-100) of cost_t0 over the records.
double cost_t0_percentile(std::span<const CostChangeRecord> records, double percentile);

std::string format_cost_changes_csv(std::span<const CostChangeRecord> records);
// `word -99.2` rows.
std::string format_change_rows(std::span<const CostChangeRecord> records);

}  // namespace wmdecomp
