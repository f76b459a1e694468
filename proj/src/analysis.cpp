#include "wmdecomp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

#include "wmdecomp/error.hpp"
#include "wmdecomp/parallel.hpp"
#include "wmdecomp/random.hpp"

namespace wmdecomp {

namespace {

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v, double mean) {
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace

TTestResult welch_t_test(std::span<const double> x, std::span<const double> y) {
  if (x.size() < 2 || y.size() < 2) throw Error("t-test needs at least two values per sample");
  const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
  const double mx = mean_of(x), my = mean_of(y);
  const double sx = sample_variance(x, mx) / nx;
  const double sy = sample_variance(y, my) / ny;
  const double se2 = sx + sy;
  if (!(se2 > 0.0)) throw Error("t-test samples both have zero variance");

  TTestResult r;
  r.t = (mx - my) / std::sqrt(se2);
  r.dof = se2 * se2 / (sx * sx / (nx - 1.0) + sy * sy / (ny - 1.0));
  const boost::math::students_t dist(r.dof);
  r.p = 2.0 * boost::math::cdf(dist, -std::abs(r.t));
  r.p = std::min(r.p, 1.0);
  return r;
}

SummaryStats summarize(std::span<const double> values) {
  SummaryStats s;
  s.n = values.size();
  if (values.empty()) return s;
  double total = 0.0;
  for (double v : values) total += v;
  s.mean = total / static_cast<double>(s.n);
  if (s.n >= 2) s.sd = std::sqrt(sample_variance(values, s.mean));
  return s;
}

Histogram histogram(std::span<const double> values, std::size_t bins) {
  if (bins == 0) throw Error("histogram needs at least one bin");
  Histogram h;
  h.counts.assign(bins, 0);
  if (values.empty()) {
    h.edges.assign(bins + 1, 0.0);
    return h;
  }
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  double hi = *hi_it;
  if (hi == lo) hi = lo + 1.0;
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t b = 0; b <= bins; ++b) h.edges.push_back(lo + width * static_cast<double>(b));
  h.edges.back() = hi;
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - lo) / width);
    ++h.counts[std::min(b, bins - 1)];
  }
  return h;
}

std::string format_histogram_csv(const Histogram& h) {
  std::ostringstream os;
  os << "bin_low,bin_high,count\n";
  char buf[96];
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,", h.edges[b], h.edges[b + 1]);
    os << buf << h.counts[b] << '\n';
  }
  return os.str();
}

std::vector<double> ComparisonReport::distances() const {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(p.distance);
  return out;
}

const WordContributionTable& ComparisonReport::table(Direction direction, bool differenced) const {
  if (direction == Direction::kAToB) return differenced ? diff_ab : raw_ab;
  if (direction == Direction::kBToA) return differenced ? diff_ba : raw_ba;
  throw Error("word tables exist only for a->b and b->a");
}

ClusterModel fit_word_clusters(const EmbeddingStore& store, std::span<const std::string> words,
                               const ClusterSpec& spec, std::uint64_t seed) {
  if (words.empty()) throw Error("no words to cluster");
  PointMatrix points;
  std::string reduction;
  if (spec.coordinates) {
    points = read_coordinates_csv(*spec.coordinates, words);
    reduction = "file";
  } else {
    std::vector<WordIndex> ids;
    ids.reserve(words.size());
    for (const auto& w : words) {
      auto id = store.find(w);
      if (!id) throw Error("word '" + w + "' is not in the embedding store");
      ids.push_back(*id);
    }
    points = reduce(embedding_points(store, ids), spec.reduction, spec.dims);
    reduction = spec.reduction == ReductionMethod::kPca ? "pca:" + std::to_string(spec.dims) : "none";
  }
  const std::size_t k = std::min(spec.k, points.rows);
  ClusterModel model = kmeans(points, k, seed, spec.max_iter);
  model.words.assign(words.begin(), words.end());
  model.reduction = reduction;
  model.index_words();
  return model;
}

namespace {

template <typename Fn>
auto staged(std::string_view stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const SolverError&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(e.what(), std::string(stage));
  }
}

std::string side_name(Side s) { return s == Side::kA ? "a" : "b"; }

}  // namespace

ComparisonReport compare_sets(const DocumentSet& sa_in, const DocumentSet& sb_in,
                              const EmbeddingStore& store, const CompareConfig& config) {
  if (sa_in.vectors.empty() || sb_in.vectors.empty())
    throw Error("document sets must be non-empty", "input");

  const DocumentSet* sa = &sa_in;
  const DocumentSet* sb = &sb_in;
  DocumentSet resized;
  if (config.method == PairingMethod::kGaleShapley && sa->size() != sb->size()) {
    if (!config.subsample_unequal)
      throw Error("stable matching needs equal set sizes (" + std::to_string(sa->size()) + " vs " +
                      std::to_string(sb->size()) + ")",
                  "pairing");
    const std::uint64_t sub_seed = derive_seed(config.seed, 1);
    if (sa->size() > sb->size()) {
      resized = subsample(*sa, sb->size(), sub_seed);
      sa = &resized;
    } else {
      resized = subsample(*sb, sa->size(), sub_seed);
      sb = &resized;
    }
  }

  ComparisonReport report;
  report.metric = std::string(to_string(store.metric()));
  report.weighting = config.weighting;
  report.pairing_method = std::string(to_string(config.method));
  report.preference_direction = std::string(to_string(config.preference_direction));
  report.suitor = side_name(config.suitor);
  report.seed = config.seed;
  report.label_a = sa->label;
  report.label_b = sb->label;
  report.size_a = sa->size();
  report.size_b = sb->size();
  report.extra_metadata = config.extra_metadata;

  PairingResult pairing = staged("pairing", [&] {
    switch (config.method) {
      case PairingMethod::kGaleShapley: {
        const DistanceMatrix prefs =
            lc_rwmd_matrix(*sa, *sb, store, config.preference_direction, config.threads);
        return gale_shapley(prefs, config.suitor);
      }
      case PairingMethod::kRandom: {
        const std::size_t count = config.random_count ? config.random_count : sa->size();
        return random_pairs(sa->size(), sb->size(), count, derive_seed(config.seed, 2));
      }
      case PairingMethod::kExternal: {
        if (!config.pairs) throw Error("external pairing requested without pairs");
        for (const auto& [i, j] : config.pairs->pairs)
          if (i >= sa->size() || j >= sb->size())
            throw Error("pair (" + std::to_string(i) + "," + std::to_string(j) + ") out of range");
        if (config.pairs->pairs.empty()) throw Error("pairs file is empty");
        return *config.pairs;
      }
    }
    throw Error("unknown pairing method");
  });
  report.pairing_seed = pairing.seed;

  WordCostAccumulator acc_ab(store, Direction::kAToB);
  WordCostAccumulator acc_ba(store, Direction::kBToA);
  report.pairs.resize(pairing.size());
  staged("solve", [&] {
    constexpr std::size_t kBatch = 512;
    std::vector<TransportPlan> plans;
    for (std::size_t start = 0; start < pairing.size(); start += kBatch) {
      const std::size_t len = std::min(kBatch, pairing.size() - start);
      plans.assign(len, {});
      parallel_for(len, config.threads, [&](std::size_t k) {
        const auto& [i, j] = pairing.pairs[start + k];
        plans[k] = solve_transport(sa->vectors[i], sb->vectors[j], store, config.solver);
      });
      // Fixed-order merge keeps reports bit-identical across thread counts.
      for (std::size_t k = 0; k < len; ++k) {
        const auto& [i, j] = pairing.pairs[start + k];
        acc_ab.add(plans[k], i);
        acc_ba.add(plans[k].transposed(), j);
        report.pairs[start + k] = {i, j, sa->vectors[i].doc_id, sb->vectors[j].doc_id,
                                   plans[k].total_cost};
      }
    }
    return 0;
  });

  const auto d = report.distances();
  report.summary = summarize(d);

  report.raw_ab = acc_ab.finish();
  report.raw_ba = acc_ba.finish();
  std::tie(report.diff_ab, report.diff_ba) =
      staged("difference", [&] { return apply_difference(report.raw_ab, report.raw_ba); });

  const ClusterSpec& spec = config.clusters;
  if (spec.source != ClusterSpec::Source::kNone) {
    staged("clusters", [&] {
      std::set<std::string> words;
      for (const auto& [w, _] : report.raw_ab.contributions) words.insert(w);
      for (const auto& [w, _] : report.raw_ba.contributions) words.insert(w);
      ClusterModel model;
      if (spec.source == ClusterSpec::Source::kModel) {
        model = spec.model;
      } else {
        const std::vector<std::string> list(words.begin(), words.end());
        model = fit_word_clusters(store, list, spec, derive_seed(config.seed, 3));
      }
      report.cluster_k = model.k;
      report.cluster_reduction = model.reduction;
      report.cluster_seed = model.seed;
      report.clusters_ab = cluster_distance(report.diff_ab, model, config.keywords_per_cluster);
      report.clusters_ba = cluster_distance(report.diff_ba, model, config.keywords_per_cluster);
      return 0;
    });
  }
  return report;
}

std::vector<CostChangeRecord> cost_change(const ComparisonReport& r0, const ComparisonReport& r1,
                                          Direction direction, bool differenced) {
  if (direction == Direction::kSymmetricMax)
    throw Error("cost change needs a one-way direction");
  if (r0.metric != r1.metric || r0.weighting != r1.weighting)
    throw Error("reports differ in metric or weighting (" + r0.metric + "/" + r0.weighting +
                " vs " + r1.metric + "/" + r1.weighting + ")");
  const auto& t0 = r0.table(direction, differenced);
  const auto& t1 = r1.table(direction, differenced);
  if (t0.direction != t1.direction) throw Error("reports have mismatched orientation");

  auto ratio = [](const WordContributionTable& a0, const WordContributionTable& a1,
                  const std::string& w) -> std::optional<double> {
    auto f0 = a0.doc_frequency.find(w);
    auto f1 = a1.doc_frequency.find(w);
    const double c0 = f0 == a0.doc_frequency.end() ? 0.0 : static_cast<double>(f0->second);
    const double c1 = f1 == a1.doc_frequency.end() ? 0.0 : static_cast<double>(f1->second);
    if (c0 == 0.0) return std::nullopt;
    return c1 / c0;
  };

  std::set<std::string> words;
  for (const auto& [w, _] : t0.contributions) words.insert(w);
  for (const auto& [w, _] : t1.contributions) words.insert(w);

  std::vector<CostChangeRecord> out;
  out.reserve(words.size());
  for (const auto& w : words) {
    CostChangeRecord rec;
    rec.word = w;
    if (auto it = t0.contributions.find(w); it != t0.contributions.end()) rec.cost_t0 = it->second;
    if (auto it = t1.contributions.find(w); it != t1.contributions.end()) rec.cost_t1 = it->second;
    rec.change = rec.cost_t1 - rec.cost_t0;
    if (rec.cost_t0 > 0.0) rec.change_pct = 100.0 * rec.change / rec.cost_t0;
    rec.freq_ratio_a = ratio(r0.raw_ab, r1.raw_ab, w);
    rec.freq_ratio_b = ratio(r0.raw_ba, r1.raw_ba, w);
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<CostChangeRecord> assimilation_filter(std::span<const CostChangeRecord> records,
                                                  double min_freq_ratio_a,
                                                  double min_freq_ratio_b, double min_t0_cost) {
  if (min_freq_ratio_a < 0.0 || min_freq_ratio_b < 0.0)
    throw Error("frequency ratio thresholds must be non-negative");
  std::vector<CostChangeRecord> out;
  for (const auto& r : records) {
    if (!r.change_pct || *r.change_pct >= 0.0) continue;
    if (!r.freq_ratio_a || *r.freq_ratio_a < min_freq_ratio_a) continue;
    if (!r.freq_ratio_b || *r.freq_ratio_b < min_freq_ratio_b) continue;
    if (r.cost_t0 < min_t0_cost) continue;
    out.push_back(r);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    if (*x.change_pct != *y.change_pct) return *x.change_pct < *y.change_pct;
    return x.word < y.word;
  });
  return out;
}

double cost_t0_percentile(std::span<const CostChangeRecord> records, double percentile) {
  if (records.empty()) return 0.0;
  std::vector<double> v;
  v.reserve(records.size());
  for (const auto& r : records) v.push_back(r.cost_t0);
  std::sort(v.begin(), v.end());
  const double pos = std::clamp(percentile, 0.0, 100.0) / 100.0 * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

}  // namespace

std::string format_cost_changes_csv(std::span<const CostChangeRecord> records) {
  std::ostringstream os;
  os << "word,cost_t0,cost_t1,change,change_pct,freq_ratio_a,freq_ratio_b\n";
  for (const auto& r : records)
    os << r.word << ',' << num(r.cost_t0) << ',' << num(r.cost_t1) << ',' << num(r.change) << ','
       << opt_num(r.change_pct) << ',' << opt_num(r.freq_ratio_a) << ','
       << opt_num(r.freq_ratio_b) << '\n';
  return os.str();
}

std::string format_change_rows(std::span<const CostChangeRecord> records) {
  std::ostringstream os;
  char buf[40];
  for (const auto& r : records) {
    if (r.change_pct)
      std::snprintf(buf, sizeof buf, "%.1f", *r.change_pct);
    else
      std::snprintf(buf, sizeof buf, "null");
    os << r.word << ' ' << buf << '\n';
  }
  return os.str();
}

}  // namespace wmdecomp
