// wmdecomp: compare two document sets with decomposed Word Mover's Distance.
//
//   wmdecomp pair      build document pairs (stable matching or random)
//   wmdecomp compare   full comparison report (JSON)
//   wmdecomp clusters  cluster embedding words, optionally scanning k
//   wmdecomp diff-time word cost changes between two reports

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wmdecomp/wmdecomp.hpp"

namespace {

using namespace wmdecomp;

struct IngestOptions {
  std::string set_a, set_b, embeddings;
  std::string embedding_format = "auto";
  std::string corpus_format = "auto";
  std::string metric = "cosine";
  std::string weighting = "nbow";
  std::string idf_scope = "union";
  std::string label_a, label_b;
  std::size_t min_count = 1;
  std::size_t min_length = 0;
  std::size_t sample_size = 0;
  std::string stats_path;
};

struct Ingested {
  EmbeddingStore store;
  DocumentSet a, b;
  IngestStats stats_a, stats_b;
};

void add_ingest_options(CLI::App* app, IngestOptions& o) {
  app->add_option("--set-a", o.set_a, "First document set (JSONL or plain text)")->required();
  app->add_option("--set-b", o.set_b, "Second document set")->required();
  app->add_option("--embeddings", o.embeddings, "Word vectors in text format")->required();
  app->add_option("--embedding-format", o.embedding_format, "auto|text|header")
      ->check(CLI::IsMember({"auto", "text", "header"}));
  app->add_option("--corpus-format", o.corpus_format, "auto|jsonl|text")
      ->check(CLI::IsMember({"auto", "jsonl", "text"}));
  app->add_option("--metric", o.metric, "cosine|euclidean")
      ->check(CLI::IsMember({"cosine", "euclidean"}));
  app->add_option("--weighting", o.weighting, "nbow|tfidf")->check(CLI::IsMember({"nbow", "tfidf"}));
  app->add_option("--idf-scope", o.idf_scope, "union|per-set")
      ->check(CLI::IsMember({"union", "per-set"}));
  app->add_option("--label-a", o.label_a, "Label for the first set (default: file stem)");
  app->add_option("--label-b", o.label_b, "Label for the second set");
  app->add_option("--min-count", o.min_count, "Drop words rarer than this over both sets");
  app->add_option("--min-length", o.min_length, "Drop documents with fewer tokens");
  app->add_option("--sample-size", o.sample_size, "Sample this many documents per set (0 = all)");
  app->add_option("--stats", o.stats_path, "Write ingest statistics here instead of stderr");
}

EmbeddingFormat embedding_format(const std::string& s) {
  if (s == "text") return EmbeddingFormat::kText;
  if (s == "header") return EmbeddingFormat::kTextWithHeader;
  return EmbeddingFormat::kAuto;
}

Ingested ingest(const IngestOptions& o, std::uint64_t seed) {
  EmbeddingStore store = load_embeddings(o.embeddings, embedding_format(o.embedding_format),
                                         parse_metric(o.metric));
  const auto fmt = parse_corpus_format(o.corpus_format);
  auto docs_a = read_corpus(o.set_a, fmt);
  auto docs_b = read_corpus(o.set_b, fmt);
  if (docs_a.empty() || docs_b.empty()) throw Error("document set is empty", "ingest");
  if (o.min_length > 0 || o.sample_size > 0) {
    auto prepare = [&](std::vector<TokenizedDocument>& docs, std::uint64_t stream) {
      std::size_t eligible = 0;
      for (const auto& d : docs) eligible += d.tokens.size() >= o.min_length;
      const std::size_t size = o.sample_size ? o.sample_size : eligible;
      docs = filter_and_sample(docs, o.min_length, size, derive_seed(seed, stream));
    };
    prepare(docs_a, 10);
    prepare(docs_b, 11);
  }

  std::vector<TokenizedDocument> all(docs_a);
  all.insert(all.end(), docs_b.begin(), docs_b.end());
  const Vocabulary vocab = build_vocabulary(all, store, o.min_count);
  const Weighting weighting = parse_weighting(o.weighting);

  Ingested out{std::move(store), {}, {}, {}, {}};
  auto label = [](const std::string& given, const std::string& path) {
    return given.empty() ? std::filesystem::path(path).stem().string() : given;
  };
  if (weighting == Weighting::kTfidf && o.idf_scope == "per-set") {
    const IdfTable ia = idf(vocab, docs_a), ib = idf(vocab, docs_b);
    out.a = vectorize_all(label(o.label_a, o.set_a), docs_a, vocab, weighting, &ia, &out.stats_a);
    out.b = vectorize_all(label(o.label_b, o.set_b), docs_b, vocab, weighting, &ib, &out.stats_b);
  } else {
    const IdfTable table = idf(vocab, all);
    out.a = vectorize_all(label(o.label_a, o.set_a), docs_a, vocab, weighting, &table, &out.stats_a);
    out.b = vectorize_all(label(o.label_b, o.set_b), docs_b, vocab, weighting, &table, &out.stats_b);
  }
  if (out.a.vectors.empty() || out.b.vectors.empty())
    throw Error("no document survived vocabulary filtering", "ingest");

  std::ostringstream msg;
  msg << "vocabulary=" << vocab.size() << "\nset_a " << out.stats_a.to_string() << "\nset_b "
      << out.stats_b.to_string() << '\n';
  if (o.stats_path.empty()) {
    std::cerr << msg.str();
  } else {
    std::ofstream(o.stats_path) << msg.str();
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

// Parses `none`, `pca:D` or `file:coords.csv` into `spec`.
void parse_reduce(const std::string& text, ClusterSpec& spec) {
  if (text == "none") {
    spec.reduction = ReductionMethod::kNone;
  } else if (text.rfind("pca:", 0) == 0) {
    spec.reduction = ReductionMethod::kPca;
    spec.dims = std::stoul(text.substr(4));
  } else if (text.rfind("file:", 0) == 0) {
    spec.coordinates = text.substr(5);
  } else {
    throw Error("--reduce expects none, pca:D or file:PATH");
  }
}

std::vector<std::size_t> parse_scan(const std::string& text) {
  std::vector<std::size_t> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(std::stoul(item));
  if (parts.size() != 3 || parts[2] == 0 || parts[0] == 0 || parts[0] > parts[1])
    throw Error("--scan expects START:STOP:STEP");
  std::vector<std::size_t> ks;
  for (std::size_t k = parts[0]; k <= parts[1]; k += parts[2]) ks.push_back(k);
  return ks;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decomposed Word Mover's Distance between two document sets"};
  app.require_subcommand(1);

  // pair
  IngestOptions pair_in;
  std::string pair_method = "gs", pair_direction = "ab", pair_suitor = "a", pair_out;
  std::uint64_t pair_seed = 0;
  std::size_t pair_count = 0;
  bool pair_subsample = false;
  unsigned pair_threads = 0;
  auto* pair = app.add_subcommand("pair", "Pair documents across the two sets");
  add_ingest_options(pair, pair_in);
  pair->add_option("--method", pair_method, "gs|random")->check(CLI::IsMember({"gs", "random"}));
  pair->add_option("--direction", pair_direction, "Relaxed-bound direction for preferences: ab|ba|max")
      ->check(CLI::IsMember({"ab", "ba", "max"}));
  pair->add_option("--suitor", pair_suitor, "Proposing side: a|b")->check(CLI::IsMember({"a", "b"}));
  pair->add_option("--count", pair_count, "Random pairs to draw (default |A|)");
  pair->add_option("--seed", pair_seed, "Seed for sampling and random pairing");
  pair->add_flag("--subsample", pair_subsample, "Subsample the larger set to equal size");
  pair->add_option("--threads", pair_threads, "Worker threads (0 = all cores)");
  pair->add_option("--out", pair_out, "Pairs CSV (default stdout)");

  // compare
  IngestOptions cmp_in;
  std::string cmp_method = "gs", cmp_pairs, cmp_direction = "ab", cmp_suitor = "a";
  std::string cmp_clusters, cmp_reduce = "none", cmp_out, cmp_hist, cmp_tables;
  std::size_t cmp_kmeans = 100, cmp_keywords = 10, cmp_count = 0, cmp_bins = 20;
  std::uint64_t cmp_seed = 0;
  bool cmp_subsample = false, cmp_no_clusters = false;
  unsigned cmp_threads = 0;
  auto* compare = app.add_subcommand("compare", "Decompose the distance between the two sets");
  add_ingest_options(compare, cmp_in);
  auto* pairs_opt = compare->add_option("--pairs", cmp_pairs, "Use pairs from a CSV written by `pair`");
  compare->add_option("--method", cmp_method, "gs|random")
      ->check(CLI::IsMember({"gs", "random"}))
      ->excludes(pairs_opt);
  compare->add_option("--direction", cmp_direction, "Relaxed-bound direction for preferences")
      ->check(CLI::IsMember({"ab", "ba", "max"}));
  compare->add_option("--suitor", cmp_suitor, "Proposing side: a|b")->check(CLI::IsMember({"a", "b"}));
  compare->add_option("--count", cmp_count, "Random pairs to draw (default |A|)");
  auto* clusters_opt = compare->add_option("--clusters", cmp_clusters, "Cluster assignments CSV");
  compare->add_option("--kmeans", cmp_kmeans, "Fit K clusters over the compared words")
      ->excludes(clusters_opt);
  compare->add_flag("--no-clusters", cmp_no_clusters, "Skip cluster tables");
  compare->add_option("--reduce", cmp_reduce, "none | pca:D | file:coords.csv");
  compare->add_option("--keywords", cmp_keywords, "Keywords listed per cluster");
  compare->add_option("--seed", cmp_seed, "Seed for every random step");
  compare->add_flag("--subsample", cmp_subsample, "Subsample the larger set to equal size");
  compare->add_option("--threads", cmp_threads, "Worker threads (0 = all cores)");
  compare->add_option("--hist", cmp_hist, "Write a pair-distance histogram CSV");
  compare->add_option("--bins", cmp_bins, "Histogram bins");
  compare->add_option("--tables-dir", cmp_tables, "Also write word and cluster CSV tables here");
  compare->add_option("--out", cmp_out, "Report JSON (default stdout)");

  // clusters
  std::string cl_embeddings, cl_format = "auto", cl_reduce = "none", cl_scan, cl_scan_out, cl_out;
  std::size_t cl_k = 100, cl_max_iter = 300, cl_sil_sample = 2000;
  std::uint64_t cl_seed = 0;
  auto* clusters = app.add_subcommand("clusters", "Cluster embedding words with k-means");
  clusters->add_option("--embeddings", cl_embeddings, "Word vectors in text format")->required();
  clusters->add_option("--embedding-format", cl_format, "auto|text|header")
      ->check(CLI::IsMember({"auto", "text", "header"}));
  clusters->add_option("--kmeans", cl_k, "Number of clusters");
  clusters->add_option("--reduce", cl_reduce, "none | pca:D | file:coords.csv");
  clusters->add_option("--scan", cl_scan, "Elbow/silhouette scan START:STOP:STEP");
  clusters->add_option("--scan-out", cl_scan_out, "Scan CSV (default stdout)");
  clusters->add_option("--silhouette-sample", cl_sil_sample, "Points scored per silhouette (0 = all)");
  clusters->add_option("--max-iter", cl_max_iter, "Lloyd iteration cap");
  clusters->add_option("--seed", cl_seed, "Seed");
  clusters->add_option("--out", cl_out, "Assignments CSV (word,cluster)");

  // diff-time
  std::string dt_t0, dt_t1, dt_direction = "ab", dt_out, dt_filtered, dt_hist;
  double dt_ratio = 0.5, dt_percentile = 90.0;
  std::optional<double> dt_ratio_a, dt_ratio_b, dt_min_cost;
  std::size_t dt_bins = 20;
  bool dt_raw = false;
  auto* diff = app.add_subcommand("diff-time", "Per-word cost change between two reports");
  diff->add_option("--report-t0", dt_t0, "Earlier report")->required();
  diff->add_option("--report-t1", dt_t1, "Later report")->required();
  diff->add_option("--direction", dt_direction, "ab|ba")->check(CLI::IsMember({"ab", "ba"}));
  diff->add_flag("--raw", dt_raw, "Use word tables before differencing");
  diff->add_option("--min-freq-ratio", dt_ratio, "Doc-frequency ratio floor for both sets");
  diff->add_option("--min-freq-ratio-a", dt_ratio_a, "Override the floor for set A");
  diff->add_option("--min-freq-ratio-b", dt_ratio_b, "Override the floor for set B");
  diff->add_option("--min-t0-cost", dt_min_cost, "t0 cost floor (default: percentile below)");
  diff->add_option("--cost-percentile", dt_percentile, "Percentile of t0 costs used as floor");
  diff->add_option("--out", dt_out, "All change records CSV (default stdout)");
  diff->add_option("--filtered", dt_filtered, "Words passing the assimilation filter");
  diff->add_option("--hist", dt_hist, "Histogram CSV of absolute cost changes");
  diff->add_option("--bins", dt_bins, "Histogram bins");

  CLI11_PARSE(app, argc, argv);

  try {
    if (pair->parsed()) {
      Ingested in = ingest(pair_in, pair_seed);
      DocumentSet a = std::move(in.a), b = std::move(in.b);
      PairingResult result;
      if (pair_method == "gs") {
        if (a.size() != b.size()) {
          if (!pair_subsample)
            throw Error("sets differ in size (" + std::to_string(a.size()) + " vs " +
                        std::to_string(b.size()) + "); pass --subsample");
          const auto s = derive_seed(pair_seed, 1);
          if (a.size() > b.size()) a = subsample(a, b.size(), s);
          else b = subsample(b, a.size(), s);
        }
        const auto prefs = lc_rwmd_matrix(a, b, in.store, parse_direction(pair_direction), pair_threads);
        result = gale_shapley(prefs, pair_suitor == "a" ? Side::kA : Side::kB);
        result.seed = pair_seed;
      } else {
        result = random_pairs(a.size(), b.size(), pair_count ? pair_count : a.size(),
                              derive_seed(pair_seed, 2));
      }
      write_text(pair_out, format_pairs_csv(result));
    } else if (compare->parsed()) {
      Ingested in = ingest(cmp_in, cmp_seed);
      CompareConfig cfg;
      cfg.weighting = cmp_in.weighting;
      cfg.seed = cmp_seed;
      cfg.threads = cmp_threads;
      cfg.subsample_unequal = cmp_subsample;
      cfg.preference_direction = parse_direction(cmp_direction);
      cfg.suitor = cmp_suitor == "a" ? Side::kA : Side::kB;
      cfg.random_count = cmp_count;
      cfg.keywords_per_cluster = cmp_keywords;
      if (!cmp_pairs.empty()) {
        cfg.method = PairingMethod::kExternal;
        cfg.pairs = read_pairs_csv(cmp_pairs);
      } else {
        cfg.method = parse_pairing_method(cmp_method);
      }
      if (cmp_no_clusters) {
        cfg.clusters.source = ClusterSpec::Source::kNone;
      } else if (!cmp_clusters.empty()) {
        cfg.clusters.source = ClusterSpec::Source::kModel;
        cfg.clusters.model = read_clusters_csv(cmp_clusters);
      } else {
        cfg.clusters.source = ClusterSpec::Source::kKmeans;
        cfg.clusters.k = cmp_kmeans;
        parse_reduce(cmp_reduce, cfg.clusters);
      }
      cfg.extra_metadata = {{"idf_scope", cmp_in.idf_scope},
                            {"min_count", std::to_string(cmp_in.min_count)},
                            {"min_length", std::to_string(cmp_in.min_length)},
                            {"sample_size", std::to_string(cmp_in.sample_size)},
                            {"ingest_a", in.stats_a.to_string()},
                            {"ingest_b", in.stats_b.to_string()}};

      const ComparisonReport report = compare_sets(in.a, in.b, in.store, cfg);
      write_text(cmp_out, report_to_json(report));
      if (!cmp_hist.empty())
        write_text(cmp_hist, format_histogram_csv(histogram(report.distances(), cmp_bins)));
      if (!cmp_tables.empty()) {
        std::filesystem::create_directories(cmp_tables);
        const std::filesystem::path dir(cmp_tables);
        write_text((dir / "words_ab.csv").string(), format_word_table_csv(report.diff_ab));
        write_text((dir / "words_ba.csv").string(), format_word_table_csv(report.diff_ba));
        write_text((dir / "top_words_ab.txt").string(), format_top_words(top_words(report.diff_ab, 50)));
        write_text((dir / "top_words_ba.txt").string(), format_top_words(top_words(report.diff_ba, 50)));
        auto cluster_csv = [](const ClusterDistanceTable& t) {
          std::ostringstream os;
          os << "cluster,distance,keywords\n";
          char buf[40];
          for (const auto& c : t.ranked()) {
            std::snprintf(buf, sizeof buf, "%.17g", c.distance);
            os << c.cluster << ',' << buf << ',';
            for (std::size_t i = 0; i < c.keywords.size(); ++i) os << (i ? " " : "") << c.keywords[i].first;
            os << '\n';
          }
          return os.str();
        };
        if (report.clusters_ab) {
          write_text((dir / "clusters_ab.csv").string(), cluster_csv(*report.clusters_ab));
          write_text((dir / "clusters_ba.csv").string(), cluster_csv(*report.clusters_ba));
        }
      }
    } else if (clusters->parsed()) {
      const EmbeddingStore store = load_embeddings(cl_embeddings, embedding_format(cl_format));
      ClusterSpec spec;
      spec.k = cl_k;
      spec.max_iter = cl_max_iter;
      parse_reduce(cl_reduce, spec);
      if (!cl_scan.empty()) {
        PointMatrix points = spec.coordinates
                                 ? read_coordinates_csv(*spec.coordinates, store.words())
                                 : reduce(embedding_points(store), spec.reduction, spec.dims);
        const auto ks = parse_scan(cl_scan);
        const auto rows = elbow_scan(points, ks, cl_seed, cl_max_iter, cl_sil_sample);
        std::ostringstream os;
        os << "k,inertia,silhouette\n";
        char buf[80];
        for (const auto& r : rows) {
          std::snprintf(buf, sizeof buf, "%zu,%.17g,", r.k, r.inertia);
          os << buf;
          if (r.silhouette) {
            std::snprintf(buf, sizeof buf, "%.17g", *r.silhouette);
            os << buf;
          }
          os << '\n';
        }
        write_text(cl_scan_out, os.str());
      }
      if (!cl_out.empty() || cl_scan.empty()) {
        const ClusterModel model = fit_word_clusters(store, store.words(), spec, cl_seed);
        write_text(cl_out, format_clusters_csv(model));
      }
    } else if (diff->parsed()) {
      const ComparisonReport r0 = read_report(dt_t0);
      const ComparisonReport r1 = read_report(dt_t1);
      const auto records = cost_change(r0, r1, parse_direction(dt_direction), !dt_raw);
      write_text(dt_out, format_cost_changes_csv(records));
      if (!dt_filtered.empty()) {
        const double floor = dt_min_cost ? *dt_min_cost : cost_t0_percentile(records, dt_percentile);
        const auto kept = assimilation_filter(records, dt_ratio_a.value_or(dt_ratio),
                                              dt_ratio_b.value_or(dt_ratio), floor);
        write_text(dt_filtered, format_cost_changes_csv(kept));
      }
      if (!dt_hist.empty()) {
        std::vector<double> changes;
        for (const auto& r : records) changes.push_back(r.change);
        write_text(dt_hist, format_histogram_csv(histogram(changes, dt_bins)));
      }
    }
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << '\n' << e.instance_dump();
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
