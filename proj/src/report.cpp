#include <fstream>
#include <sstream>

#include <json.hpp>

#include "wmdecomp/analysis.hpp"
#include "wmdecomp/error.hpp"

namespace wmdecomp {

using nlohmann::json;

namespace {

json word_table_json(const WordContributionTable& raw, const WordContributionTable& diff) {
  json words = json::object();
  for (const auto& [w, v] : raw.contributions) {
    words[w] = {{"raw", v},
                {"differenced", diff.contributions.at(w)},
                {"doc_frequency", raw.doc_frequency.at(w)}};
  }
  return {{"direction", std::string(to_string(raw.direction))},
          {"pair_count", raw.pair_count},
          {"pair_total", raw.pair_total},
          {"raw_total", raw.total()},
          {"words", std::move(words)}};
}

void word_table_from_json(const json& j, Direction direction, WordContributionTable& raw,
                          WordContributionTable& diff) {
  raw = {};
  raw.direction = direction;
  raw.pair_count = j.at("pair_count").get<std::size_t>();
  raw.pair_total = j.at("pair_total").get<double>();
  diff = raw;
  diff.differenced = true;
  for (const auto& [w, entry] : j.at("words").items()) {
    raw.contributions[w] = entry.at("raw").get<double>();
    diff.contributions[w] = entry.at("differenced").get<double>();
    const auto df = entry.at("doc_frequency").get<std::size_t>();
    raw.doc_frequency[w] = df;
    diff.doc_frequency[w] = df;
  }
}

json cluster_table_json(const ClusterDistanceTable& t) {
  json out = json::array();
  for (const auto& c : t.clusters) {
    json kw = json::array();
    for (const auto& [w, v] : c.keywords) kw.push_back({w, v});
    out.push_back({{"cluster", c.cluster}, {"distance", c.distance}, {"keywords", std::move(kw)}});
  }
  return out;
}

ClusterDistanceTable cluster_table_from_json(const json& j, Direction direction) {
  ClusterDistanceTable t;
  t.direction = direction;
  for (const auto& c : j) {
    ClusterContribution entry;
    entry.cluster = c.at("cluster").get<int>();
    entry.distance = c.at("distance").get<double>();
    for (const auto& kw : c.at("keywords"))
      entry.keywords.emplace_back(kw.at(0).get<std::string>(), kw.at(1).get<double>());
    t.clusters.push_back(std::move(entry));
  }
  return t;
}

}  // namespace

std::string report_to_json(const ComparisonReport& r) {
  json meta = {
      {"metric", r.metric},
      {"weighting", r.weighting},
      {"pairing_method", r.pairing_method},
      {"preference_direction", r.preference_direction},
      {"suitor", r.suitor},
      {"seed", r.seed},
      {"pairing_seed", r.pairing_seed ? json(*r.pairing_seed) : json(nullptr)},
      {"set_a", {{"label", r.label_a}, {"size", r.size_a}}},
      {"set_b", {{"label", r.label_b}, {"size", r.size_b}}},
      {"clusters", {{"k", r.cluster_k}, {"reduction", r.cluster_reduction}, {"seed", r.cluster_seed}}},
  };
  for (const auto& [k, v] : r.extra_metadata) meta["extra"][k] = v;

  json pairs = json::array();
  for (const auto& p : r.pairs)
    pairs.push_back({{"a", p.a}, {"b", p.b}, {"a_id", p.a_id}, {"b_id", p.b_id}, {"distance", p.distance}});

  json doc = {
      {"schema_version", kReportSchemaVersion},
      {"metadata", std::move(meta)},
      {"pairs", std::move(pairs)},
      {"summary", {{"mean", r.summary.mean}, {"sd", r.summary.sd}, {"n", r.summary.n}}},
      {"word_tables",
       {{"a->b", word_table_json(r.raw_ab, r.diff_ab)}, {"b->a", word_table_json(r.raw_ba, r.diff_ba)}}},
  };
  if (r.clusters_ab && r.clusters_ba) {
    doc["cluster_tables"] = {{"a->b", cluster_table_json(*r.clusters_ab)},
                             {"b->a", cluster_table_json(*r.clusters_ba)}};
  } else {
    doc["cluster_tables"] = nullptr;
  }
  return doc.dump(2) + "\n";
}

ComparisonReport report_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("invalid report JSON: ") + e.what());
  }
  try {
    const int version = doc.at("schema_version").get<int>();
    if (version != kReportSchemaVersion)
      throw Error("unsupported report schema_version " + std::to_string(version));
    ComparisonReport r;
    const json& meta = doc.at("metadata");
    r.metric = meta.at("metric").get<std::string>();
    r.weighting = meta.at("weighting").get<std::string>();
    r.pairing_method = meta.at("pairing_method").get<std::string>();
    r.preference_direction = meta.at("preference_direction").get<std::string>();
    r.suitor = meta.at("suitor").get<std::string>();
    r.seed = meta.at("seed").get<std::uint64_t>();
    if (!meta.at("pairing_seed").is_null()) r.pairing_seed = meta.at("pairing_seed").get<std::uint64_t>();
    r.label_a = meta.at("set_a").at("label").get<std::string>();
    r.size_a = meta.at("set_a").at("size").get<std::size_t>();
    r.label_b = meta.at("set_b").at("label").get<std::string>();
    r.size_b = meta.at("set_b").at("size").get<std::size_t>();
    r.cluster_k = meta.at("clusters").at("k").get<std::size_t>();
    r.cluster_reduction = meta.at("clusters").at("reduction").get<std::string>();
    r.cluster_seed = meta.at("clusters").at("seed").get<std::uint64_t>();
    if (meta.contains("extra"))
      for (const auto& [k, v] : meta.at("extra").items()) r.extra_metadata[k] = v.get<std::string>();

    for (const auto& p : doc.at("pairs"))
      r.pairs.push_back({p.at("a").get<std::size_t>(), p.at("b").get<std::size_t>(),
                         p.at("a_id").get<std::string>(), p.at("b_id").get<std::string>(),
                         p.at("distance").get<double>()});
    const json& s = doc.at("summary");
    r.summary = {s.at("mean").get<double>(), s.at("sd").get<double>(), s.at("n").get<std::size_t>()};

    const json& tables = doc.at("word_tables");
    word_table_from_json(tables.at("a->b"), Direction::kAToB, r.raw_ab, r.diff_ab);
    word_table_from_json(tables.at("b->a"), Direction::kBToA, r.raw_ba, r.diff_ba);
    const json& ct = doc.at("cluster_tables");
    if (!ct.is_null()) {
      r.clusters_ab = cluster_table_from_json(ct.at("a->b"), Direction::kAToB);
      r.clusters_ba = cluster_table_from_json(ct.at("b->a"), Direction::kBToA);
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed report: ") + e.what());
  }
}

void write_report(const std::filesystem::path& path, const ComparisonReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write report " + path.string());
  out << report_to_json(report);
}

ComparisonReport read_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open report " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return report_from_json(ss.str());
}

}  // namespace wmdecomp
