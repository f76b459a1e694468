#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "wmdecomp/wmdecomp.hpp"

namespace py = pybind11;
using namespace wmdecomp;

namespace {

EmbeddingStore make_store(std::vector<std::string> words,
                          const std::vector<std::vector<double>>& vectors,
                          const std::string& metric) {
  if (vectors.empty()) throw Error("embedding store needs at least one vector");
  const std::size_t dim = vectors.front().size();
  std::vector<double> flat;
  flat.reserve(vectors.size() * dim);
  for (const auto& v : vectors) {
    if (v.size() != dim) throw Error("vectors differ in dimension");
    flat.insert(flat.end(), v.begin(), v.end());
  }
  return EmbeddingStore(std::move(words), std::move(flat), dim, parse_metric(metric));
}

EmbeddingFormat embedding_format(const std::string& s) {
  if (s == "text") return EmbeddingFormat::kText;
  if (s == "header") return EmbeddingFormat::kTextWithHeader;
  if (s == "auto") return EmbeddingFormat::kAuto;
  throw Error("unknown embedding format '" + s + "'");
}

std::vector<TokenizedDocument> as_documents(const std::vector<std::vector<std::string>>& docs,
                                            const std::string& prefix) {
  std::vector<TokenizedDocument> out;
  out.reserve(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) out.push_back({prefix + std::to_string(i), docs[i]});
  return out;
}

// Shared vocabulary and union-scope idf over both sets.
std::pair<DocumentSet, DocumentSet> vectorize_pair(
    const std::vector<std::vector<std::string>>& docs_a,
    const std::vector<std::vector<std::string>>& docs_b, const EmbeddingStore& store,
    const std::string& weighting, std::size_t min_count, const std::string& label_a,
    const std::string& label_b) {
  const auto ta = as_documents(docs_a, label_a + ":");
  const auto tb = as_documents(docs_b, label_b + ":");
  std::vector<TokenizedDocument> all(ta);
  all.insert(all.end(), tb.begin(), tb.end());
  const auto vocab = build_vocabulary(all, store, min_count);
  const auto table = idf(vocab, all);
  const Weighting w = parse_weighting(weighting);
  return {vectorize_all(label_a, ta, vocab, w, &table), vectorize_all(label_b, tb, vocab, w, &table)};
}

DistanceMatrix to_matrix(const std::vector<std::vector<double>>& rows) {
  DistanceMatrix m;
  m.rows = rows.size();
  m.cols = rows.empty() ? 0 : rows.front().size();
  for (const auto& r : rows) {
    if (r.size() != m.cols) throw Error("ragged distance matrix");
    m.values.insert(m.values.end(), r.begin(), r.end());
  }
  return m;
}

PointMatrix to_points(const std::vector<std::vector<double>>& rows) {
  const auto m = to_matrix(rows);
  return {m.rows, m.cols, m.values};
}

std::vector<std::vector<double>> nested(std::size_t rows, std::size_t cols,
                                        const std::vector<double>& values) {
  std::vector<std::vector<double>> out(rows);
  for (std::size_t i = 0; i < rows; ++i)
    out[i].assign(values.begin() + static_cast<std::ptrdiff_t>(i * cols),
                  values.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols));
  return out;
}

py::dict table_dict(const WordContributionTable& t) { return py::cast(t.contributions); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Word Mover's Distance decomposition between document sets";

  py::register_exception<SolverError>(m, "SolverError");
  py::register_exception<ParseError>(m, "ParseError");
  py::register_exception<Error>(m, "Error");

  py::class_<EmbeddingStore>(m, "EmbeddingStore")
      .def(py::init(&make_store), py::arg("words"), py::arg("vectors"), py::arg("metric") = "cosine")
      .def("__len__", &EmbeddingStore::size)
      .def_property_readonly("dim", &EmbeddingStore::dim)
      .def_property_readonly("metric", [](const EmbeddingStore& s) { return std::string(to_string(s.metric())); })
      .def_property_readonly("words", &EmbeddingStore::words)
      .def("__contains__", [](const EmbeddingStore& s, const std::string& w) { return s.contains(w); })
      .def("cost", [](const EmbeddingStore& s, const std::string& x, const std::string& y) {
        const auto i = s.find(x), j = s.find(y);
        if (!i || !j) throw Error("word not in embedding store");
        return s.cost(*i, *j);
      });

  m.def("load_embeddings",
        [](const std::filesystem::path& path, const std::string& format, const std::string& metric) {
          return load_embeddings(path, embedding_format(format), parse_metric(metric));
        },
        py::arg("path"), py::arg("format") = "auto", py::arg("metric") = "cosine");

  py::class_<DocumentVector>(m, "DocumentVector")
      .def_readonly("doc_id", &DocumentVector::doc_id)
      .def_readonly("entries", &DocumentVector::entries)
      .def("__len__", &DocumentVector::size);

  py::class_<DocumentSet>(m, "DocumentSet")
      .def_readonly("label", &DocumentSet::label)
      .def_readonly("vectors", &DocumentSet::vectors)
      .def("__len__", &DocumentSet::size);

  m.def("vectorize", &vectorize_pair, py::arg("docs_a"), py::arg("docs_b"), py::arg("store"),
        py::arg("weighting") = "nbow", py::arg("min_count") = 1, py::arg("label_a") = "a",
        py::arg("label_b") = "b",
        "Token lists of both sets -> (DocumentSet, DocumentSet) over a shared vocabulary.");

  py::class_<TransportPlan>(m, "TransportPlan")
      .def_readonly("src_indices", &TransportPlan::src_indices)
      .def_readonly("dst_indices", &TransportPlan::dst_indices)
      .def_readonly("total_cost", &TransportPlan::total_cost)
      .def_property_readonly("flows", [](const TransportPlan& p) {
        return nested(p.num_rows(), p.num_cols(), p.flows);
      });

  m.def("wmd",
        [](const DocumentVector& a, const DocumentVector& b, const EmbeddingStore& store) {
          return solve_transport(a, b, store);
        },
        py::arg("a"), py::arg("b"), py::arg("store"));

  m.def("rwmd_matrix",
        [](const DocumentSet& sa, const DocumentSet& sb, const EmbeddingStore& store,
           const std::string& direction) {
          const auto d = lc_rwmd_matrix(sa, sb, store, parse_direction(direction));
          return nested(d.rows, d.cols, d.values);
        },
        py::arg("set_a"), py::arg("set_b"), py::arg("store"), py::arg("direction") = "a->b");

  m.def("gale_shapley",
        [](const std::vector<std::vector<double>>& distances, const std::string& suitor) {
          return gale_shapley(to_matrix(distances), suitor == "b" ? Side::kB : Side::kA).pairs;
        },
        py::arg("distances"), py::arg("suitor") = "a");

  m.def("random_pairs",
        [](std::size_t n_a, std::size_t n_b, std::size_t count, std::uint64_t seed) {
          return random_pairs(n_a, n_b, count, seed).pairs;
        },
        py::arg("n_a"), py::arg("n_b"), py::arg("count"), py::arg("seed"));

  py::class_<ComparisonReport>(m, "ComparisonReport")
      .def_property_readonly("distances", &ComparisonReport::distances)
      .def_property_readonly("mean", [](const ComparisonReport& r) { return r.summary.mean; })
      .def_property_readonly("pairs", [](const ComparisonReport& r) {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (const auto& p : r.pairs) out.emplace_back(p.a, p.b);
        return out;
      })
      .def("word_table",
           [](const ComparisonReport& r, const std::string& direction, bool differenced) {
             return table_dict(r.table(parse_direction(direction), differenced));
           },
           py::arg("direction") = "a->b", py::arg("differenced") = true)
      .def("cluster_table",
           [](const ComparisonReport& r, const std::string& direction) -> py::object {
             const auto& t = parse_direction(direction) == Direction::kBToA ? r.clusters_ba : r.clusters_ab;
             if (!t) return py::none();
             py::list out;
             for (const auto& c : t->ranked())
               out.append(py::make_tuple(c.cluster, c.distance, c.keywords));
             return out;
           },
           py::arg("direction") = "a->b")
      .def("top_words",
           [](const ComparisonReport& r, const std::string& direction, std::size_t k) {
             return top_words(r.table(parse_direction(direction), true), k);
           },
           py::arg("direction") = "a->b", py::arg("k") = 10)
      .def("to_json", &report_to_json);

  m.def("compare",
        [](const DocumentSet& sa, const DocumentSet& sb, const EmbeddingStore& store,
           const std::string& method, std::uint64_t seed, std::size_t clusters,
           const std::string& direction, std::size_t random_count, bool subsample, unsigned threads) {
          CompareConfig cfg;
          cfg.method = parse_pairing_method(method);
          cfg.seed = seed;
          cfg.preference_direction = parse_direction(direction);
          cfg.random_count = random_count;
          cfg.subsample_unequal = subsample;
          cfg.threads = threads;
          if (clusters == 0)
            cfg.clusters.source = ClusterSpec::Source::kNone;
          else
            cfg.clusters.k = clusters;
          py::gil_scoped_release release;
          return compare_sets(sa, sb, store, cfg);
        },
        py::arg("set_a"), py::arg("set_b"), py::arg("store"), py::arg("method") = "gale-shapley",
        py::arg("seed") = 0, py::arg("clusters") = 0, py::arg("direction") = "a->b",
        py::arg("random_count") = 0, py::arg("subsample") = false, py::arg("threads") = 1);

  m.def("read_report", &read_report, py::arg("path"));
  m.def("report_from_json", &report_from_json, py::arg("text"));

  m.def("cost_change",
        [](const ComparisonReport& r0, const ComparisonReport& r1, const std::string& direction,
           bool differenced) {
          py::list out;
          for (const auto& c : cost_change(r0, r1, parse_direction(direction), differenced)) {
            py::dict d;
            d["word"] = c.word;
            d["cost_t0"] = c.cost_t0;
            d["cost_t1"] = c.cost_t1;
            d["change"] = c.change;
            d["change_pct"] = c.change_pct;
            d["freq_ratio_a"] = c.freq_ratio_a;
            d["freq_ratio_b"] = c.freq_ratio_b;
            out.append(d);
          }
          return out;
        },
        py::arg("report_t0"), py::arg("report_t1"), py::arg("direction") = "a->b",
        py::arg("differenced") = true);

  m.def("kmeans",
        [](const std::vector<std::vector<double>>& points, std::size_t k, std::uint64_t seed,
           std::size_t max_iter) {
          const auto model = kmeans(to_points(points), k, seed, max_iter);
          return py::make_tuple(model.assignments, nested(model.centroids.rows, model.centroids.cols,
                                                          model.centroids.data),
                                model.inertia);
        },
        py::arg("points"), py::arg("k"), py::arg("seed") = 0, py::arg("max_iter") = 300);

  m.def("silhouette",
        [](const std::vector<std::vector<double>>& points, const std::vector<int>& labels) {
          ClusterModel model;
          model.assignments = labels;
          for (int c : labels) model.k = std::max<std::size_t>(model.k, static_cast<std::size_t>(c) + 1);
          return silhouette(to_points(points), model);
        },
        py::arg("points"), py::arg("labels"));

  m.def("welch_t_test",
        [](const std::vector<double>& x, const std::vector<double>& y) {
          const auto r = welch_t_test(x, y);
          return py::make_tuple(r.t, r.dof, r.p);
        },
        py::arg("x"), py::arg("y"));

  m.attr("SCHEMA_VERSION") = kReportSchemaVersion;
}
