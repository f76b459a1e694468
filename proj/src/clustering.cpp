#include "wmdecomp/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "wmdecomp/error.hpp"
#include "wmdecomp/random.hpp"

namespace wmdecomp {

PointMatrix embedding_points(const EmbeddingStore& store, std::span<const WordIndex> ids) {
  PointMatrix m;
  m.cols = store.dim();
  if (ids.empty()) {
    m.rows = store.size();
    m.data = store.matrix();
    return m;
  }
  m.rows = ids.size();
  m.data.reserve(m.rows * m.cols);
  for (WordIndex id : ids) {
    auto v = store.vector(id);
    m.data.insert(m.data.end(), v.begin(), v.end());
  }
  return m;
}

PcaResult pca(const PointMatrix& points, std::size_t dims) {
  const std::size_t n = points.rows, d = points.cols;
  if (n == 0 || d == 0) throw Error("pca needs a non-empty point matrix");
  if (dims < 1 || dims > d)
    throw Error("pca dims must be in [1, " + std::to_string(d) + "], got " + std::to_string(dims));

  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMatrix> x(points.data.data(), n, d);
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const RowMatrix centred = x.rowwise() - mean;
  const Eigen::MatrixXd cov = (centred.transpose() * centred) / static_cast<double>(n);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw Error("pca eigendecomposition failed");
  // Eigen returns ascending eigenvalues.
  const Eigen::VectorXd values = solver.eigenvalues().reverse();
  Eigen::MatrixXd axes = solver.eigenvectors().rowwise().reverse().leftCols(dims);
  for (Eigen::Index a = 0; a < axes.cols(); ++a) {
    Eigen::Index arg = 0;
    for (Eigen::Index r = 1; r < axes.rows(); ++r)
      if (std::abs(axes(r, a)) > std::abs(axes(arg, a))) arg = r;
    if (axes(arg, a) < 0) axes.col(a) *= -1.0;
  }

  PcaResult out;
  out.mean.assign(mean.data(), mean.data() + d);
  out.eigenvalues.assign(values.data(), values.data() + d);
  for (double& v : out.eigenvalues) v = std::max(v, 0.0);
  out.components.resize(dims * d);
  for (std::size_t a = 0; a < dims; ++a)
    for (std::size_t r = 0; r < d; ++r) out.components[a * d + r] = axes(r, a);
  const RowMatrix proj = centred * axes;
  out.projection.rows = n;
  out.projection.cols = dims;
  out.projection.data.assign(proj.data(), proj.data() + n * dims);
  return out;
}

PointMatrix reduce(const PointMatrix& points, ReductionMethod method, std::size_t dims) {
  if (method == ReductionMethod::kNone) return points;
  return pca(points, dims).projection;
}

std::optional<int> ClusterModel::cluster_of(std::string_view word) const {
  auto it = lookup_.find(std::string(word));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

void ClusterModel::index_words() {
  if (assignments.size() != words.size())
    throw Error("cluster model has " + std::to_string(words.size()) + " words but " +
                std::to_string(assignments.size()) + " assignments");
  lookup_.clear();
  lookup_.reserve(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (!lookup_.emplace(words[i], assignments[i]).second)
      throw Error("word '" + words[i] + "' assigned twice");
  }
}

namespace {

double squared_distance(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double d = x[k] - y[k];
    s += d * d;
  }
  return s;
}

// Nearest centroid, ties to the lowest index. Returns total inertia.
double assign(const PointMatrix& points, const PointMatrix& centroids, std::vector<int>& labels,
              std::vector<double>& sq) {
  double inertia = 0.0;
  for (std::size_t i = 0; i < points.rows; ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.rows; ++c) {
      const double dd = squared_distance(points.row(i), centroids.row(c));
      if (dd < best_d) {
        best_d = dd;
        best = static_cast<int>(c);
      }
    }
    labels[i] = best;
    sq[i] = best_d;
    inertia += best_d;
  }
  return inertia;
}

PointMatrix plus_plus_seeding(const PointMatrix& points, std::size_t k, Rng& rng) {
  const std::size_t n = points.rows;
  PointMatrix centroids{k, points.cols, std::vector<double>(k * points.cols)};
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::size_t pick = uniform_index(rng, n);
  for (std::size_t c = 0; c < k; ++c) {
    if (c > 0) {
      double total = 0.0;
      for (double v : nearest) total += v;
      if (total > 0.0) {
        const double target = uniform_unit(rng) * total;
        double acc = 0.0;
        pick = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
          acc += nearest[i];
          if (acc > target && nearest[i] > 0.0) {
            pick = i;
            break;
          }
        }
      } else {
        pick = uniform_index(rng, n);
      }
    }
    std::copy_n(points.row(pick).begin(), points.cols, centroids.row(c).begin());
    for (std::size_t i = 0; i < n; ++i)
      nearest[i] = std::min(nearest[i], squared_distance(points.row(i), centroids.row(c)));
  }
  return centroids;
}

}  // namespace

ClusterModel kmeans(const PointMatrix& points, std::size_t k, std::uint64_t seed,
                    std::size_t max_iter) {
  const std::size_t n = points.rows, d = points.cols;
  if (k < 1) throw Error("kmeans needs k >= 1");
  if (k > n)
    throw Error("kmeans k=" + std::to_string(k) + " exceeds " + std::to_string(n) + " points");
  if (points.data.size() != n * d) throw Error("point matrix has the wrong size");

  Rng rng(seed);
  ClusterModel model;
  model.k = k;
  model.seed = seed;
  model.centroids = plus_plus_seeding(points, k, rng);
  model.assignments.assign(n, 0);
  std::vector<double> sq(n);
  model.inertia_history.push_back(assign(points, model.centroids, model.assignments, sq));

  std::vector<int> next(n);
  std::vector<std::size_t> counts(k);
  std::vector<char> taken(n);
  for (std::size_t it = 0; it < max_iter; ++it) {
    // Update step.
    std::fill(model.centroids.data.begin(), model.centroids.data.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(model.assignments[i]);
      ++counts[c];
      auto row = model.centroids.row(c);
      auto p = points.row(i);
      for (std::size_t j = 0; j < d; ++j) row[j] += p[j];
    }
    for (std::size_t c = 0; c < k; ++c)
      if (counts[c] > 0)
        for (double& v : model.centroids.row(c)) v /= static_cast<double>(counts[c]);

    // Empty clusters move to the point worst served by its centroid.
    std::fill(taken.begin(), taken.end(), 0);
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (taken[i]) continue;
        const double dd = squared_distance(
            points.row(i), model.centroids.row(static_cast<std::size_t>(model.assignments[i])));
        if (dd > far_d) {
          far_d = dd;
          far = i;
        }
      }
      taken[far] = 1;
      std::copy_n(points.row(far).begin(), d, model.centroids.row(c).begin());
    }

    const double inertia = assign(points, model.centroids, next, sq);
    model.inertia_history.push_back(inertia);
    ++model.iterations;
    const bool fixpoint = next == model.assignments;
    model.assignments.swap(next);
    if (fixpoint) break;
  }
  model.inertia = model.inertia_history.back();
  return model;
}

double silhouette(const PointMatrix& points, const ClusterModel& model, std::size_t sample_size,
                  std::uint64_t seed) {
  if (model.k < 2) throw Error("silhouette needs k >= 2");
  const std::size_t n = points.rows;
  if (model.assignments.size() != n) throw Error("cluster model does not match the points");
  std::vector<std::size_t> sizes(model.k, 0);
  for (int c : model.assignments) ++sizes[static_cast<std::size_t>(c)];

  std::vector<std::size_t> scored(n);
  std::iota(scored.begin(), scored.end(), 0);
  if (sample_size > 0 && sample_size < n) {
    Rng rng(seed);
    scored = sample_without_replacement(rng, n, sample_size);
    std::sort(scored.begin(), scored.end());
  }

  std::vector<double> sums(model.k);
  double total = 0.0;
  for (std::size_t i : scored) {
    const auto own = static_cast<std::size_t>(model.assignments[i]);
    if (sizes[own] <= 1) continue;  // singleton scores 0
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      sums[static_cast<std::size_t>(model.assignments[j])] +=
          std::sqrt(squared_distance(points.row(i), points.row(j)));
    }
    const double a = sums[own] / static_cast<double>(sizes[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < model.k; ++c)
      if (c != own && sizes[c] > 0) b = std::min(b, sums[c] / static_cast<double>(sizes[c]));
    if (!std::isfinite(b)) continue;  // no other populated cluster
    const double denom = std::max(a, b);
    if (denom > 0.0) total += (b - a) / denom;
  }
  return total / static_cast<double>(scored.size());
}

std::vector<ScanRow> elbow_scan(const PointMatrix& points, std::span<const std::size_t> k_values,
                                std::uint64_t seed, std::size_t max_iter,
                                std::size_t silhouette_sample) {
  if (!std::is_sorted(k_values.begin(), k_values.end()))
    throw Error("elbow scan k values must be sorted ascending");
  std::vector<ScanRow> rows;
  rows.reserve(k_values.size());
  for (std::size_t k : k_values) {
    const std::uint64_t k_seed = derive_seed(seed, k);
    ClusterModel model = kmeans(points, k, k_seed, max_iter);
    ScanRow row{k, model.inertia, std::nullopt};
    if (k >= 2) row.silhouette = silhouette(points, model, silhouette_sample, k_seed);
    rows.push_back(row);
  }
  return rows;
}

std::string format_clusters_csv(const ClusterModel& model) {
  std::ostringstream os;
  os << "word,cluster\n";
  for (std::size_t i = 0; i < model.words.size(); ++i)
    os << model.words[i] << ',' << model.assignments[i] << '\n';
  return os.str();
}

void write_clusters_csv(const std::filesystem::path& path, const ClusterModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write clusters file " + path.string());
  out << format_clusters_csv(model);
}

namespace {

template <typename Fn>
void for_each_csv_line(std::string_view text, Fn&& fn) {
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    fn(fields, line_no);
  }
}

std::string read_file(const std::filesystem::path& path, std::string_view what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + std::string(what) + " file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

ClusterModel parse_clusters_csv(std::string_view text) {
  ClusterModel model;
  int max_id = -1;
  for_each_csv_line(text, [&](const std::vector<std::string_view>& f, std::size_t line_no) {
    if (line_no == 1 && f.size() >= 2 && f[0] == "word") return;
    if (f.size() != 2) throw ParseError("expected `word,cluster`", line_no);
    int id = 0;
    try {
      std::size_t used = 0;
      id = std::stoi(std::string(f[1]), &used);
      if (used != f[1].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError("invalid cluster id '" + std::string(f[1]) + "'", line_no);
    }
    if (id < 0) throw ParseError("negative cluster id", line_no);
    model.words.emplace_back(f[0]);
    model.assignments.push_back(id);
    max_id = std::max(max_id, id);
  });
  model.k = static_cast<std::size_t>(max_id + 1);
  model.reduction = "file";
  model.index_words();
  return model;
}

ClusterModel read_clusters_csv(const std::filesystem::path& path) {
  return parse_clusters_csv(read_file(path, "clusters"));
}

PointMatrix parse_coordinates_csv(std::string_view text, std::span<const std::string> words) {
  std::unordered_map<std::string, std::vector<double>> coords;
  std::size_t dims = 0;
  for_each_csv_line(text, [&](const std::vector<std::string_view>& f, std::size_t line_no) {
    if (f.size() < 2) throw ParseError("expected `word,x_1,...`", line_no);
    std::vector<double> xs;
    for (std::size_t k = 1; k < f.size(); ++k) {
      const std::string field(f[k]);
      char* end = nullptr;
      const double v = std::strtod(field.c_str(), &end);
      if (end != field.c_str() + field.size() || field.empty() || !std::isfinite(v)) {
        if (line_no == 1) return;  // header row
        throw ParseError("invalid coordinate '" + field + "'", line_no);
      }
      xs.push_back(v);
    }
    if (dims == 0) dims = xs.size();
    if (xs.size() != dims) throw ParseError("coordinate dimension mismatch", line_no);
    if (!coords.emplace(std::string(f[0]), std::move(xs)).second)
      throw ParseError("duplicate word '" + std::string(f[0]) + "'", line_no);
  });
  PointMatrix m;
  m.rows = words.size();
  m.cols = dims;
  m.data.reserve(m.rows * dims);
  for (const auto& w : words) {
    auto it = coords.find(w);
    if (it == coords.end()) throw Error("no coordinates for word '" + w + "'");
    m.data.insert(m.data.end(), it->second.begin(), it->second.end());
  }
  return m;
}

PointMatrix read_coordinates_csv(const std::filesystem::path& path,
                                 std::span<const std::string> words) {
  return parse_coordinates_csv(read_file(path, "coordinates"), words);
}

}  // namespace wmdecomp
