#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wmdecomp/embedding_store.hpp"

namespace wmdecomp {

// Dense row-major point cloud; row i is the point of word i.
struct PointMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
};

// Rows of `store` for the given words (all words when `ids` is empty).
PointMatrix embedding_points(const EmbeddingStore& store, std::span<const WordIndex> ids = {});

enum class ReductionMethod { kNone, kPca };

struct PcaResult {
  PointMatrix projection;           // n x dims, mean-centred scores
  std::vector<double> mean;         // d
  std::vector<double> components;   // dims x d, row-major, unit rows
  std::vector<double> eigenvalues;  // all d eigenvalues of the covariance (1/n), descending
};

// Projection onto the top `dims` principal axes. Each axis is oriented so its
// largest-magnitude loading is positive.
PcaResult pca(const PointMatrix& points, std::size_t dims);

// Dispatches to identity or PCA.
PointMatrix reduce(const PointMatrix& points, ReductionMethod method, std::size_t dims);

// Word -> cluster assignment plus centroids in the clustering space.
struct ClusterModel {
  std::vector<std::string> words;
  std::vector<int> assignments;  // one per word, in [0, k)
  PointMatrix centroids;         // k x d'
  double inertia = 0.0;
  std::size_t k = 0;
  std::string reduction = "none";
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
  // Inertia after every assignment step, first entry from the seeding.
  std::vector<double> inertia_history;

  std::optional<int> cluster_of(std::string_view word) const;
  // Rebuilds the word lookup; call after editing `words` directly.
  void index_words();

 private:
  std::unordered_map<std::string, int> lookup_;
};

// Lloyd iterations from k-means++ seeding. Stops at an assignment fixpoint or
// after `max_iter` update steps. Empty clusters are re-seeded at the point
// farthest from its centroid.
ClusterModel kmeans(const PointMatrix& points, std::size_t k, std::uint64_t seed,
                    std::size_t max_iter = 300);

// Mean silhouette with Euclidean distance. Points in singleton clusters, and
// points with a = b = 0, score 0. A non-zero `sample_size` scores a seeded
// subset of points (distances still use every point).
double silhouette(const PointMatrix& points, const ClusterModel& model,
                  std::size_t sample_size = 0, std::uint64_t seed = 0);

struct ScanRow {
  std::size_t k = 0;
  double inertia = 0.0;
  std::optional<double> silhouette;
};

std::vector<ScanRow> elbow_scan(const PointMatrix& points, std::span<const std::size_t> k_values,
                                std::uint64_t seed, std::size_t max_iter = 300,
                                std::size_t silhouette_sample = 0);

// `word,cluster` CSV.
std::string format_clusters_csv(const ClusterModel& model);
void write_clusters_csv(const std::filesystem::path& path, const ClusterModel& model);
ClusterModel read_clusters_csv(const std::filesystem::path& path);
ClusterModel parse_clusters_csv(std::string_view text);

// `word,x_1,...,x_d` CSV of externally reduced coordinates, reordered to
// follow `words`. Every word must be present.
PointMatrix read_coordinates_csv(const std::filesystem::path& path,
                                 std::span<const std::string> words);
PointMatrix parse_coordinates_csv(std::string_view text, std::span<const std::string> words);

}  // namespace wmdecomp
