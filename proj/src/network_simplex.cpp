// Transportation simplex on the complete bipartite graph rows -> columns.
//
// The basis is a spanning tree over the m + n nodes with exactly m + n - 1
// basic cells, some possibly carrying zero flow. Each pivot recomputes node
// potentials over the tree, prices every non-basic cell, and pushes flow
// around the unique cycle closed by the entering cell.

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

#include "wmdecomp/error.hpp"
#include "wmdecomp/ot_solver.hpp"

namespace wmdecomp {

namespace {

struct Cell {
  std::size_t row;
  std::size_t col;
  double flow;
};

std::string dump_instance(std::span<const double> supply, std::span<const double> demand,
                          std::span<const double> costs) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "supply:";
  for (double s : supply) os << ' ' << s;
  os << "\ndemand:";
  for (double d : demand) os << ' ' << d;
  os << "\ncosts:\n";
  for (std::size_t i = 0; i < supply.size(); ++i) {
    for (std::size_t j = 0; j < demand.size(); ++j) os << (j ? " " : "") << costs[i * demand.size() + j];
    os << '\n';
  }
  return os.str();
}

class TransportSimplex {
 public:
  TransportSimplex(std::span<const double> supply, std::span<const double> demand,
                   std::span<const double> costs, const SolverOptions& options)
      : m_(supply.size()),
        n_(demand.size()),
        costs_(costs),
        options_(options),
        is_basic_(m_ * n_, 0),
        potential_(m_ + n_),
        parent_(m_ + n_),
        parent_cell_(m_ + n_),
        depth_(m_ + n_),
        adjacency_(m_ + n_) {
    double max_cost = 0.0;
    for (double c : costs_) max_cost = std::max(max_cost, std::abs(c));
    eps_ = 1e-12 * std::max(1.0, max_cost);
    north_west_corner(supply, demand);
  }

  void run(std::span<const double> supply, std::span<const double> demand, SolverStats* stats) {
    const std::size_t cap =
        options_.max_iterations ? options_.max_iterations : 50 * m_ * n_ + 1000;
    std::size_t consecutive_degenerate = 0;
    bool bland = false;
    SolverStats local;
    for (;;) {
      compute_potentials();
      const std::size_t entering = bland ? first_improving() : steepest_improving();
      if (entering == kNone) break;
      if (local.iterations >= cap) {
        throw SolverError("network simplex exceeded " + std::to_string(cap) + " pivots",
                          dump_instance(supply, demand, costs_));
      }
      ++local.iterations;
      if (bland) ++local.bland_pivots;
      const bool degenerate = pivot(entering, bland);
      if (degenerate) {
        ++local.degenerate_pivots;
        if (++consecutive_degenerate > options_.max_degenerate_pivots) bland = true;
      } else {
        consecutive_degenerate = 0;
        bland = false;
      }
    }
    if (stats) *stats = local;
  }

  std::vector<double> flows() const {
    std::vector<double> out(m_ * n_, 0.0);
    for (const Cell& c : basis_) out[c.row * n_ + c.col] = c.flow;
    return out;
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  double cost(std::size_t r, std::size_t c) const { return costs_[r * n_ + c]; }

  // Staircase from (0,0) to (m-1,n-1): exactly m + n - 1 cells, a spanning tree.
  void north_west_corner(std::span<const double> supply, std::span<const double> demand) {
    std::vector<double> rem_s(supply.begin(), supply.end());
    std::vector<double> rem_d(demand.begin(), demand.end());
    std::size_t i = 0, j = 0;
    for (;;) {
      const double x = std::min(rem_s[i], rem_d[j]);
      add_basic({i, j, x});
      rem_s[i] -= x;
      rem_d[j] -= x;
      if (i + 1 == m_ && j + 1 == n_) break;
      if (j + 1 == n_ || (i + 1 < m_ && rem_s[i] <= rem_d[j]))
        ++i;
      else
        ++j;
    }
    // Round-off leftovers land on the last cell so marginals stay exact.
    basis_.back().flow += std::min(rem_s[m_ - 1], rem_d[n_ - 1]);
  }

  void add_basic(Cell c) {
    is_basic_[c.row * n_ + c.col] = 1;
    basis_.push_back(c);
  }

  void compute_potentials() {
    for (auto& a : adjacency_) a.clear();
    for (std::size_t k = 0; k < basis_.size(); ++k) {
      const std::size_t r = basis_[k].row;
      const std::size_t c = m_ + basis_[k].col;
      adjacency_[r].push_back(k);
      adjacency_[c].push_back(k);
    }
    std::fill(depth_.begin(), depth_.end(), kNone);
    stack_.clear();
    stack_.push_back(0);
    depth_[0] = 0;
    potential_[0] = 0.0;
    parent_[0] = kNone;
    parent_cell_[0] = kNone;
    while (!stack_.empty()) {
      const std::size_t node = stack_.back();
      stack_.pop_back();
      for (std::size_t k : adjacency_[node]) {
        const Cell& cell = basis_[k];
        const std::size_t other = node < m_ ? m_ + cell.col : cell.row;
        if (depth_[other] != kNone) continue;
        depth_[other] = depth_[node] + 1;
        parent_[other] = node;
        parent_cell_[other] = k;
        // u_r + v_c = cost(r, c)
        potential_[other] = cost(cell.row, cell.col) - potential_[node];
        stack_.push_back(other);
      }
    }
  }

  double reduced_cost(std::size_t r, std::size_t c) const {
    return cost(r, c) - potential_[r] - potential_[m_ + c];
  }

  std::size_t steepest_improving() const {
    std::size_t best = kNone;
    double best_rc = -eps_;
    for (std::size_t r = 0; r < m_; ++r) {
      for (std::size_t c = 0; c < n_; ++c) {
        if (is_basic_[r * n_ + c]) continue;
        const double rc = reduced_cost(r, c);
        if (rc < best_rc) {
          best_rc = rc;
          best = r * n_ + c;
        }
      }
    }
    return best;
  }

  std::size_t first_improving() const {
    for (std::size_t r = 0; r < m_; ++r)
      for (std::size_t c = 0; c < n_; ++c)
        if (!is_basic_[r * n_ + c] && reduced_cost(r, c) < -eps_) return r * n_ + c;
    return kNone;
  }

  // Returns true when the step length was zero.
  bool pivot(std::size_t entering, bool smallest_index_leaving) {
    const std::size_t er = entering / n_;
    const std::size_t ec = entering % n_;

    // Tree path from column node ec to row node er; its cells alternate
    // -, +, -, ... starting at the column end.
    std::size_t a = m_ + ec;
    std::size_t b = er;
    std::vector<std::size_t>& from_col = path_a_;
    std::vector<std::size_t>& from_row = path_b_;
    from_col.clear();
    from_row.clear();
    while (depth_[a] > depth_[b]) {
      from_col.push_back(parent_cell_[a]);
      a = parent_[a];
    }
    while (depth_[b] > depth_[a]) {
      from_row.push_back(parent_cell_[b]);
      b = parent_[b];
    }
    while (a != b) {
      from_col.push_back(parent_cell_[a]);
      a = parent_[a];
      from_row.push_back(parent_cell_[b]);
      b = parent_[b];
    }
    cycle_.assign(from_col.begin(), from_col.end());
    cycle_.insert(cycle_.end(), from_row.rbegin(), from_row.rend());

    double theta = std::numeric_limits<double>::infinity();
    std::size_t leaving = kNone;
    for (std::size_t k = 0; k < cycle_.size(); k += 2) {
      const Cell& cell = basis_[cycle_[k]];
      const double x = cell.flow;
      bool take = false;
      if (x < theta) {
        take = true;
      } else if (x == theta && smallest_index_leaving) {
        const Cell& cur = basis_[leaving];
        take = cell.row * n_ + cell.col < cur.row * n_ + cur.col;
      }
      if (take) {
        theta = x;
        leaving = cycle_[k];
      }
    }

    for (std::size_t k = 0; k < cycle_.size(); ++k) {
      Cell& cell = basis_[cycle_[k]];
      if (k % 2 == 0)
        cell.flow -= theta;
      else
        cell.flow += theta;
    }

    Cell& out = basis_[leaving];
    is_basic_[out.row * n_ + out.col] = 0;
    is_basic_[entering] = 1;
    out = {er, ec, theta};
    return theta == 0.0;
  }

  std::size_t m_, n_;
  std::span<const double> costs_;
  SolverOptions options_;
  double eps_ = 0.0;

  std::vector<Cell> basis_;
  std::vector<char> is_basic_;
  std::vector<double> potential_;  // rows [0, m), columns [m, m + n)
  std::vector<std::size_t> parent_, parent_cell_, depth_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<std::size_t> stack_, path_a_, path_b_, cycle_;
};

}  // namespace

std::vector<double> solve_transportation(std::span<const double> supply,
                                         std::span<const double> demand,
                                         std::span<const double> costs,
                                         const SolverOptions& options, SolverStats* stats) {
  const std::size_t m = supply.size(), n = demand.size();
  if (m == 0 || n == 0) throw Error("transport problem needs at least one row and one column");
  if (costs.size() != m * n) throw Error("cost matrix dimensions do not match supply x demand");
  for (double s : supply)
    if (!(s >= 0.0) || !std::isfinite(s)) throw Error("supplies must be finite and non-negative");
  for (double d : demand)
    if (!(d >= 0.0) || !std::isfinite(d)) throw Error("demands must be finite and non-negative");
  for (double c : costs)
    if (!std::isfinite(c)) throw Error("costs must be finite");

  const double total_s = std::accumulate(supply.begin(), supply.end(), 0.0);
  const double total_d = std::accumulate(demand.begin(), demand.end(), 0.0);
  if (total_s <= 0.0 || total_d <= 0.0) throw Error("transport problem carries no mass");
  if (std::abs(total_s - total_d) > options.normalization_tolerance * std::max(total_s, total_d))
    throw Error("supply total " + std::to_string(total_s) + " and demand total " +
                std::to_string(total_d) + " differ");

  std::vector<double> balanced(demand.begin(), demand.end());
  if (total_d != total_s) {
    const double scale = total_s / total_d;
    for (double& d : balanced) d *= scale;
  }

  TransportSimplex simplex(supply, balanced, costs, options);
  simplex.run(supply, balanced, stats);
  return simplex.flows();
}

}  // namespace wmdecomp
