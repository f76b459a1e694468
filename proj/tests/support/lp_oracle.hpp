#pragma once

// Reference solvers used only by tests. They share no code with the library
// paths they check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

namespace wmdecomp::testing {

// Dense two-phase tableau simplex with Bland's rule for
//   min c^T x  s.t.  A x = b,  x >= 0   (b >= 0).
// Returns the optimal objective, or nullopt when infeasible.
inline std::optional<double> solve_lp(const std::vector<std::vector<double>>& a,
                                      const std::vector<double>& b, const std::vector<double>& c,
                                      std::vector<double>* x_out = nullptr) {
  const std::size_t m = a.size(), n = c.size();
  const std::size_t cols = n + m + 1;  // structural, artificial, rhs
  std::vector<std::vector<double>> t(m, std::vector<double>(cols, 0.0));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double sign = b[i] < 0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) t[i][j] = sign * a[i][j];
    t[i][n + i] = 1.0;
    t[i][cols - 1] = sign * b[i];
    basis[i] = n + i;
  }
  constexpr double kEps = 1e-12;

  auto pivot = [&](std::size_t r, std::size_t col) {
    const double p = t[r][col];
    for (double& v : t[r]) v /= p;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == r || t[i][col] == 0.0) continue;
      const double f = t[i][col];
      for (std::size_t j = 0; j < cols; ++j) t[i][j] -= f * t[r][j];
    }
    basis[r] = col;
  };

  // Runs Bland's rule on objective `obj` over columns [0, allowed).
  auto optimise = [&](const std::vector<double>& obj, std::size_t allowed) {
    for (int guard = 0; guard < 100000; ++guard) {
      std::size_t enter = allowed;
      for (std::size_t j = 0; j < allowed; ++j) {
        if (std::find(basis.begin(), basis.end(), j) != basis.end()) continue;
        double rc = obj[j];
        for (std::size_t i = 0; i < m; ++i) rc -= obj[basis[i]] * t[i][j];
        if (rc < -kEps) {
          enter = j;
          break;
        }
      }
      if (enter == allowed) return true;
      std::size_t leave = m;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i) {
        if (t[i][enter] <= kEps) continue;
        const double ratio = t[i][cols - 1] / t[i][enter];
        if (ratio < best - kEps || (leave < m && std::abs(ratio - best) <= kEps && basis[i] < basis[leave])) {
          best = ratio;
          leave = i;
        }
      }
      if (leave == m) return false;  // unbounded
      pivot(leave, enter);
    }
    throw std::runtime_error("lp oracle did not terminate");
  };

  std::vector<double> phase1(n + m, 0.0);
  for (std::size_t i = 0; i < m; ++i) phase1[n + i] = 1.0;
  optimise(phase1, n + m);
  double infeasibility = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] >= n) infeasibility += t[i][cols - 1];
  if (infeasibility > 1e-9) return std::nullopt;
  // Drive zero-level artificials out where possible.
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) continue;
    for (std::size_t j = 0; j < n; ++j)
      if (std::abs(t[i][j]) > 1e-9) {
        pivot(i, j);
        break;
      }
  }
  std::vector<double> phase2(n + m, 0.0);
  std::copy(c.begin(), c.end(), phase2.begin());
  optimise(phase2, n);

  std::vector<double> x(n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n) x[basis[i]] = t[i][cols - 1];
  double obj = 0.0;
  for (std::size_t j = 0; j < n; ++j) obj += c[j] * x[j];
  if (x_out) *x_out = x;
  return obj;
}

// Transportation problem through the generic LP above.
inline double transport_lp(const std::vector<double>& supply, const std::vector<double>& demand,
                           const std::vector<double>& costs) {
  const std::size_t m = supply.size(), n = demand.size();
  std::vector<std::vector<double>> a(m + n, std::vector<double>(m * n, 0.0));
  std::vector<double> b(m + n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][i * n + j] = 1.0;
    b[i] = supply[i];
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) a[m + j][i * n + j] = 1.0;
    b[m + j] = demand[j];
  }
  auto r = solve_lp(a, b, costs);
  if (!r) throw std::runtime_error("transport lp infeasible");
  return *r;
}

// Minimum over all vertices of the 2x2 transportation polytope. With row
// sums (s0, s1) and column sums (d0, d1) the polytope is the segment
// x00 in [max(0, s0 - d1), min(s0, d0)].
inline double transport_2x2_vertices(double s0, double d0, double d1, const double c[2][2]) {
  auto cost_at = [&](double x00) {
    const double x01 = s0 - x00, x10 = d0 - x00, x11 = d1 - x01;
    return c[0][0] * x00 + c[0][1] * x01 + c[1][0] * x10 + c[1][1] * x11;
  };
  const double lo = std::max(0.0, s0 - d1), hi = std::min(s0, d0);
  return std::min(cost_at(lo), cost_at(hi));
}

// Every perfect matching as a permutation: perm[a] = b.
template <typename Fn>
void for_each_permutation(std::size_t n, Fn&& fn) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    fn(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

// Stability by definition, with preferences (distance, then lower index):
// rows rank columns by d[i][*], columns rank rows by d[*][j].
inline bool brute_force_stable(const std::vector<std::size_t>& perm,
                               const std::vector<std::vector<double>>& d) {
  const std::size_t n = perm.size();
  std::vector<std::size_t> inv(n);
  for (std::size_t i = 0; i < n; ++i) inv[perm[i]] = i;
  auto row_prefers = [&](std::size_t i, std::size_t x, std::size_t y) {
    return d[i][x] < d[i][y] || (d[i][x] == d[i][y] && x < y);
  };
  auto col_prefers = [&](std::size_t j, std::size_t x, std::size_t y) {
    return d[x][j] < d[y][j] || (d[x][j] == d[y][j] && x < y);
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (perm[i] != j && row_prefers(i, j, perm[i]) && col_prefers(j, i, inv[j])) return false;
  return true;
}

// Cyclic Jacobi eigenvalues of a symmetric matrix (row-major n x n), descending.
inline std::vector<double> jacobi_eigenvalues(std::vector<double> a, std::size_t n) {
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
      }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a[i * n + i];
  std::sort(ev.rbegin(), ev.rend());
  return ev;
}

}  // namespace wmdecomp::testing
