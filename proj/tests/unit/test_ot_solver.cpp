#include <doctest.h>

#include <cmath>

#include "support/lp_oracle.hpp"
#include "support/synthetic.hpp"
#include "wmdecomp/error.hpp"
#include "wmdecomp/ot_solver.hpp"

using namespace wmdecomp;

namespace {

const double kC = 1.0 - 1.0 / std::sqrt(2.0);

EmbeddingStore uvw() {
  const double r = 1.0 / std::sqrt(2.0);
  return EmbeddingStore({"u", "v", "w"}, {1, 0, 0, 1, r, r}, 2);
}

DocumentVector doc(std::vector<std::pair<WordIndex, double>> e) { return {"d", std::move(e)}; }

void check_marginals(const TransportPlan& plan, const DocumentVector& a, const DocumentVector& b) {
  for (std::size_t i = 0; i < plan.num_rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < plan.num_cols(); ++j) {
      CHECK(plan.flow(i, j) >= 0.0);
      s += plan.flow(i, j);
    }
    CHECK(std::abs(s - a.entries[i].second) <= 1e-9);
  }
  for (std::size_t j = 0; j < plan.num_cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < plan.num_rows(); ++i) s += plan.flow(i, j);
    CHECK(std::abs(s - b.entries[j].second) <= 1e-9);
  }
}

}  // namespace

TEST_SUITE("ot_solver") {
  TEST_CASE("oracle sanity: 2x2 vertex enumeration agrees with the generic LP") {
    const double c[2][2] = {{0.0, kC}, {1.0, kC}};
    const double by_vertices = testing::transport_2x2_vertices(0.5, 0.5, 0.5, c);
    const double by_lp = testing::transport_lp({0.5, 0.5}, {0.5, 0.5}, {0.0, kC, 1.0, kC});
    CHECK(by_vertices == doctest::Approx(0.146447).epsilon(1e-6));
    CHECK(std::abs(by_vertices - by_lp) <= 1e-12);
  }

  TEST_CASE("single word mass is forced") {
    const auto s = uvw();
    const auto a = doc({{0, 1.0}}), b = doc({{1, 1.0}});
    const auto plan = solve_transport(a, b, s);
    CHECK(plan.flows == std::vector<double>{1.0});
    CHECK(plan.total_cost == doctest::Approx(1.0));
  }

  TEST_CASE("identical documents cost nothing") {
    const auto s = uvw();
    const auto a = doc({{0, 0.2}, {1, 0.3}, {2, 0.5}});
    const auto plan = solve_transport(a, a, s);
    CHECK(plan.total_cost == 0.0);
    check_marginals(plan, a, a);
  }

  TEST_CASE("two-word example matches the vertex oracle") {
    const auto s = uvw();
    const auto a = doc({{0, 0.5}, {1, 0.5}});  // u, v
    const auto b = doc({{0, 0.5}, {2, 0.5}});  // u, w
    const auto plan = solve_transport(a, b, s);
    CHECK(plan.total_cost == doctest::Approx(0.146447).epsilon(1e-6));
    CHECK(plan.flow(0, 0) == doctest::Approx(0.5));  // u -> u
    CHECK(plan.flow(1, 1) == doctest::Approx(0.5));  // v -> w
    CHECK(plan.flow(0, 1) == 0.0);
    CHECK(plan.flow(1, 0) == 0.0);
  }

  TEST_CASE("relaxed bounds on the worked examples") {
    const auto s = uvw();
    {
      const auto a = doc({{0, 1.0}}), b = doc({{2, 1.0}});
      const auto costs = s.cost_matrix(a.words(), b.words());
      CHECK(rwmd(a, b, costs, Direction::kSymmetricMax) ==
            doctest::Approx(solve_transport(a, b, costs).total_cost));
    }
    {
      // Both words on both sides: nearest-word minima vanish.
      const EmbeddingStore uv({"u", "v"}, {1, 0, 0, 1}, 2);
      const auto a = doc({{0, 0.75}, {1, 0.25}}), b = doc({{0, 0.25}, {1, 0.75}});
      const auto costs = uv.cost_matrix(a.words(), b.words());
      CHECK(rwmd(a, b, costs, Direction::kAToB) == 0.0);
      CHECK(rwmd(a, b, costs, Direction::kBToA) == 0.0);
      CHECK(solve_transport(a, b, costs).total_cost == doctest::Approx(0.5));
      CHECK(testing::transport_lp({0.75, 0.25}, {0.25, 0.75}, costs.values) == doctest::Approx(0.5));
    }
    {
      const auto a = doc({{0, 0.5}, {1, 0.5}}), b = doc({{2, 1.0}});
      const auto costs = s.cost_matrix(a.words(), b.words());
      CHECK(rwmd(a, b, costs, Direction::kAToB) == doctest::Approx(kC));
      CHECK(solve_transport(a, b, costs).total_cost == doctest::Approx(kC));
    }
  }

  TEST_CASE("rejects unnormalised input and mismatched costs") {
    const auto s = uvw();
    const auto a = doc({{0, 0.5}, {1, 0.4}}), b = doc({{2, 1.0}});
    CHECK_THROWS_AS(solve_transport(a, b, s), Error);
    const auto good = doc({{0, 0.5}, {1, 0.5}});
    const std::vector<WordIndex> one{0};
    CHECK_THROWS_AS(solve_transport(good, b, s.cost_matrix(one, one)), Error);
    // Tiny imbalance is rebalanced.
    const auto nearly = doc({{0, 0.5}, {1, 0.5 + 5e-10}});
    const auto plan = solve_transport(nearly, b, s);
    CHECK(plan.total_cost == doctest::Approx(kC));
  }

  TEST_CASE("matches the generic LP oracle on random instances") {
    const auto store = testing::random_store(30, 8, 11);
    Rng rng(5);
    for (int trial = 0; trial < 150; ++trial) {
      const auto a = testing::random_document(rng, store.size(), 6);
      const auto b = testing::random_document(rng, store.size(), 6);
      const auto costs = store.cost_matrix(a.words(), b.words());
      const auto plan = solve_transport(a, b, costs);
      const double oracle = testing::transport_lp(a.weights(), b.weights(), costs.values);
      CHECK(std::abs(plan.total_cost - oracle) <= 1e-8);
      check_marginals(plan, a, b);
      double direct = 0.0;
      for (std::size_t k = 0; k < plan.flows.size(); ++k) direct += plan.flows[k] * costs.values[k];
      CHECK(std::abs(direct - plan.total_cost) <= 1e-9);
    }
  }

  TEST_CASE("symmetry, lower bound and cost scaling") {
    const auto store = testing::random_store(60, 8, 13);
    Rng rng(17);
    for (int trial = 0; trial < 200; ++trial) {
      const auto a = testing::random_document(rng, store.size(), 15);
      const auto b = testing::random_document(rng, store.size(), 15);
      const auto costs = store.cost_matrix(a.words(), b.words());
      const auto ab = solve_transport(a, b, costs);
      const auto ba = solve_transport(b, a, store);
      CHECK(std::abs(ab.total_cost - ba.total_cost) <= 1e-9);
      CHECK(rwmd(a, b, costs, Direction::kSymmetricMax) <= ab.total_cost + 1e-9);

      auto scaled = costs;
      for (double& v : scaled.values) v *= 3.5;
      const auto sp = solve_transport(a, b, scaled);
      CHECK(std::abs(sp.total_cost - 3.5 * ab.total_cost) <= 1e-9);
      for (std::size_t k = 0; k < ab.flows.size(); ++k) CHECK((sp.flows[k] > 0) == (ab.flows[k] > 0));
    }
  }

  TEST_CASE("degenerate instances terminate") {
    // Equal marginals everywhere and tied costs maximise degeneracy.
    const std::size_t n = 12;
    std::vector<double> mass(n, 1.0 / n), costs(n * n, 1.0);
    for (std::size_t i = 0; i < n; ++i) costs[i * n + (n - 1 - i)] = 0.0;
    SolverStats stats;
    SolverOptions opts;
    opts.max_degenerate_pivots = 2;
    const auto flows = solve_transportation(mass, mass, costs, opts, &stats);
    double total = 0.0;
    for (std::size_t k = 0; k < flows.size(); ++k) total += flows[k] * costs[k];
    CHECK(total == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(stats.degenerate_pivots > 0);
  }

  TEST_CASE("pivot cap raises a solver error with an instance dump") {
    std::vector<double> mass{0.5, 0.5}, costs{1.0, 0.0, 0.0, 1.0};
    SolverOptions opts;
    opts.max_iterations = 0;
    CHECK_NOTHROW(solve_transportation(mass, mass, costs, opts));
    opts.max_iterations = 1;
    std::vector<double> m3{1.0 / 3, 1.0 / 3, 1.0 / 3};
    std::vector<double> c3{2, 1, 0, 1, 0, 1, 0, 1, 2};
    try {
      solve_transportation(m3, m3, c3, opts);
      FAIL("expected a solver error");
    } catch (const SolverError& e) {
      CHECK(e.instance_dump().find("supply:") != std::string::npos);
    }
  }

  TEST_CASE("batched relaxed matrix equals direct relaxed distances") {
    const auto store = testing::random_store(50, 6, 23);
    Rng rng(29);
    const auto sa = testing::random_set(rng, 7, store.size(), 8, "a");
    const auto sb = testing::random_set(rng, 5, store.size(), 8, "b");
    for (Direction dir : {Direction::kAToB, Direction::kBToA, Direction::kSymmetricMax}) {
      const auto m = lc_rwmd_matrix(sa, sb, store, dir, 3);
      CHECK(m.rows == 7);
      CHECK(m.cols == 5);
      for (std::size_t p = 0; p < sa.size(); ++p)
        for (std::size_t q = 0; q < sb.size(); ++q) {
          const auto costs = store.cost_matrix(sa.vectors[p].words(), sb.vectors[q].words());
          CHECK(std::abs(m(p, q) - rwmd(sa.vectors[p], sb.vectors[q], costs, dir)) <= 1e-9);
        }
    }
    const auto self = lc_rwmd_matrix(sa, sa, store, Direction::kSymmetricMax);
    for (std::size_t p = 0; p < sa.size(); ++p) CHECK(self(p, p) == 0.0);

    DocumentSet one_a{"a", {sa.vectors[0]}}, one_b{"b", {sb.vectors[0]}};
    const auto m11 = lc_rwmd_matrix(one_a, one_b, store, Direction::kAToB);
    const auto costs = store.cost_matrix(sa.vectors[0].words(), sb.vectors[0].words());
    CHECK(m11(0, 0) == rwmd(sa.vectors[0], sb.vectors[0], costs, Direction::kAToB));
    CHECK_THROWS_AS(lc_rwmd_matrix(DocumentSet{}, sb, store, Direction::kAToB), Error);
  }

  TEST_CASE("transposed plan solves the reverse problem") {
    const auto store = testing::random_store(20, 5, 31);
    Rng rng(37);
    const auto a = testing::random_document(rng, store.size(), 6);
    const auto b = testing::random_document(rng, store.size(), 6);
    const auto plan = solve_transport(a, b, store);
    const auto t = plan.transposed();
    check_marginals(t, b, a);
    CHECK(std::abs(t.total_cost - solve_transport(b, a, store).total_cost) <= 1e-9);
  }
}
