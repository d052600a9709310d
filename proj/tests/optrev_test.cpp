#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "callab/optrev.hpp"
#include "test_util.hpp"

using namespace callab;

TEST_CASE("simplex: tiny known LPs") {
  // max x + y st x + y <= 1, x <= 0.5
  LinearProgram lp;
  lp.n = 2;
  lp.objective = {1.0, 1.0};
  lp.rows.push_back({{{0, 1.0}, {1, 1.0}}, '<', 1.0});
  lp.rows.push_back({{{0, 1.0}}, '<', 0.5});
  auto s = solve_lp(lp);
  CHECK(s.objective == doctest::Approx(1.0));

  // equality + free variable: max -y st x - y = 2, x <= 3, y free
  LinearProgram lp2;
  lp2.n = 2;
  lp2.objective = {0.0, -1.0};
  lp2.free_var = {false, true};
  lp2.rows.push_back({{{0, 1.0}, {1, -1.0}}, '=', 2.0});
  lp2.rows.push_back({{{0, 1.0}}, '<', 3.0});
  auto s2 = solve_lp(lp2);
  CHECK(s2.objective == doctest::Approx(2.0));  // y = x - 2, best x = 0
  CHECK(s2.x[1] == doctest::Approx(-2.0));

  // infeasible: x <= -1
  LinearProgram lp3;
  lp3.n = 1;
  lp3.objective = {1.0};
  lp3.rows.push_back({{{0, 1.0}}, '<', -1.0});
  CHECK_THROWS_AS(solve_lp(lp3), solver_error);
}

TEST_CASE("build_lp: variable and row counts") {
  auto prior2 = tu::single_edge_prior({0}, DiscreteDist({1.0, 2.0}, {0.5, 0.5}));
  RevenueLP lp2 = build_lp(prior2);
  CHECK(lp2.n_types == 2);
  CHECK(lp2.n_vars() == 6);  // 2*2 + 2
  int ic = 0, ir = 0, eq = 0;
  for (const auto& row : lp2.lp.rows) {
    if (row.rel == '=') ++eq;
  }
  // rows: n_types IR + n_types*(n_types-1) IC + n_types simplex
  CHECK(static_cast<int>(lp2.lp.rows.size()) == 2 + 2 * 1 + 2);
  CHECK(eq == 2);
  (void)ic;
  (void)ir;

  auto pm = tu::single_edge_prior({0}, DiscreteDist::point_mass(1.0));
  RevenueLP lp1 = build_lp(pm);
  CHECK(static_cast<int>(lp1.lp.rows.size()) == 1 + 0 + 1);  // IC set empty

  HypergraphPrior m2(2,
                     {{Hyperedge({0}), DiscreteDist({0.0, 1.0}, {0.5, 0.5})},
                      {Hyperedge({1}), DiscreteDist({0.0, 1.0}, {0.5, 0.5})}},
                     FeasibilityFamily::all());
  CHECK(build_lp(m2).n_vars() == 20);  // 4*4 + 4
}

TEST_CASE("build_lp: variable cap raises capacity error") {
  Caps caps;
  caps.max_lp_vars = 4;
  CHECK_THROWS_AS(build_lp(tu::two_edge_prior(), caps), capacity_error);
}

TEST_CASE("optimal_revenue: single-type full extraction") {
  auto pm = tu::single_edge_prior({0}, DiscreteDist::point_mass(2.0));
  auto sol = optimal_revenue(pm);
  CHECK(sol.objective == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("optimal_revenue: single item equals the posted price") {
  auto prior = tu::single_edge_prior({0}, DiscreteDist({1.0, 2.0}, {0.5, 0.5}));
  CHECK(optimal_revenue(prior).objective == doctest::Approx(1.0).epsilon(1e-7));

  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 20; ++trial) {
    DiscreteDist d = random_dist(rng, 4);
    auto p = tu::single_edge_prior({0}, d);
    CHECK(optimal_revenue(p).objective ==
          doctest::Approx(tu::posted_price_oracle(d)).epsilon(1e-7));
  }
}

TEST_CASE("verify_solution: catches corrupted payments") {
  RevenueLP lp = build_lp(tu::two_edge_prior());
  MechanismSolution sol = solve(lp);
  CHECK(verify_solution(lp, sol).ok);

  MechanismSolution zero = sol;
  for (auto& l : zero.lottery) {
    std::fill(l.begin(), l.end(), 0.0);
    l[0] = 1.0;  // empty bundle w.p. 1
  }
  std::fill(zero.payment.begin(), zero.payment.end(), 0.0);
  zero.objective = 0.0;
  CHECK(verify_solution(lp, zero).ok);

  MechanismSolution bad = sol;
  bad.payment[0] += 0.1;
  auto v = verify_solution(lp, bad);
  CHECK(!v.ok);
}

TEST_CASE("optimal_revenue: solver output verifies on random priors") {
  std::mt19937_64 rng(59);
  for (int trial = 0; trial < 25; ++trial) {
    HypergraphPrior prior = random_prior(rng);
    RevenueLP lp = build_lp(prior);
    MechanismSolution sol = solve(lp);
    auto v = verify_solution(lp, sol);
    CHECK(v.ok);
    CHECK(v.max_residual <= 1e-6);
  }
}

TEST_CASE("optimal_revenue: dominates simple feasible mechanisms") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 15; ++trial) {
    HypergraphPrior prior = random_prior(rng);
    double rev = optimal_revenue(prior).objective;
    CHECK(rev >= brev(prior).second - 1e-6);
    CHECK(rev >= srev_star_opt(prior).second - 1e-6);
    DiscreteDist vm = grand_bundle_dist(prior);
    CHECK(rev <= vm.expectation() + 1e-6);
  }
}

TEST_CASE("optimal_revenue: scaling covariance at alpha = 2") {
  std::mt19937_64 rng(67);
  for (int trial = 0; trial < 8; ++trial) {
    HypergraphPrior prior = random_prior(rng);
    double rev = optimal_revenue(prior).objective;
    std::vector<std::pair<Hyperedge, DiscreteDist>> scaled;
    for (const auto& [e, d] : prior.edges) {
      std::vector<double> xs;
      for (double x : d.support) xs.push_back(2.0 * x);
      scaled.push_back({e, DiscreteDist(xs, d.pmf)});
    }
    HypergraphPrior prior2(prior.m, std::move(scaled), prior.feasibility);
    double rev2 = optimal_revenue(prior2).objective;
    CHECK(rev2 == doctest::Approx(2.0 * rev).epsilon(1e-7));
  }
}

TEST_CASE("edge menus never beat the LP optimum") {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 10; ++trial) {
    HypergraphPrior prior = random_prior(rng);
    double rev = optimal_revenue(prior).objective;
    std::vector<std::pair<Hyperedge, double>> menu;
    for (const auto& e : prior.active_edges())
      menu.push_back({e, 0.5 * static_cast<double>(1 + rng() % 6)});
    CHECK(edge_menu_revenue(prior, menu) <= rev + 1e-6);
  }
}
