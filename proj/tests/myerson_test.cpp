#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "callab/myerson.hpp"
#include "test_util.hpp"

using namespace callab;

namespace {

/// E[phi(X) 1[X >= p]] computed directly.
double clipped_expectation(const DiscreteDist& d, const std::vector<double>& phi,
                           double p) {
  double e = 0.0;
  for (int i = 0; i < d.size(); ++i)
    if (d.support[i] >= p) e += d.pmf[i] * phi[i];
  return e;
}

void check_theorem21(const HypergraphPrior& prior, double q, double tol = 1e-9) {
  auto pricing = cpp_prices(prior, q);
  double copies = opt_copies(prior);
  double revenue = 0.0, sale = 0.0;
  for (const auto& ep : pricing) {
    const DiscreteDist& d = *prior.dist_of(ep.edge);
    revenue += ep.expected_revenue(d);
    sale += ep.expected_sale_prob(d);
  }
  CHECK(copies <= revenue / q + tol);
  CHECK(sale <= q + tol);
}

}  // namespace

TEST_CASE("virtual_value: formula and top point") {
  DiscreteDist d({1.0, 2.0}, {0.5, 0.5});
  CHECK(virtual_value(d, 2.0) == 2.0);
  CHECK(virtual_value(d, 1.0) == doctest::Approx(0.0));
  CHECK(virtual_value(DiscreteDist::point_mass(3.5), 3.5) == 3.5);
  CHECK_THROWS_AS(virtual_value(d, 1.5), std::domain_error);
}

TEST_CASE("iron: regular and irregular cases") {
  auto t = iron(DiscreteDist({1.0, 2.0}, {0.5, 0.5}));
  CHECK(t.phi_bar_at(1.0) == doctest::Approx(0.0));
  CHECK(t.phi_bar_at(2.0) == doctest::Approx(2.0));

  auto pm = iron(DiscreteDist::point_mass(4.0));
  CHECK(pm.phi_bar_at(4.0) == 4.0);

  // phi = {-8, 1.875, 3} by the direct formula; already monotone.
  auto t3 = iron(DiscreteDist({1.0, 2.0, 3.0}, {0.1, 0.8, 0.1}));
  CHECK(t3.phi_at(1.0) == doctest::Approx(-8.0));
  CHECK(t3.phi_at(2.0) == doctest::Approx(1.875));
  CHECK(t3.phi_at(3.0) == doctest::Approx(3.0));
  CHECK(t3.phi_bar == t3.phi);

  // Genuinely irregular: phi = {0, -2, 3} pools to {-1/3, -1/3, 3}.
  auto ti = iron(DiscreteDist({1.0, 2.0, 3.0}, {0.5, 0.1, 0.4}));
  CHECK(ti.phi_bar_at(1.0) == doctest::Approx(-1.0 / 3.0));
  CHECK(ti.phi_bar_at(2.0) == doctest::Approx(-1.0 / 3.0));
  CHECK(ti.phi_bar_at(3.0) == doctest::Approx(3.0));
  CHECK(ti.is_touch_point(1.0));
  CHECK(!ti.is_touch_point(2.0));
  CHECK(ti.is_touch_point(3.0));
}

TEST_CASE("iron: envelope majorizes with equality at touch points") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 80; ++trial) {
    DiscreteDist d = random_dist(rng, 5);
    auto t = iron(d);
    for (int i = 1; i < d.size(); ++i)
      CHECK(t.phi_bar[i] >= t.phi_bar[i - 1] - 1e-12);
    bool regular = true;
    for (int i = 1; i < d.size(); ++i)
      if (t.phi[i] < t.phi[i - 1] - 1e-12) regular = false;
    if (regular)
      for (int i = 0; i < d.size(); ++i)
        CHECK(t.phi_bar[i] == doctest::Approx(t.phi[i]).epsilon(1e-12));
    for (double p : d.support) {
      double ironed = clipped_expectation(d, t.phi_bar, p);
      double raw = clipped_expectation(d, t.phi, p);
      CHECK(ironed >= raw - 1e-9);
      if (t.is_touch_point(p)) CHECK(ironed == doctest::Approx(raw).epsilon(1e-9));
    }
  }
}

TEST_CASE("optimal_posted_price: worked examples and oracle") {
  auto [p0, r0] = optimal_posted_price(DiscreteDist::point_mass(2.5));
  CHECK(p0 == 2.5);
  CHECK(r0 == 2.5);
  auto [p1, r1] = optimal_posted_price(DiscreteDist({1.0, 2.0}, {0.5, 0.5}));
  CHECK(p1 == 1.0);  // tie between 1 and 2 goes to the lower price
  CHECK(r1 == doctest::Approx(1.0));
  auto [p2, r2] = optimal_posted_price(DiscreteDist({1.0, 10.0}, {0.5, 0.5}));
  CHECK(p2 == 10.0);
  CHECK(r2 == doctest::Approx(5.0));

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    DiscreteDist d = random_dist(rng, 5);
    CHECK(optimal_posted_price(d).second ==
          doctest::Approx(tu::posted_price_oracle(d)).epsilon(1e-12));
  }
}

TEST_CASE("Myerson identity: E[max{phi_bar,0}] vs posted price") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 80; ++trial) {
    DiscreteDist d = random_dist(rng, 5);
    auto t = iron(d);
    double ironed = 0.0;
    for (int i = 0; i < d.size(); ++i) ironed += d.pmf[i] * std::max(0.0, t.phi_bar[i]);
    double posted = tu::posted_price_oracle(d);
    CHECK(ironed >= posted - 1e-9);
    bool regular = true;
    for (int i = 1; i < d.size(); ++i)
      if (t.phi[i] < t.phi[i - 1] - 1e-12) regular = false;
    if (regular) CHECK(ironed == doctest::Approx(posted).epsilon(1e-9));
  }
}

TEST_CASE("opt_copies: worked examples") {
  CHECK(opt_copies(tu::single_edge_prior({0}, DiscreteDist({1.0, 2.0}, {0.5, 0.5}))) ==
        doctest::Approx(1.0));
  HypergraphPrior none(2, {}, FeasibilityFamily::all());
  CHECK(opt_copies(none) == 0.0);
  CHECK(opt_copies(tu::two_edge_prior()) == doctest::Approx(1.25));
}

TEST_CASE("opt_copies dominates every single edge's posted revenue") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    HypergraphPrior prior = random_prior(rng);
    double copies = opt_copies(prior);
    for (const auto& e : prior.active_edges())
      CHECK(copies >= tu::posted_price_oracle(*prior.dist_of(e)) - 1e-9);
  }
}

TEST_CASE("opt_copies: Monte Carlo estimate agrees with exact") {
  HypergraphPrior prior = tu::two_edge_prior();
  std::mt19937_64 rng(77);
  auto est = opt_copies_mc(prior, 200'000, rng);
  CHECK(est.std_error > 0.0);
  CHECK(std::abs(est.mean - 1.25) <= 4 * est.std_error);
}

TEST_CASE("cpp_prices: single edge golden case") {
  auto prior = tu::single_edge_prior({0}, DiscreteDist({1.0, 2.0}, {0.5, 0.5}));
  auto pricing = cpp_prices(prior, 1.0);
  REQUIRE(pricing.size() == 1);
  CHECK(pricing[0].price_hi == 1.0);
  CHECK(pricing[0].price_lo == 1.0);
  const DiscreteDist& d = *prior.dist_of(Hyperedge({0}));
  CHECK(pricing[0].expected_revenue(d) == doctest::Approx(1.0));
  CHECK(pricing[0].expected_sale_prob(d) == doctest::Approx(1.0));
  CHECK(opt_copies(prior) == doctest::Approx(1.0));
}

TEST_CASE("cpp_prices: point mass sells at its value") {
  auto prior = tu::single_edge_prior({0, 1}, DiscreteDist::point_mass(4.0));
  auto pricing = cpp_prices(prior, 1.0);
  REQUIRE(pricing.size() == 1);
  CHECK(pricing[0].price_hi == 4.0);
  CHECK(pricing[0].expected_sale_prob(*prior.dist_of(Hyperedge({0, 1}))) ==
        doctest::Approx(1.0));
}

TEST_CASE("cpp_prices: symmetric pair win probabilities and thresholds") {
  HypergraphPrior prior(
      2,
      {{Hyperedge({0}), DiscreteDist({0.0, 2.0}, {0.5, 0.5})},
       {Hyperedge({1}), DiscreteDist({0.0, 2.0}, {0.5, 0.5})}},
      FeasibilityFamily::all());
  auto pricing = cpp_prices(prior, 1.0);
  REQUIRE(pricing.size() == 2);
  CHECK(pricing[0].win_prob == doctest::Approx(0.75));
  CHECK(pricing[1].win_prob == doctest::Approx(0.25));
  // Pr[X_T >= t_T] equals q_T exactly under the mixed thresholds.
  for (const auto& ep : pricing) {
    const DiscreteDist& d = *prior.dist_of(ep.edge);
    auto t = iron(d);
    auto x = DiscreteDist({0.0, 2.0}, {0.5, 0.5});
    (void)t;
    double hit = ep.prob_hi * (std::isinf(ep.thresh_hi) ? 0.0 : x.pr_ge(ep.thresh_hi)) +
                 (1 - ep.prob_hi) * (std::isinf(ep.thresh_lo) ? 0.0 : x.pr_ge(ep.thresh_lo));
    CHECK(hit == doctest::Approx(ep.win_prob).epsilon(1e-12));
  }
  check_theorem21(prior, 1.0);
}

TEST_CASE("cpp_prices: both theorem conditions on random priors") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 25; ++trial) {
    HypergraphPrior prior = random_prior(rng);
    for (double q : {0.25, 0.5, 1.0}) check_theorem21(prior, q);
  }
}
