#pragma once

#include "callab/model.hpp"
#include "callab/myerson.hpp"

namespace callab {

/// Per-item posted prices; +inf marks an item as not offered.
struct ItemPricing {
  std::vector<double> prices;

  static ItemPricing none(int m) { return {std::vector<double>(m, kInf)}; }
  double total(ItemMask s) const {
    double p = 0.0;
    for (size_t i = 0; i < prices.size(); ++i)
      if (s & (ItemMask{1} << i)) p += prices[i];
    return p;
  }
};

/// Distribution of v(M) under the prior (support aggregated exactly).
inline DiscreteDist grand_bundle_dist(const HypergraphPrior& prior,
                                      const Caps& caps = {}) {
  EnumeratedValuations ev = enumerate_valuations(prior, caps);
  ItemMask full = full_mask(prior.m);
  std::map<double, double> mass;
  for (size_t i = 0; i < ev.en.size(); ++i) mass[ev.val[i][full]] += ev.en.probs[i];
  std::vector<double> xs, ps;
  for (auto& [x, p] : mass) {
    xs.push_back(x);
    ps.push_back(p);
  }
  return DiscreteDist(std::move(xs), std::move(ps));
}

/// BREV: the optimal grand-bundle posted price and its revenue.
inline std::pair<double, double> brev(const HypergraphPrior& prior,
                                      const Caps& caps = {}) {
  return optimal_posted_price(grand_bundle_dist(prior, caps));
}

inline MonteCarloEstimate brev_mc(const HypergraphPrior& prior, long long n,
                                  std::mt19937_64& rng, const Caps& caps = {}) {
  // Sample v(M), then price over the empirical support.
  std::vector<double> vals(n);
  ItemMask full = full_mask(prior.m);
  for (long long i = 0; i < n; ++i) {
    WeightProfile p = sample_profile(prior, rng);
    vals[i] = value(p, prior.feasibility, full, caps);
  }
  std::sort(vals.begin(), vals.end());
  double best = 0.0;
  for (long long i = 0; i < n; ++i) {
    if (i > 0 && vals[i] == vals[i - 1]) continue;
    double r = vals[i] * static_cast<double>(n - i) / n;
    best = std::max(best, r);
  }
  MonteCarloEstimate est;
  est.samples = n;
  est.mean = best;
  // Crude binomial error at the chosen price.
  est.std_error = best / std::sqrt(static_cast<double>(n));
  return est;
}

namespace detail {

/// Per-profile utility sweep. For each item reports the max buyer utility
/// over bundles containing it and over bundles avoiding it; bundles with an
/// unoffered item are skipped (utility -inf).
struct UtilitySweep {
  std::vector<double> best_with;     // max over S containing i
  std::vector<double> best_without;  // max over S avoiding i (includes empty S)
};

inline UtilitySweep sweep_utilities(int m, const std::vector<double>& valtab,
                                    const ItemPricing& pricing) {
  UtilitySweep sw;
  sw.best_with.assign(m, -kInf);
  sw.best_without.assign(m, 0.0);  // S = empty has utility 0
  ItemMask offered = 0;
  for (int i = 0; i < m; ++i)
    if (!std::isinf(pricing.prices[i])) offered |= ItemMask{1} << i;
  // Only bundles of offered items can have finite utility; unoffered items
  // see every such bundle in their "without" sweep.
  ItemMask sub = offered;
  while (true) {
    if (sub != 0) {
      double u = valtab[sub] - pricing.total(sub);
      for (int i = 0; i < m; ++i) {
        if (sub & (ItemMask{1} << i))
          sw.best_with[i] = std::max(sw.best_with[i], u);
        else
          sw.best_without[i] = std::max(sw.best_without[i], u);
      }
    }
    if (sub == 0) break;
    sub = (sub - 1) & offered;
  }
  return sw;
}

}  // namespace detail

/// SREV* objective for one pricing: an item counts as sold only when every
/// positive-utility bundle contains it (P_i = 1 iff some bundle containing i
/// has utility > 0 and every bundle avoiding i has utility <= 0).
inline double srev_star_eval(const HypergraphPrior& prior,
                             const ItemPricing& pricing, const Caps& caps = {}) {
  EnumeratedValuations ev = enumerate_valuations(prior, caps);
  double total = 0.0;
  for (size_t t = 0; t < ev.en.size(); ++t) {
    auto sw = detail::sweep_utilities(prior.m, ev.val[t], pricing);
    double paid = 0.0;
    for (int i = 0; i < prior.m; ++i)
      if (!std::isinf(pricing.prices[i]) && sw.best_with[i] > 0.0 &&
          sw.best_without[i] <= 0.0)
        paid += pricing.prices[i];
    total += ev.en.probs[t] * paid;
  }
  return total;
}

/// Optimistic item-pricing revenue: sum_i p_i * Pr[some bundle containing i
/// is (weakly) affordable]. Upper-bounds srev_star_eval pointwise.
inline double srev_upper_eval(const HypergraphPrior& prior,
                              const ItemPricing& pricing, const Caps& caps = {}) {
  EnumeratedValuations ev = enumerate_valuations(prior, caps);
  double total = 0.0;
  for (size_t t = 0; t < ev.en.size(); ++t) {
    double paid = 0.0;
    for (int i = 0; i < prior.m; ++i) {
      if (std::isinf(pricing.prices[i])) continue;
      // willing: exists S containing i with v(S) >= price(S)
      bool willing = false;
      ItemMask offered = 0;
      for (int j = 0; j < prior.m; ++j)
        if (!std::isinf(pricing.prices[j])) offered |= ItemMask{1} << j;
      ItemMask rest = offered & ~(ItemMask{1} << i);
      ItemMask sub = rest;
      while (!willing) {
        ItemMask s = sub | (ItemMask{1} << i);
        if (ev.val[t][s] >= pricing.total(s)) willing = true;
        if (sub == 0) break;
        sub = (sub - 1) & rest;
      }
      if (willing) paid += pricing.prices[i];
    }
    total += ev.en.probs[t] * paid;
  }
  return total;
}

/// Candidate-grid configuration for the SREV* search.
struct PriceGridConfig {
  bool include_marginals = true;      // v(S) - v(S \ {i}) and v(S)/|S|
  bool include_half_supports = true;  // half of every edge-support value
  int max_candidates_per_item = 12;   // grid density cap
  int max_marginal_set_size = 3;
  std::vector<ItemPricing> extra_pricings;  // injected whole vectors
};

namespace detail {

inline std::vector<std::vector<double>> price_candidates(
    const HypergraphPrior& prior, const EnumeratedValuations& ev,
    const PriceGridConfig& grid) {
  std::vector<std::vector<double>> cand(prior.m);
  std::vector<std::map<double, int>> seen(prior.m);
  auto add = [&](int i, double p) {
    if (p > 0.0 && std::isfinite(p)) seen[i].emplace(p, 0);
  };
  if (grid.include_half_supports) {
    for (const auto& [e, d] : prior.edges)
      for (double x : d.support)
        for (int i : e.items) {
          add(i, x);
          add(i, x / 2.0);
        }
  }
  if (grid.include_marginals) {
    for (size_t t = 0; t < ev.en.size(); ++t) {
      for (ItemMask s = 1; s < (ItemMask{1} << prior.m); ++s) {
        if (popcount(s) > grid.max_marginal_set_size) continue;
        double vs = ev.val[t][s];
        if (vs <= 0.0) continue;
        for (int i = 0; i < prior.m; ++i) {
          if (!(s & (ItemMask{1} << i))) continue;
          add(i, vs / popcount(s));
          add(i, vs - ev.val[t][s ^ (ItemMask{1} << i)]);
        }
      }
    }
  }
  for (int i = 0; i < prior.m; ++i) {
    std::vector<double> xs;
    for (auto& [p, _] : seen[i]) xs.push_back(p);
    if (static_cast<int>(xs.size()) > grid.max_candidates_per_item) {
      // keep an evenly spread subsample, always retaining min and max
      std::vector<double> kept;
      int n = static_cast<int>(xs.size());
      for (int j = 0; j < grid.max_candidates_per_item; ++j)
        kept.push_back(xs[static_cast<size_t>(j) * (n - 1) /
                          (grid.max_candidates_per_item - 1)]);
      kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
      xs = std::move(kept);
    }
    // The P_i rule is strict (utility must exceed 0), so a price sitting
    // exactly on a support value loses that atom; a shaded twin recovers it
    // up to a 2^-20 relative loss and keeps the grid optimum near the
    // supremum. Shading happens after the density cap so twins survive.
    constexpr double kShade = 1.0 - 0x1.0p-20;
    std::vector<double> shaded;
    for (double p : xs) {
      shaded.push_back(p * kShade);
      shaded.push_back(p);
    }
    shaded.insert(shaded.begin(), 0.0);
    shaded.push_back(kInf);  // not offered is always a candidate
    cand[i] = std::move(shaded);
  }
  return cand;
}

}  // namespace detail

/// Grid search for a good SREV* pricing. The result is a certified LOWER
/// bound on the true SREV* (the buyer's demand problem is NP-hard, and every
/// theorem checked here has SREV* on its large side). Exhaustive
/// cross-product for m <= 4, coordinate ascent above.
inline std::pair<ItemPricing, double> srev_star_opt(
    const HypergraphPrior& prior, const PriceGridConfig& grid = {},
    const Caps& caps = {}) {
  EnumeratedValuations ev = enumerate_valuations(prior, caps);
  auto eval = [&](const ItemPricing& pr) {
    double total = 0.0;
    for (size_t t = 0; t < ev.en.size(); ++t) {
      auto sw = detail::sweep_utilities(prior.m, ev.val[t], pr);
      double paid = 0.0;
      for (int i = 0; i < prior.m; ++i)
        if (!std::isinf(pr.prices[i]) && sw.best_with[i] > 0.0 &&
            sw.best_without[i] <= 0.0)
          paid += pr.prices[i];
      total += ev.en.probs[t] * paid;
    }
    return total;
  };

  auto cand = detail::price_candidates(prior, ev, grid);
  ItemPricing best = ItemPricing::none(prior.m);
  double best_rev = eval(best);

  if (prior.m <= 4) {
    ItemPricing cur = ItemPricing::none(prior.m);
    std::vector<size_t> idx(prior.m, 0);
    while (true) {
      for (int i = 0; i < prior.m; ++i) cur.prices[i] = cand[i][idx[i]];
      double r = eval(cur);
      if (r > best_rev) {
        best_rev = r;
        best = cur;
      }
      int i = 0;
      for (; i < prior.m; ++i) {
        if (++idx[i] < cand[i].size()) break;
        idx[i] = 0;
      }
      if (i == prior.m) break;
    }
    if (prior.m == 0) best_rev = 0.0;
  } else {
    ItemPricing cur = ItemPricing::none(prior.m);
    double cur_rev = eval(cur);
    bool improved = true;
    while (improved) {
      improved = false;
      for (int i = 0; i < prior.m; ++i) {
        double keep = cur.prices[i];
        double local_best = cur_rev;
        double local_price = keep;
        for (double p : cand[i]) {
          cur.prices[i] = p;
          double r = eval(cur);
          if (r > local_best + 1e-12) {
            local_best = r;
            local_price = p;
          }
        }
        cur.prices[i] = local_price;
        if (local_best > cur_rev + 1e-12) {
          cur_rev = local_best;
          improved = true;
        }
      }
    }
    if (cur_rev > best_rev) {
      best_rev = cur_rev;
      best = cur;
    }
  }
  for (const auto& pr : grid.extra_pricings) {
    double r = eval(pr);
    if (r > best_rev) {
      best_rev = r;
      best = pr;
    }
  }
  return {best, best_rev};
}

/// Menu of set-price pairs plus the free no-purchase option. The buyer picks
/// a utility-maximizing entry; at indifference the highest-priced entry wins
/// (then the lexicographically smaller set). Being a truthful mechanism this
/// is a valid lower bound on REV.
inline double edge_menu_revenue(const HypergraphPrior& prior,
                                const std::vector<std::pair<Hyperedge, double>>& menu,
                                const Caps& caps = {}) {
  for (const auto& [e, p] : menu)
    if (!(p >= 0.0) || !std::isfinite(p))
      throw std::invalid_argument("edge_menu_revenue: prices must be finite and >= 0");
  EnumeratedValuations ev = enumerate_valuations(prior, caps);
  double total = 0.0;
  for (size_t t = 0; t < ev.en.size(); ++t) {
    double best_u = 0.0, paid = 0.0;  // no-purchase entry
    const Hyperedge* chosen = nullptr;
    for (const auto& [e, p] : menu) {
      double u = ev.val[t][e.mask()] - p;
      bool better = u > best_u + 1e-12;
      bool tie = std::abs(u - best_u) <= 1e-12;
      if (better || (tie && (p > paid || (p == paid && chosen != nullptr && e < *chosen)))) {
        best_u = u;
        paid = p;
        chosen = &e;
      }
    }
    total += ev.en.probs[t] * paid;
  }
  return total;
}

}  // namespace callab
