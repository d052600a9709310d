#pragma once

#include <random>

#include "callab/model.hpp"
#include "callab/random_instances.hpp"

namespace tu {

using namespace callab;

/// The worked two-edge instance: T1 = {0} with {0:.5, 1:.5}, T2 = {0,1} with
/// {0:.5, 2:.5}, no substitutes.
inline HypergraphPrior two_edge_prior() {
  return HypergraphPrior(
      2,
      {{Hyperedge({0}), DiscreteDist({0.0, 1.0}, {0.5, 0.5})},
       {Hyperedge({0, 1}), DiscreteDist({0.0, 2.0}, {0.5, 0.5})}},
      FeasibilityFamily::all());
}

inline HypergraphPrior single_edge_prior(std::vector<int> items, DiscreteDist d) {
  Hyperedge e(std::move(items));
  int m = e.items.back() + 1;
  return HypergraphPrior(m, {{e, std::move(d)}}, FeasibilityFamily::all());
}

/// Brute-force region oracle: scans every nonempty subset of the items in
/// lexicographic order, independently of the active-edge shortcut.
inline Hyperedge brute_region(const WeightProfile& profile, int m) {
  std::vector<Hyperedge> all;
  for (ItemMask s = 1; s < (ItemMask{1} << m); ++s)
    all.push_back(Hyperedge::from_mask(s));
  std::sort(all.begin(), all.end());
  const Hyperedge* best = &all[0];
  double best_w = profile.weight_of(all[0]);
  for (const auto& e : all) {
    double w = profile.weight_of(e);
    if (w > best_w) {
      best = &e;
      best_w = w;
    }
  }
  return *best;
}

/// Exhaustive posted-price oracle over the support.
inline double posted_price_oracle(const DiscreteDist& d) {
  double best = 0.0;
  for (double p : d.support) {
    double pr = 0.0;
    for (int i = 0; i < d.size(); ++i)
      if (d.support[i] >= p) pr += d.pmf[i];
    best = std::max(best, p * pr);
  }
  return best;
}

}  // namespace tu
