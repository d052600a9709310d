#pragma once

#include "callab/model.hpp"

namespace callab {

/// Parameters for seeded random priors used by tests and sweeps. All draws go
/// through the raw engine (modulo / fixed palettes) so outputs are identical
/// across platforms.
struct RandomPriorParams {
  int m_max = 3;
  int edges_max = 3;
  int support_max = 3;
  bool vary_feasibility = true;
  bool allow_empty = true;  // 1-in-8 chance of an edgeless prior
};

namespace detail {

inline std::uint64_t pick(std::mt19937_64& rng, std::uint64_t n) {
  return n == 0 ? 0 : rng() % n;
}

}  // namespace detail

/// Random distinct hyperedges over m items (used by the partition stress
/// tests; weights not involved).
inline std::vector<Hyperedge> random_edges(std::mt19937_64& rng, int m,
                                           int count_max) {
  long long total = (1LL << m) - 1;
  int want = 1 + static_cast<int>(detail::pick(rng, count_max));
  std::vector<Hyperedge> out;
  std::vector<ItemMask> seen;
  for (int tries = 0; tries < 8 * want && static_cast<int>(out.size()) < want;
       ++tries) {
    ItemMask mask = 1 + detail::pick(rng, total);
    if (std::find(seen.begin(), seen.end(), mask) != seen.end()) continue;
    seen.push_back(mask);
    out.push_back(Hyperedge::from_mask(mask));
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline DiscreteDist random_dist(std::mt19937_64& rng, int support_max) {
  static const double palette[] = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 8.0, 10.0};
  constexpr int kPalette = 10;
  int size = 1 + static_cast<int>(detail::pick(rng, support_max));
  bool with_zero = detail::pick(rng, 2) == 0 || size > kPalette;
  std::vector<double> values;
  if (with_zero) values.push_back(0.0);
  while (static_cast<int>(values.size()) < size) {
    double v = palette[detail::pick(rng, kPalette)];
    if (std::find(values.begin(), values.end(), v) == values.end())
      values.push_back(v);
  }
  std::sort(values.begin(), values.end());
  std::vector<double> probs(values.size());
  double total = 0.0;
  for (auto& p : probs) {
    p = 1.0 + static_cast<double>(detail::pick(rng, 4));
    total += p;
  }
  for (auto& p : probs) p /= total;
  return DiscreteDist(std::move(values), std::move(probs));
}

inline HypergraphPrior random_prior(std::mt19937_64& rng,
                                    const RandomPriorParams& params = {}) {
  int m = 1 + static_cast<int>(detail::pick(rng, params.m_max));
  int n_edges = 1 + static_cast<int>(detail::pick(rng, params.edges_max));
  if (params.allow_empty && detail::pick(rng, 8) == 0) n_edges = 0;
  long long total = (1LL << m) - 1;
  std::vector<ItemMask> masks;
  for (int tries = 0; tries < 16 * (n_edges + 1) &&
                      static_cast<int>(masks.size()) < n_edges;
       ++tries) {
    ItemMask mask = 1 + detail::pick(rng, total);
    if (std::find(masks.begin(), masks.end(), mask) == masks.end())
      masks.push_back(mask);
  }
  std::vector<std::pair<Hyperedge, DiscreteDist>> edges;
  int max_edge_size = 0;
  for (ItemMask mask : masks) {
    Hyperedge e = Hyperedge::from_mask(mask);
    max_edge_size = std::max(max_edge_size, e.size());
    edges.push_back({std::move(e), random_dist(rng, params.support_max)});
  }
  FeasibilityFamily feas = FeasibilityFamily::all();
  if (params.vary_feasibility) {
    switch (detail::pick(rng, 4)) {
      case 0:
      case 1:
        break;  // All
      case 2: {
        int k = max_edge_size + static_cast<int>(detail::pick(
                                    rng, std::max(1, m - max_edge_size + 1)));
        feas = FeasibilityFamily::cardinality(std::max(k, 1));
        break;
      }
      case 3: {
        // Maximal sets: the edges themselves plus one random extra set, so
        // every active edge stays feasible.
        std::vector<Hyperedge> maximal;
        for (ItemMask mask : masks) maximal.push_back(Hyperedge::from_mask(mask));
        maximal.push_back(Hyperedge::from_mask(1 + detail::pick(rng, total)));
        feas = FeasibilityFamily::explicit_maximal(std::move(maximal));
        break;
      }
    }
  }
  return HypergraphPrior(m, std::move(edges), std::move(feas));
}

/// Seed mixer so instance i of a batch gets an independent stream.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace callab
