#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <utility>

#include "callab/core.hpp"

namespace callab {

/// One realized weight assignment w(.). Holds a value for every active edge
/// of the generating prior (zero realizations included).
struct WeightProfile {
  std::vector<std::pair<Hyperedge, double>> weights;  // sorted by edge

  double weight_of(const Hyperedge& e) const {
    auto it = std::lower_bound(
        weights.begin(), weights.end(), e,
        [](const auto& a, const Hyperedge& b) { return a.first < b; });
    if (it == weights.end() || it->first != e) return 0.0;
    return it->second;
  }
  void set(const Hyperedge& e, double w) {
    auto it = std::lower_bound(
        weights.begin(), weights.end(), e,
        [](const auto& a, const Hyperedge& b) { return a.first < b; });
    if (it != weights.end() && it->first == e)
      it->second = w;
    else
      weights.insert(it, {e, w});
  }
};

/// The instance: item count, per-hyperedge weight distributions (absent edges
/// have weight identically zero) and a feasibility family. Every active edge
/// must be feasible (w(T) = 0 is forced outside the family).
struct HypergraphPrior {
  int m = 0;
  std::vector<std::pair<Hyperedge, DiscreteDist>> edges;  // sorted by edge
  FeasibilityFamily feasibility;

  HypergraphPrior() = default;
  HypergraphPrior(int items, std::vector<std::pair<Hyperedge, DiscreteDist>> es,
                  FeasibilityFamily feas)
      : m(items), edges(std::move(es)), feasibility(std::move(feas)) {
    validate();
  }

  void validate() {
    if (m < 0 || m > 62) throw std::invalid_argument("item count must be in [0, 62]");
    std::sort(edges.begin(), edges.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (size_t i = 0; i < edges.size(); ++i) {
      const auto& [e, d] = edges[i];
      if (e.items.empty()) throw std::invalid_argument("hyperedge must be nonempty");
      if (e.items.back() >= m) throw std::invalid_argument("edge item out of range");
      if (i > 0 && edges[i - 1].first == e)
        throw std::invalid_argument("duplicate hyperedge");
      d.validate();
      if (d.is_active() && !feasibility.contains(e.mask()))
        throw std::invalid_argument("active edge " + e.str() + " is infeasible");
    }
  }

  /// The explicit active-edge set E = {T : Pr[w(T)=0] < 1}, in sorted order.
  std::vector<Hyperedge> active_edges() const {
    std::vector<Hyperedge> out;
    for (const auto& [e, d] : edges)
      if (d.is_active()) out.push_back(e);
    return out;
  }
  const DiscreteDist* dist_of(const Hyperedge& e) const {
    auto it = std::lower_bound(
        edges.begin(), edges.end(), e,
        [](const auto& a, const Hyperedge& b) { return a.first < b; });
    if (it == edges.end() || it->first != e) return nullptr;
    return &it->second;
  }
};

/// v(S) = max over feasible T subseteq S of the sum of contained edge weights;
/// exhaustive enumeration of the subsets of S, capped.
inline double value(const WeightProfile& profile, const FeasibilityFamily& feas,
                    ItemMask s, const Caps& caps = {}) {
  int bits = popcount(s);
  if (bits < 63 && (1LL << bits) > caps.max_subsets)
    throw capacity_error("value: 2^" + std::to_string(bits) +
                         " subsets exceeds cap " + std::to_string(caps.max_subsets));
  double best = 0.0;  // T = empty set is always feasible and worth 0
  ItemMask sub = s;
  while (true) {
    if (sub != 0 && feas.contains(sub)) {
      double total = 0.0;
      for (const auto& [e, w] : profile.weights)
        if ((e.mask() & ~sub) == 0) total += w;
      best = std::max(best, total);
    }
    if (sub == 0) break;
    sub = (sub - 1) & s;
  }
  return best;
}

/// Full table of v(S) for every S subseteq M, computed by subset DP.
/// Must agree with value() everywhere; kept as the batch engine.
inline std::vector<double> valuation_table(int m, const WeightProfile& profile,
                                           const FeasibilityFamily& feas,
                                           const Caps& caps = {}) {
  if ((1LL << m) > caps.max_subsets)
    throw capacity_error("valuation_table: 2^" + std::to_string(m) +
                         " exceeds subset cap");
  size_t n = size_t{1} << m;
  std::vector<double> edgesum(n, 0.0);
  for (const auto& [e, w] : profile.weights) edgesum[e.mask()] += w;
  // superset-sum: edgesum[S] = sum of w(U) over U subseteq S
  for (int i = 0; i < m; ++i)
    for (ItemMask s = 0; s < n; ++s)
      if (s & (ItemMask{1} << i)) edgesum[s] += edgesum[s ^ (ItemMask{1} << i)];
  std::vector<double> val(n, 0.0);
  for (ItemMask s = 1; s < n; ++s) {
    double v = feas.contains(s) ? edgesum[s] : 0.0;
    for (int i = 0; i < m; ++i)
      if (s & (ItemMask{1} << i)) v = std::max(v, val[s ^ (ItemMask{1} << i)]);
    val[s] = v;
  }
  return val;
}

/// Max over items of the number of active edges containing it.
inline int complementarity_degree(const HypergraphPrior& prior) {
  std::vector<int> count(std::max(prior.m, 1), 0);
  int best = 0;
  for (const auto& e : prior.active_edges())
    for (int i : e.items) best = std::max(best, ++count[i]);
  return best;
}

/// Exact product enumeration of the prior. Parallel arrays keep the hot loops
/// tight; profile(i) materializes the plain mapping.
struct ProfileEnumeration {
  std::vector<Hyperedge> edges;               // active edges, sorted
  std::vector<std::vector<double>> weights;   // [profile][edge index]
  std::vector<double> probs;                  // multiply across edges

  size_t size() const { return probs.size(); }
  WeightProfile profile(size_t i) const {
    WeightProfile p;
    p.weights.reserve(edges.size());
    for (size_t j = 0; j < edges.size(); ++j)
      p.weights.push_back({edges[j], weights[i][j]});
    return p;
  }
};

inline ProfileEnumeration enumerate_profiles(const HypergraphPrior& prior,
                                             const Caps& caps = {}) {
  ProfileEnumeration out;
  out.edges = prior.active_edges();
  long long count = 1;
  std::vector<const DiscreteDist*> dists;
  for (const auto& e : out.edges) {
    const DiscreteDist* d = prior.dist_of(e);
    dists.push_back(d);
    count *= d->size();
    if (count > caps.max_profiles)
      throw capacity_error(
          "enumerate_profiles: profile count exceeds cap " +
          std::to_string(caps.max_profiles) + "; use Monte Carlo mode");
  }
  size_t k = out.edges.size();
  std::vector<int> idx(k, 0);
  out.weights.reserve(static_cast<size_t>(count));
  out.probs.reserve(static_cast<size_t>(count));
  while (true) {
    std::vector<double> w(k);
    double p = 1.0;
    for (size_t j = 0; j < k; ++j) {
      w[j] = dists[j]->support[idx[j]];
      p *= dists[j]->pmf[idx[j]];
    }
    out.weights.push_back(std::move(w));
    out.probs.push_back(p);
    size_t j = 0;
    for (; j < k; ++j) {
      if (++idx[j] < dists[j]->size()) break;
      idx[j] = 0;
    }
    if (j == k) break;
  }
  return out;
}

/// Uniform double in [0,1) from the top 53 bits; avoids the
/// implementation-defined std::uniform_real_distribution so that seeded runs
/// are identical across platforms.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double sample_dist(const DiscreteDist& d, std::mt19937_64& rng) {
  double u = uniform01(rng);
  double acc = 0.0;
  for (int i = 0; i < d.size(); ++i) {
    acc += d.pmf[i];
    if (u < acc) return d.support[i];
  }
  return d.support.back();
}

inline WeightProfile sample_profile(const HypergraphPrior& prior,
                                    std::mt19937_64& rng) {
  WeightProfile p;
  for (const auto& [e, d] : prior.edges)
    if (d.is_active()) p.weights.push_back({e, sample_dist(d, rng)});
  return p;
}

/// Exact enumeration with the full v(S) table per profile.
struct EnumeratedValuations {
  ProfileEnumeration en;
  std::vector<std::vector<double>> val;  // [profile][item mask]
};

inline EnumeratedValuations enumerate_valuations(const HypergraphPrior& prior,
                                                 const Caps& caps = {}) {
  EnumeratedValuations out;
  out.en = enumerate_profiles(prior, caps);
  if (static_cast<long long>(out.en.size()) * (1LL << prior.m) > caps.max_subsets * 64)
    throw capacity_error("enumerate_valuations: profile x subset table exceeds cap");
  out.val.reserve(out.en.size());
  for (size_t i = 0; i < out.en.size(); ++i)
    out.val.push_back(
        valuation_table(prior.m, out.en.profile(i), prior.feasibility, caps));
  return out;
}

/// The region edge A = argmax over nonempty T of w(T), ties broken
/// lexicographically (inactive edges weigh 0, so a full tie returns the
/// singleton of the smallest item).
inline Hyperedge region(const WeightProfile& profile, int m) {
  if (m <= 0) throw std::invalid_argument("region: need at least one item");
  const Hyperedge* best = nullptr;
  double best_w = 0.0;
  for (const auto& [e, w] : profile.weights) {
    if (w > best_w) {
      best = &e;
      best_w = w;
    }
  }
  if (best == nullptr) return Hyperedge({0});
  return *best;
}

}  // namespace callab
