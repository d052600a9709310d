#pragma once

#include "callab/mechanisms.hpp"
#include "callab/myerson.hpp"
#include "callab/optrev.hpp"
#include "callab/partition.hpp"

namespace callab {

inline constexpr double kCoreLipschitzFactor = 2.0 + 1.0 / 0.6931471805599453;  // 2 + 1/ln 2

/// Expected tail count c(t) = sum over edges of Pr[w(T) > t].
inline double tail_count(const HypergraphPrior& prior, double t) {
  double c = 0.0;
  for (const auto& [e, d] : prior.edges)
    if (d.is_active()) c += d.pr_gt(t);
  return c;
}

/// Two adjacent achievable thresholds mixed so the expected tail count hits
/// the target exactly: theta * c(t_lo) + (1 - theta) * c(t_hi) = k.
struct RandomizedCutoff {
  double t_lo = 0.0;
  double t_hi = 0.0;
  double theta = 1.0;  // probability of using t_lo
  bool degenerate = false;

  double expected_threshold() const { return theta * t_lo + (1.0 - theta) * t_hi; }
};

inline RandomizedCutoff choose_cutoff(const HypergraphPrior& prior, double k) {
  std::vector<double> cand{0.0};
  for (const auto& [e, d] : prior.edges)
    if (d.is_active())
      for (double x : d.support) cand.push_back(x);
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

  RandomizedCutoff cut;
  double c0 = tail_count(prior, 0.0);
  if (k > c0) {  // unattainable tail count: all mass at threshold 0, flagged
    cut.degenerate = true;
    return cut;
  }
  for (size_t i = 0; i < cand.size(); ++i) {
    double c = tail_count(prior, cand[i]);
    if (c > k) continue;
    if (c == k || i == 0) {
      cut.t_lo = cut.t_hi = cand[i];
      cut.theta = 1.0;
      return cut;
    }
    cut.t_hi = cand[i];
    cut.t_lo = cand[i - 1];
    double c_lo = tail_count(prior, cut.t_lo);
    cut.theta = (k - c) / (c_lo - c);
    return cut;
  }
  // k < 0 cannot happen for k >= 0 since c(top support) = 0.
  cut.t_lo = cut.t_hi = cand.back();
  return cut;
}

namespace detail {

/// Index of the region edge within en.edges, or -1 when the region edge is
/// inactive. A full tie at weight zero makes the singleton of item 0 the
/// region; it may itself be an active edge.
inline int region_index(const ProfileEnumeration& en, size_t i) {
  int best = -1;
  double best_w = 0.0;
  for (size_t j = 0; j < en.edges.size(); ++j) {
    if (en.weights[i][j] > best_w) {
      best = static_cast<int>(j);
      best_w = en.weights[i][j];
    }
  }
  if (best < 0 && !en.edges.empty() && en.edges[0] == Hyperedge({0}))
    return 0;
  return best;
}

/// sum_{T subseteq S} w(T) for every S, with one edge optionally excluded.
inline std::vector<double> edge_sum_table(int m, const ProfileEnumeration& en,
                                          size_t i, int exclude = -1) {
  size_t n = size_t{1} << m;
  std::vector<double> sum(n, 0.0);
  for (size_t j = 0; j < en.edges.size(); ++j) {
    if (static_cast<int>(j) == exclude) continue;
    sum[en.edges[j].mask()] += en.weights[i][j];
  }
  for (int b = 0; b < m; ++b)
    for (ItemMask s = 0; s < n; ++s)
      if (s & (ItemMask{1} << b)) sum[s] += sum[s ^ (ItemMask{1} << b)];
  return sum;
}

inline std::vector<ItemMask> feasible_masks(const HypergraphPrior& prior) {
  std::vector<ItemMask> out;
  for (ItemMask s = 0; s < (ItemMask{1} << prior.m); ++s)
    if (prior.feasibility.contains(s)) out.push_back(s);
  return out;
}

}  // namespace detail

/// SINGLE = E[sum_S max{0, phi_bar_S(w(S))} 1[v in R_S]].
inline double benchmark_single(const HypergraphPrior& prior, const Caps& caps = {}) {
  ProfileEnumeration en = enumerate_profiles(prior, caps);
  std::vector<VirtualValueTable> tables;
  for (const auto& e : en.edges) tables.push_back(iron(*prior.dist_of(e)));
  double total = 0.0;
  for (size_t i = 0; i < en.size(); ++i) {
    int a = detail::region_index(en, i);
    if (a < 0) continue;  // inactive region edge contributes 0
    total += en.probs[i] * std::max(0.0, tables[a].phi_bar_at(en.weights[i][a]));
  }
  return total;
}

/// NON-FAVORITE = E[max over feasible S of sum_{T subseteq S} w(T) 1[v not in R_T]].
inline double benchmark_nonfav(const HypergraphPrior& prior, const Caps& caps = {}) {
  ProfileEnumeration en = enumerate_profiles(prior, caps);
  auto feas = detail::feasible_masks(prior);
  double total = 0.0;
  for (size_t i = 0; i < en.size(); ++i) {
    int a = detail::region_index(en, i);
    auto sum = detail::edge_sum_table(prior.m, en, i, a);
    double best = 0.0;
    for (ItemMask s : feas) best = std::max(best, sum[s]);
    total += en.probs[i] * best;
  }
  return total;
}

namespace detail {

/// CORE and TAIL at one deterministic threshold.
inline std::pair<double, double> core_tail_at(const HypergraphPrior& prior,
                                              const ProfileEnumeration& en,
                                              const std::vector<ItemMask>& feas,
                                              double t) {
  double core = 0.0, tail = 0.0;
  size_t n = size_t{1} << prior.m;
  for (size_t i = 0; i < en.size(); ++i) {
    std::vector<double> sum(n, 0.0);
    for (size_t j = 0; j < en.edges.size(); ++j)
      if (en.weights[i][j] <= t) sum[en.edges[j].mask()] += en.weights[i][j];
    for (int b = 0; b < prior.m; ++b)
      for (ItemMask s = 0; s < n; ++s)
        if (s & (ItemMask{1} << b)) sum[s] += sum[s ^ (ItemMask{1} << b)];
    double best = 0.0;
    for (ItemMask s : feas) best = std::max(best, sum[s]);
    core += en.probs[i] * best;

    int a = region_index(en, i);
    double tl = 0.0;
    for (size_t j = 0; j < en.edges.size(); ++j)
      if (en.weights[i][j] > t && static_cast<int>(j) != a) tl += en.weights[i][j];
    tail += en.probs[i] * tl;
  }
  return {core, tail};
}

}  // namespace detail

/// (CORE, TAIL) as the theta-mixture over the cutoff's two thresholds.
inline std::pair<double, double> core_tail(const HypergraphPrior& prior,
                                           const RandomizedCutoff& cut,
                                           const Caps& caps = {}) {
  ProfileEnumeration en = enumerate_profiles(prior, caps);
  auto feas = detail::feasible_masks(prior);
  auto lo = detail::core_tail_at(prior, en, feas, cut.t_lo);
  if (cut.theta == 1.0) return lo;
  auto hi = detail::core_tail_at(prior, en, feas, cut.t_hi);
  return {cut.theta * lo.first + (1.0 - cut.theta) * hi.first,
          cut.theta * lo.second + (1.0 - cut.theta) * hi.second};
}

/// v_CORE over a set U of hyperedges: max over U' subseteq U whose item
/// union is feasible of the truncated weights x_T = w(T) 1[w(T) <= t].
inline double v_core_value(const HypergraphPrior& prior, const WeightProfile& profile,
                           double t, const std::vector<Hyperedge>& hyperedges,
                           const Caps& caps = {}) {
  size_t k = hyperedges.size();
  if (k < 63 && (1LL << k) > caps.max_subsets)
    throw capacity_error("v_core_value: 2^" + std::to_string(k) + " exceeds cap");
  std::vector<double> x(k);
  std::vector<ItemMask> masks(k);
  for (size_t j = 0; j < k; ++j) {
    double w = profile.weight_of(hyperedges[j]);
    x[j] = (w <= t) ? w : 0.0;
    masks[j] = hyperedges[j].mask();
  }
  double best = 0.0;
  for (std::uint64_t sub = 0; sub < (std::uint64_t{1} << k); ++sub) {
    ItemMask u = 0;
    double s = 0.0;
    for (size_t j = 0; j < k; ++j)
      if (sub & (std::uint64_t{1} << j)) {
        u |= masks[j];
        s += x[j];
      }
    if (prior.feasibility.contains(u)) best = std::max(best, s);
  }
  return best;
}

/// Exact distribution of v_CORE(N) at one deterministic threshold, where N is
/// the full active-edge set (computed via the equivalent max-over-feasible-S
/// form).
inline DiscreteDist v_core_dist(const HypergraphPrior& prior, double t,
                                const Caps& caps = {}) {
  ProfileEnumeration en = enumerate_profiles(prior, caps);
  auto feas = detail::feasible_masks(prior);
  size_t n = size_t{1} << prior.m;
  std::map<double, double> mass;
  for (size_t i = 0; i < en.size(); ++i) {
    std::vector<double> sum(n, 0.0);
    for (size_t j = 0; j < en.edges.size(); ++j)
      if (en.weights[i][j] <= t) sum[en.edges[j].mask()] += en.weights[i][j];
    for (int b = 0; b < prior.m; ++b)
      for (ItemMask s = 0; s < n; ++s)
        if (s & (ItemMask{1} << b)) sum[s] += sum[s ^ (ItemMask{1} << b)];
    double best = 0.0;
    for (ItemMask s : feas) best = std::max(best, sum[s]);
    mass[best] += en.probs[i];
  }
  std::vector<double> xs, ps;
  for (auto& [x, p] : mass) {
    xs.push_back(x);
    ps.push_back(p);
  }
  return DiscreteDist(std::move(xs), std::move(ps));
}

/// Lower median: smallest support point with CDF >= 1/2.
inline double lower_median(const DiscreteDist& d) {
  double acc = 0.0;
  for (int i = 0; i < d.size(); ++i) {
    acc += d.pmf[i];
    if (acc >= 0.5) return d.support[i];
  }
  return d.support.back();
}

/// Phi^lambda(v)(S) for the region-bump flow: v(S) minus the bump term on the
/// region edge; zero bump at the top of the region edge's support.
inline double virtual_transform(const HypergraphPrior& prior,
                                const WeightProfile& profile, ItemMask s,
                                const Caps& caps = {}) {
  Hyperedge a = region(profile, prior.m);
  double vs = value(profile, prior.feasibility, s, caps);
  const DiscreteDist* da = prior.dist_of(a);
  if (da == nullptr || !da->is_active()) return vs;
  double wa = profile.weight_of(a);
  double wnext = da->next_above(wa);
  if (std::isinf(wnext)) return vs;
  WeightProfile bumped = profile;
  bumped.set(a, wnext);
  double vps = value(bumped, prior.feasibility, s, caps);
  return vs - (vps - vs) * da->pr_ge(wnext) / da->pr_eq(wa);
}

/// Report of the duality upper bound and the pointwise bound on the virtual
/// transform, evaluated over the whole enumeration.
struct VirtualTransformAudit {
  double exp_max = 0.0;            // E[max_S Phi(v)(S)]
  double max_pointwise_excess = -kInf;  // max over (profile, S) of Phi - bound
};

inline VirtualTransformAudit audit_virtual_transform(const HypergraphPrior& prior,
                                                     const Caps& caps = {}) {
  ProfileEnumeration en = enumerate_profiles(prior, caps);
  size_t n = size_t{1} << prior.m;
  VirtualTransformAudit out;
  std::vector<VirtualValueTable> tables;
  for (const auto& e : en.edges) tables.push_back(iron(*prior.dist_of(e)));
  for (size_t i = 0; i < en.size(); ++i) {
    WeightProfile profile = en.profile(i);
    auto val = valuation_table(prior.m, profile, prior.feasibility, caps);
    int a = detail::region_index(en, i);
    double ratio = 0.0;
    std::vector<double> val_bumped;
    double phi_a = 0.0;
    if (a >= 0) {
      const DiscreteDist& da = *prior.dist_of(en.edges[a]);
      double wa = en.weights[i][a];
      phi_a = virtual_value(da, wa);
      double wnext = da.next_above(wa);
      if (!std::isinf(wnext)) {
        ratio = da.pr_ge(wnext) / da.pr_eq(wa);
        WeightProfile bumped = profile;
        bumped.set(en.edges[a], wnext);
        val_bumped = valuation_table(prior.m, bumped, prior.feasibility, caps);
      }
    }
    // Exclude the region edge for the flow bound's first term.
    WeightProfile excl = profile;
    if (a >= 0) excl.set(en.edges[a], 0.0);
    auto val_excl = valuation_table(prior.m, excl, prior.feasibility, caps);

    double bound_tail = std::max(0.0, phi_a);
    double best = 0.0;  // S = empty gives Phi = 0
    for (ItemMask s = 0; s < n; ++s) {
      double phi = val[s];
      if (!val_bumped.empty()) phi -= (val_bumped[s] - val[s]) * ratio;
      best = std::max(best, phi);
      double excess = phi - (val_excl[s] + bound_tail);
      out.max_pointwise_excess = std::max(out.max_pointwise_excess, excess);
    }
    out.exp_max += en.probs[i] * best;
  }
  return out;
}

/// One verified inequality from the proof chain.
struct InequalityCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  bool skipped = false;
  std::string note;

  double slack() const { return rhs - lhs; }
};

struct ChainConfig {
  double k = 1.66;  // target tail count for the cutoff
  double q = 1.0;   // copies-pricing parameter for the injected rep prices
  PriceGridConfig grid;
  Caps caps;
};

/// Everything check_chain measures, plus the per-inequality verdicts.
struct BenchmarkReport {
  int d = 0;
  long long n_profiles = 0;
  double opt_copies = 0.0;
  double single = 0.0;
  double nonfav = 0.0;
  double core = 0.0;
  double tail = 0.0;
  double brev_price = 0.0;
  double brev = 0.0;
  double srev_star_lb = 0.0;
  double rev_lp = 0.0;
  double phi_max_exp = 0.0;
  double target_k = 0.0;
  RandomizedCutoff cutoff;
  double lp_residual = 0.0;
  long long lp_iterations = 0;
  bool rep_prices_injected = false;
  std::vector<InequalityCheck> checks;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.skipped && !c.pass) return false;
    return true;
  }
  const InequalityCheck* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

namespace detail {

inline void push_le(std::vector<InequalityCheck>& out, std::string name,
                    double lhs, double rhs, double tol, std::string note = {}) {
  InequalityCheck c;
  c.name = std::move(name);
  c.lhs = lhs;
  c.rhs = rhs;
  c.tolerance = tol;
  c.pass = lhs <= rhs + tol;
  c.note = std::move(note);
  out.push_back(std::move(c));
}

/// Representative-item pricings, one per partition part: each edge whose
/// high copies price clears 4 BREV gets half that price on its private item;
/// every other item is not offered.
inline std::vector<ItemPricing> representative_pricings(const HypergraphPrior& prior,
                                                 double brev_rev, double q) {
  auto edges = prior.active_edges();
  if (edges.empty()) return {};
  RandomizedEdgePricing cp = cpp_prices(prior, q);
  EdgePartition parts = partition_edges(edges);
  double barrier = 4.0 * brev_rev;
  std::vector<ItemPricing> out;
  for (const auto& part : parts.parts) {
    ItemPricing pricing = ItemPricing::none(prior.m);
    ItemMask part_union = 0;
    for (const auto& e : part) part_union |= e.mask();
    bool any = false;
    for (const auto& e : part) {
      auto it = std::find_if(cp.begin(), cp.end(),
                             [&](const EdgePrice& p) { return p.edge == e; });
      if (it == cp.end() || !(it->price_hi > barrier)) continue;
      const DiscreteDist& d = *prior.dist_of(e);
      double price;
      if (!(it->price_lo > barrier)) {
        price = it->price_hi;
      } else {
        double rev_hi = std::isinf(it->price_hi) ? 0.0 : it->price_hi * d.pr_ge(it->price_hi);
        double rev_lo = it->price_lo * d.pr_ge(it->price_lo);
        price = rev_hi > rev_lo ? it->price_hi : it->price_lo;
      }
      if (std::isinf(price)) continue;
      ItemMask others = 0;
      for (const auto& o : part)
        if (!(o == e)) others |= o.mask();
      ItemMask rep = e.mask() & ~others;
      if (rep == 0) continue;  // cannot happen for a verified partition
      int rep_item = std::countr_zero(rep);
      pricing.prices[rep_item] = price / 2.0;
      any = true;
    }
    if (any) out.push_back(std::move(pricing));
  }
  return out;
}

}  // namespace detail

/// Compute every benchmark quantity exactly and evaluate the full
/// revenue-approximation inequality chain on one instance.
inline BenchmarkReport check_chain(const HypergraphPrior& prior,
                                   const ChainConfig& cfg = {}) {
  constexpr double kTolExact = 1e-9;
  constexpr double kTolLp = 1e-6;
  const Caps& caps = cfg.caps;

  BenchmarkReport r;
  r.d = complementarity_degree(prior);
  r.target_k = cfg.k;

  ProfileEnumeration en = enumerate_profiles(prior, caps);
  r.n_profiles = static_cast<long long>(en.size());

  r.opt_copies = opt_copies(prior, caps);
  r.single = benchmark_single(prior, caps);
  r.nonfav = benchmark_nonfav(prior, caps);
  std::tie(r.brev_price, r.brev) = brev(prior, caps);

  r.cutoff = choose_cutoff(prior, cfg.k);
  std::tie(r.core, r.tail) = core_tail(prior, r.cutoff, caps);

  PriceGridConfig grid = cfg.grid;
  auto injected = detail::representative_pricings(prior, r.brev, cfg.q);
  grid.extra_pricings.insert(grid.extra_pricings.end(), injected.begin(),
                             injected.end());
  r.rep_prices_injected = true;
  r.srev_star_lb = srev_star_opt(prior, grid, caps).second;

  RevenueLP lp = build_lp(prior, caps);
  MechanismSolution sol = solve(lp);
  VerifyResult vr = verify_solution(lp, sol);
  if (!vr.ok)
    throw solver_error("check_chain: LP verification failed, residual " +
                       std::to_string(vr.max_residual));
  r.rev_lp = sol.objective;
  r.lp_residual = vr.max_residual;
  r.lp_iterations = sol.iterations;

  VirtualTransformAudit audit = audit_virtual_transform(prior, caps);
  r.phi_max_exp = audit.exp_max;

  auto& cks = r.checks;
  detail::push_le(cks, "rev_le_single_plus_nonfav", r.rev_lp,
                  r.single + r.nonfav, kTolLp);
  double simple_best = std::max(r.brev, r.srev_star_lb);
  detail::push_le(cks, "rev_le_4d16_simple", r.rev_lp,
                  (4.0 * r.d + 16.0) * simple_best, kTolLp,
                  "SREV* is the certified grid lower bound");
  detail::push_le(cks, "single_le_optcopies", r.single, r.opt_copies,
                  kTolExact);
  detail::push_le(cks, "single_le_4d_srev_4brev", r.single,
                  4.0 * r.d * r.srev_star_lb + 4.0 * r.brev, kTolExact,
                  "representative-item prices injected into the grid");
  detail::push_le(cks, "nonfav_le_core_tail", r.nonfav, r.core + r.tail,
                  kTolExact);
  double t_bar = r.cutoff.expected_threshold();
  detail::push_le(cks, "core_le_6brev_lipschitz", r.core,
                  6.0 * r.brev + t_bar * kCoreLipschitzFactor, kTolExact);
  double k_eff = r.cutoff.theta * tail_count(prior, r.cutoff.t_lo) +
                 (1.0 - r.cutoff.theta) * tail_count(prior, r.cutoff.t_hi);
  detail::push_le(cks, "tail_le_count_brev", r.tail, k_eff * r.brev, kTolExact,
                  r.cutoff.degenerate ? "degenerate cutoff regime" : "");
  {
    // Cutoff revenue bound on both deterministic components.
    double worst_lhs = -kInf, at_rhs = 0.0;
    for (double t : {r.cutoff.t_lo, r.cutoff.t_hi}) {
      double kc = tail_count(prior, t);
      double lhs = (1.0 - std::exp(-kc)) * t;
      if (lhs - r.brev > worst_lhs - at_rhs) {
        worst_lhs = lhs;
        at_rhs = r.brev;
      }
    }
    detail::push_le(cks, "brev_ge_cutoff_mass", worst_lhs, r.brev, kTolExact);
  }
  detail::push_le(cks, "nonfav_le_12brev", r.nonfav, 12.0 * r.brev,
                  kTolExact, r.cutoff.degenerate ? "degenerate cutoff regime" : "");
  detail::push_le(cks, "rev_le_exp_max_virtual", r.rev_lp, r.phi_max_exp, kTolLp);
  detail::push_le(cks, "virtual_pointwise_bound", audit.max_pointwise_excess, 0.0,
                  kTolExact);
  {
    // Exceedance price bound at every candidate threshold value.
    auto edges = prior.active_edges();
    std::vector<double> xs{0.0};
    for (const auto& e : edges)
      for (double x : prior.dist_of(e)->support) xs.push_back(x);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    double worst = 0.0;
    for (size_t j = 0; j < edges.size(); ++j) {
      for (double x : xs) {
        double pr_none = 1.0;
        for (size_t l = 0; l < edges.size(); ++l)
          if (l != j) pr_none *= 1.0 - prior.dist_of(edges[l])->pr_gt(x);
        worst = std::max(worst, x * (1.0 - pr_none));
      }
    }
    detail::push_le(cks, "exceedance_le_brev", worst, r.brev, kTolExact);
  }
  {
    // Median concentration and dominance on both deterministic components.
    DiscreteDist vm = grand_bundle_dist(prior, caps);
    double worst54 = -kInf, rhs54 = 0.0, worst_dom = -kInf;
    for (double t : {r.cutoff.t_lo, r.cutoff.t_hi}) {
      DiscreteDist vc = v_core_dist(prior, t, caps);
      double a = lower_median(vc);
      double lhs = vc.expectation();
      double rhs = 3.0 * a + t * kCoreLipschitzFactor;
      if (lhs - rhs > worst54 - rhs54) {
        worst54 = lhs;
        rhs54 = rhs;
      }
      for (double x : vc.support)
        worst_dom = std::max(worst_dom, vc.pr_ge(x) - vm.pr_ge(x));
    }
    detail::push_le(cks, "core_median_concentration", worst54, rhs54, kTolExact);
    detail::push_le(cks, "vcore_dominated", worst_dom, 0.0, kTolExact);
  }
  {
    // Exact union bound for the per-edge threshold events at both components.
    double worst = -kInf, rhs = 0.0;
    for (double t : {r.cutoff.t_lo, r.cutoff.t_hi}) {
      double pr_none = 1.0, kc = 0.0;
      for (const auto& e : prior.active_edges()) {
        double p = prior.dist_of(e)->pr_gt(t);
        pr_none *= 1.0 - p;
        kc += p;
      }
      double lhs = 1.0 - std::exp(-kc);
      if (lhs - (1.0 - pr_none) > worst - rhs) {
        worst = lhs;
        rhs = 1.0 - pr_none;
      }
    }
    detail::push_le(cks, "union_bound_exact", worst, rhs, kTolExact);
  }
  detail::push_le(cks, "rev_ge_brev", r.brev, r.rev_lp, kTolLp,
                  "simple mechanisms are feasible points");
  detail::push_le(cks, "rev_ge_srev_lb", r.srev_star_lb, r.rev_lp, kTolLp);
  return r;
}

}  // namespace callab
