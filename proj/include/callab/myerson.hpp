#pragma once

#include "callab/model.hpp"

namespace callab {

/// Discrete virtual value phi(x) = x - (x+ - x) * Pr[X > x] / f(x), where x+
/// is the next support point; at the top of the support phi(x) = x.
inline double virtual_value(const DiscreteDist& dist, double x) {
  int i = dist.index_of(x);
  if (i < 0) throw std::domain_error("virtual_value: x not in support");
  if (i + 1 == dist.size()) return x;
  double gap = dist.support[i + 1] - x;
  return x - gap * dist.pr_gt(x) / dist.pmf[i];
}

/// Virtual values and their ironed counterparts, aligned with the support.
/// phi_bar is the slope of the upper concave envelope of the revenue curve in
/// quantile space, computed by weighted pooling of adjacent violators
/// (pooling an interval averages phi with pmf weights, which is exactly the
/// envelope's chord slope).
struct VirtualValueTable {
  std::vector<double> support;
  std::vector<double> phi;
  std::vector<double> phi_bar;
  std::vector<int> pool_start;  // first support index of each point's pool

  double phi_at(double x) const { return at(phi, x); }
  double phi_bar_at(double x) const { return at(phi_bar, x); }
  /// True iff x starts an ironed pool; there the envelope touches the
  /// revenue curve, so E[phi_bar 1[X >= x]] = E[phi 1[X >= x]].
  bool is_touch_point(double x) const {
    int i = index(x);
    return pool_start[i] == i;
  }

 private:
  int index(double x) const {
    auto it = std::lower_bound(support.begin(), support.end(), x);
    if (it == support.end() || *it != x)
      throw std::domain_error("VirtualValueTable: x not in support");
    return static_cast<int>(it - support.begin());
  }
  double at(const std::vector<double>& v, double x) const { return v[index(x)]; }
};

inline VirtualValueTable iron(const DiscreteDist& dist) {
  VirtualValueTable t;
  t.support = dist.support;
  int n = dist.size();
  t.phi.resize(n);
  for (int i = 0; i < n; ++i) t.phi[i] = virtual_value(dist, dist.support[i]);
  // PAVA, enforcing phi_bar non-decreasing in x.
  struct Pool {
    double sum, weight;
    int start;
  };
  std::vector<Pool> stack;
  for (int i = 0; i < n; ++i) {
    Pool cur{t.phi[i] * dist.pmf[i], dist.pmf[i], i};
    while (!stack.empty() &&
           stack.back().sum * cur.weight >= cur.sum * stack.back().weight) {
      cur.sum += stack.back().sum;
      cur.weight += stack.back().weight;
      cur.start = stack.back().start;
      stack.pop_back();
    }
    stack.push_back(cur);
  }
  t.phi_bar.assign(n, 0.0);
  t.pool_start.assign(n, 0);
  for (size_t pi = 0; pi < stack.size(); ++pi) {
    int lo = stack[pi].start;
    int hi = (pi + 1 < stack.size()) ? stack[pi + 1].start : n;
    // Singleton pools keep phi exactly (no round trip through sum/weight).
    double v = hi - lo == 1 ? t.phi[lo] : stack[pi].sum / stack[pi].weight;
    for (int j = lo; j < hi; ++j) {
      t.phi_bar[j] = v;
      t.pool_start[j] = lo;
    }
  }
  return t;
}

/// Best posted price restricted to the support (never suboptimal for a
/// discrete distribution); ties break toward the lower price.
inline std::pair<double, double> optimal_posted_price(const DiscreteDist& dist) {
  double best_p = dist.support[0], best_r = -1.0;
  for (int i = 0; i < dist.size(); ++i) {
    double p = dist.support[i];
    double r = p * dist.pr_ge(p);
    if (r > best_r + 1e-15 * std::abs(best_r)) {
      best_r = r;
      best_p = p;
    }
  }
  return {best_p, best_r};
}

/// OPTcopies = E[max_T max{phi_bar_T(w(T)), 0}], the Myerson revenue of the
/// copies environment.
inline double opt_copies(const HypergraphPrior& prior, const Caps& caps = {}) {
  ProfileEnumeration en = enumerate_profiles(prior, caps);
  std::vector<VirtualValueTable> tables;
  for (const auto& e : en.edges) tables.push_back(iron(*prior.dist_of(e)));
  double total = 0.0;
  for (size_t i = 0; i < en.size(); ++i) {
    double best = 0.0;
    for (size_t j = 0; j < en.edges.size(); ++j)
      best = std::max(best, tables[j].phi_bar_at(en.weights[i][j]));
    total += en.probs[i] * best;
  }
  return total;
}

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long long samples = 0;
};

inline MonteCarloEstimate opt_copies_mc(const HypergraphPrior& prior,
                                        long long n, std::mt19937_64& rng) {
  auto edges = prior.active_edges();
  std::vector<VirtualValueTable> tables;
  for (const auto& e : edges) tables.push_back(iron(*prior.dist_of(e)));
  double sum = 0.0, sumsq = 0.0;
  for (long long i = 0; i < n; ++i) {
    double best = 0.0;
    for (size_t j = 0; j < edges.size(); ++j) {
      double w = sample_dist(*prior.dist_of(edges[j]), rng);
      best = std::max(best, tables[j].phi_bar_at(w));
    }
    sum += best;
    sumsq += best * best;
  }
  MonteCarloEstimate est;
  est.samples = n;
  est.mean = sum / n;
  double var = std::max(0.0, sumsq / n - est.mean * est.mean);
  est.std_error = std::sqrt(var / n);
  return est;
}

/// Two-point randomized per-edge price from the copies construction: the
/// price is price_hi with probability prob_hi, else price_lo. A price of
/// +inf never sells.
struct EdgePrice {
  Hyperedge edge;
  double price_hi = kInf;
  double price_lo = kInf;
  double prob_hi = 1.0;
  // diagnostics
  double win_prob = 0.0;   // q_T under the first-wins tie-break
  double thresh_hi = kInf; // thresholds on X_T = max{0, phi_bar}
  double thresh_lo = kInf;

  double expected_revenue(const DiscreteDist& d) const {
    double hi = std::isinf(price_hi) ? 0.0 : price_hi * d.pr_ge(price_hi);
    double lo = std::isinf(price_lo) ? 0.0 : price_lo * d.pr_ge(price_lo);
    return prob_hi * hi + (1.0 - prob_hi) * lo;
  }
  double expected_sale_prob(const DiscreteDist& d) const {
    double hi = std::isinf(price_hi) ? 0.0 : d.pr_ge(price_hi);
    double lo = std::isinf(price_lo) ? 0.0 : d.pr_ge(price_lo);
    return prob_hi * hi + (1.0 - prob_hi) * lo;
  }
};

using RandomizedEdgePricing = std::vector<EdgePrice>;

namespace detail {

/// Distribution of X = max{0, phi_bar(x)} as an honest discrete distribution
/// (atom at 0 included when phi_bar is ever negative or zero).
inline DiscreteDist clamped_virtual_dist(const DiscreteDist& d,
                                         const VirtualValueTable& t) {
  std::map<double, double> mass;
  for (int i = 0; i < d.size(); ++i)
    mass[std::max(0.0, t.phi_bar[i])] += d.pmf[i];
  std::vector<double> xs, ps;
  for (auto& [x, p] : mass) {
    xs.push_back(x);
    ps.push_back(p);
  }
  return DiscreteDist(std::move(xs), std::move(ps));
}

/// Least support value x with phi_bar(x) >= t, or +inf if none.
inline double price_for_threshold(const DiscreteDist& d,
                                  const VirtualValueTable& t, double thresh) {
  for (int i = 0; i < d.size(); ++i)
    if (t.phi_bar[i] >= thresh) return d.support[i];
  return kInf;
}

}  // namespace detail

/// The copies-environment price construction: X_T = max{0, phi_bar_T(x)}; q_T is the
/// probability that X_T wins under the first-wins lexicographic tie-break;
/// the threshold t_T mixes two adjacent support points of X_T so that
/// Pr[X_T >= t_T] = q * q_T exactly; the price is the least value with
/// phi_bar above the threshold.
inline RandomizedEdgePricing cpp_prices(const HypergraphPrior& prior, double q) {
  if (!(q > 0.0 && q <= 1.0))
    throw std::invalid_argument("cpp_prices: q must be in (0, 1]");
  auto edges = prior.active_edges();
  size_t k = edges.size();
  std::vector<const DiscreteDist*> dists(k);
  std::vector<VirtualValueTable> tables(k);
  std::vector<DiscreteDist> xdists;
  xdists.reserve(k);
  for (size_t j = 0; j < k; ++j) {
    dists[j] = prior.dist_of(edges[j]);
    tables[j] = iron(*dists[j]);
    xdists.push_back(detail::clamped_virtual_dist(*dists[j], tables[j]));
  }
  RandomizedEdgePricing out;
  for (size_t j = 0; j < k; ++j) {
    const DiscreteDist& xj = xdists[j];
    // q_T = sum over x of f(x) * Pr[earlier edges < x] * Pr[later edges <= x]
    double win = 0.0;
    for (int xi = 0; xi < xj.size(); ++xi) {
      double x = xj.support[xi];
      double p = xj.pmf[xi];
      for (size_t l = 0; l < k && p > 0.0; ++l) {
        if (l == j) continue;
        double keep = (l < j) ? 1.0 - xdists[l].pr_ge(x)   // strictly below
                              : 1.0 - xdists[l].pr_gt(x);  // at most x
        p *= keep;
      }
      win += p;
    }
    double target = q * win;  // Pr[X_T >= t_T] must equal this
    EdgePrice ep;
    ep.edge = edges[j];
    ep.win_prob = win;
    // Achievable sale probabilities on X: Pr[X >= s_i] for support points,
    // plus 0 at an infinite threshold. Find the adjacent pair bracketing the
    // target and mix linearly.
    int n = xj.size();
    std::vector<double> tail(n + 1);  // tail[i] = Pr[X >= support[i]], tail[n] = 0
    tail[n] = 0.0;
    for (int i = n - 1; i >= 0; --i) tail[i] = tail[i + 1] + xj.pmf[i];
    int hi = n;  // threshold index; n means +inf
    while (hi > 0 && tail[hi - 1] <= target) --hi;
    // Now tail[hi] <= target <= tail[hi-1] (hi >= 1 since tail[0] = 1 >= target).
    if (hi == 0 || tail[hi] == target) {
      double thr = (hi == n) ? kInf : xj.support[hi];
      ep.thresh_hi = ep.thresh_lo = thr;
      ep.prob_hi = 1.0;
      ep.price_hi = ep.price_lo =
          std::isinf(thr) ? kInf : detail::price_for_threshold(*dists[j], tables[j], thr);
    } else {
      double t_hi = (hi == n) ? kInf : xj.support[hi];
      double t_lo = xj.support[hi - 1];
      double pi = (target - tail[hi]) / (tail[hi - 1] - tail[hi]);
      ep.thresh_hi = t_hi;
      ep.thresh_lo = t_lo;
      ep.prob_hi = 1.0 - pi;  // prob of the higher threshold (higher price)
      ep.price_hi =
          std::isinf(t_hi) ? kInf : detail::price_for_threshold(*dists[j], tables[j], t_hi);
      ep.price_lo = detail::price_for_threshold(*dists[j], tables[j], t_lo);
    }
    out.push_back(ep);
  }
  return out;
}

}  // namespace callab
