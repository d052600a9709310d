#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace callab {

/// Thrown when an exact computation would exceed a configured enumeration
/// cap. Callers are expected to fall back to Monte Carlo mode.
class capacity_error : public std::runtime_error {
 public:
  explicit capacity_error(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown on malformed instance files or report inputs.
class parse_error : public std::runtime_error {
 public:
  explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when the LP solver cannot certify its result.
class solver_error : public std::runtime_error {
 public:
  explicit solver_error(const std::string& what) : std::runtime_error(what) {}
};

/// Enumeration caps. These are configuration, not constants: exceeding one
/// raises capacity_error, never silent truncation.
struct Caps {
  long long max_profiles = 1'000'000;  // product of support sizes
  long long max_subsets = 1LL << 22;   // subsets visited per valuation query
  long long max_lp_vars = 5'000;       // allocation + payment variables
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

using ItemMask = std::uint64_t;

inline int popcount(ItemMask s) { return std::popcount(s); }

inline ItemMask full_mask(int m) {
  return m >= 64 ? ~ItemMask{0} : ((ItemMask{1} << m) - 1);
}

/// A hyperedge: a nonempty set of item indices in canonical sorted order.
/// operator< is the lexicographic order used everywhere for tie-breaking
/// (element-wise on the sorted sequence, a strict prefix precedes its
/// extensions).
struct Hyperedge {
  std::vector<int> items;

  Hyperedge() = default;
  explicit Hyperedge(std::vector<int> idx) : items(std::move(idx)) {
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
  }
  static Hyperedge from_mask(ItemMask mask) {
    Hyperedge e;
    for (int i = 0; mask != 0; ++i, mask >>= 1)
      if (mask & 1) e.items.push_back(i);
    return e;
  }

  ItemMask mask() const {
    ItemMask s = 0;
    for (int i : items) s |= ItemMask{1} << i;
    return s;
  }
  int size() const { return static_cast<int>(items.size()); }
  bool contains(int item) const {
    return std::binary_search(items.begin(), items.end(), item);
  }
  std::string str() const {
    std::string out = "{";
    for (size_t i = 0; i < items.size(); ++i) {
      if (i) out += ",";
      out += std::to_string(items[i]);
    }
    return out + "}";
  }

  friend auto operator<=>(const Hyperedge&, const Hyperedge&) = default;
};

/// Finite-support single-dimensional value distribution.
struct DiscreteDist {
  std::vector<double> support;  // strictly ascending, >= 0, finite
  std::vector<double> pmf;      // > 0, sums to 1 within 1e-12

  DiscreteDist() = default;
  DiscreteDist(std::vector<double> xs, std::vector<double> ps)
      : support(std::move(xs)), pmf(std::move(ps)) {
    validate();
  }
  static DiscreteDist point_mass(double c) { return DiscreteDist({c}, {1.0}); }

  void validate() const {
    if (support.empty() || support.size() != pmf.size())
      throw std::invalid_argument("DiscreteDist: empty or mismatched support/pmf");
    double total = 0.0;
    for (size_t i = 0; i < support.size(); ++i) {
      if (!(support[i] >= 0.0) || !std::isfinite(support[i]))
        throw std::invalid_argument("DiscreteDist: support values must be finite and >= 0");
      if (i > 0 && !(support[i] > support[i - 1]))
        throw std::invalid_argument("DiscreteDist: support must be strictly ascending");
      if (!(pmf[i] > 0.0))
        throw std::invalid_argument("DiscreteDist: probabilities must be positive");
      total += pmf[i];
    }
    if (std::abs(total - 1.0) > 1e-12)
      throw std::invalid_argument("DiscreteDist: pmf must sum to 1 within 1e-12");
  }

  int size() const { return static_cast<int>(support.size()); }
  double min() const { return support.front(); }
  double max() const { return support.back(); }

  /// Index of x in the support, or -1.
  int index_of(double x) const {
    auto it = std::lower_bound(support.begin(), support.end(), x);
    if (it == support.end() || *it != x) return -1;
    return static_cast<int>(it - support.begin());
  }

  double pr_eq(double x) const {
    int i = index_of(x);
    return i < 0 ? 0.0 : pmf[i];
  }
  double pr_gt(double x) const {
    double p = 0.0;
    for (int i = size() - 1; i >= 0 && support[i] > x; --i) p += pmf[i];
    return p;
  }
  double pr_ge(double x) const {
    double p = 0.0;
    for (int i = size() - 1; i >= 0 && support[i] >= x; --i) p += pmf[i];
    return p;
  }
  /// Smallest support point strictly above x, or +inf if none.
  double next_above(double x) const {
    auto it = std::upper_bound(support.begin(), support.end(), x);
    return it == support.end() ? kInf : *it;
  }
  double expectation() const {
    double e = 0.0;
    for (int i = 0; i < size(); ++i) e += support[i] * pmf[i];
    return e;
  }
  /// True unless all mass sits on 0.
  bool is_active() const { return !(size() == 1 && support[0] == 0.0); }
};

/// Downward-closed set system over the items. Explicit families are given by
/// their maximal sets and interpreted as the downward closure (so membership
/// is "contained in some maximal set"); the empty set is always feasible.
struct FeasibilityFamily {
  enum class Kind { All, Cardinality, Explicit };

  Kind kind = Kind::All;
  int k = 0;                            // Cardinality only
  std::vector<Hyperedge> maximal_sets;  // Explicit only

  static FeasibilityFamily all() { return {}; }
  static FeasibilityFamily cardinality(int k) {
    if (k < 0) throw std::invalid_argument("cardinality bound must be >= 0");
    FeasibilityFamily f;
    f.kind = Kind::Cardinality;
    f.k = k;
    return f;
  }
  static FeasibilityFamily explicit_maximal(std::vector<Hyperedge> sets) {
    FeasibilityFamily f;
    f.kind = Kind::Explicit;
    std::sort(sets.begin(), sets.end());
    sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
    f.maximal_sets = std::move(sets);
    return f;
  }

  bool contains(ItemMask s) const {
    switch (kind) {
      case Kind::All:
        return true;
      case Kind::Cardinality:
        return popcount(s) <= k;
      case Kind::Explicit:
        if (s == 0) return true;
        for (const auto& mx : maximal_sets)
          if ((s & ~mx.mask()) == 0) return true;
        return false;
    }
    return false;
  }
};

}  // namespace callab
