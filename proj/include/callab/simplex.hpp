#pragma once

#include "callab/core.hpp"

namespace callab {

/// A general small LP: maximize c'x subject to sparse rows a'x {<=,>=,==} b,
/// with per-variable sign (x >= 0 by default, or free).
struct LinearProgram {
  struct Row {
    std::vector<std::pair<int, double>> coeffs;
    char rel = '<';  // '<', '>', '='
    double rhs = 0.0;
  };
  int n = 0;
  std::vector<double> objective;
  std::vector<Row> rows;
  std::vector<bool> free_var;  // empty means all non-negative

  void check() const {
    if (static_cast<int>(objective.size()) != n)
      throw std::invalid_argument("LinearProgram: objective size mismatch");
    if (!free_var.empty() && static_cast<int>(free_var.size()) != n)
      throw std::invalid_argument("LinearProgram: free_var size mismatch");
  }
};

struct LpSolution {
  std::vector<double> x;
  double objective = 0.0;
  long long iterations = 0;
  bool optimal = false;
};

/// Dense two-phase tableau simplex. Pricing is Dantzig's rule (most negative
/// reduced cost, smallest index on ties); after a stall the solver switches
/// to Bland's smallest-index rule until the objective strictly improves,
/// which prevents cycling while keeping the pivot sequence deterministic.
struct SimplexOptions {
  double eps = 1e-9;
  long long max_iterations = 200'000;
  int stall_limit = 64;
  // Deterministic anti-degeneracy: inequality rows with rhs 0 are relaxed by
  // perturb * u_r (u_r in [1,2) from a fixed per-row mix), which makes the
  // vertices generically nondegenerate so pivots make strict progress. The
  // induced constraint violations are two orders below the 1e-6 feasibility
  // tolerance.
  double perturb = 1e-9;
};

class SimplexSolver {
 public:
  explicit SimplexSolver(SimplexOptions opt = {}) : opt_(opt) {}

  LpSolution solve(const LinearProgram& lp) {
    lp.check();
    build(lp);
    LpSolution sol;
    // Phase 1: minimize the artificial sum.
    if (n_art_ > 0) {
      set_phase1_objective();
      run(sol);
      if (obj_value() > 1e-7)
        throw solver_error("simplex: phase 1 failed, infeasible within tolerance (" +
                           std::to_string(obj_value()) + ")");
      pivot_out_artificials();
    }
    set_phase2_objective();
    phase1_ = false;
    run(sol);
    extract(lp, sol);
    return sol;
  }

 private:
  SimplexOptions opt_;
  int rows_ = 0, cols_ = 0;           // constraint rows, total columns (incl rhs)
  int n_struct_ = 0;                  // structural columns after free splits
  int n_art_ = 0;
  int art_begin_ = 0;
  bool phase1_ = true;
  std::vector<std::vector<double>> tab_;  // rows_ + 1 (objective last)
  std::vector<int> basis_;
  std::vector<double> cost_;              // phase-2 cost per column (min form)
  std::vector<std::pair<int, double>> split_;  // structural col -> (lp var, sign)
  std::vector<int> lex_cols_;  // initial identity column of each row

  double& a(int r, int c) { return tab_[r][c]; }
  int rhs_col() const { return cols_ - 1; }
  double obj_value() const { return -tab_[rows_][rhs_col()]; }

  void build(const LinearProgram& lp) {
    // Map structural variables, splitting free ones.
    split_.clear();
    std::vector<int> pos_col(lp.n), neg_col(lp.n, -1);
    for (int j = 0; j < lp.n; ++j) {
      pos_col[j] = static_cast<int>(split_.size());
      split_.push_back({j, 1.0});
      if (!lp.free_var.empty() && lp.free_var[j]) {
        neg_col[j] = static_cast<int>(split_.size());
        split_.push_back({j, -1.0});
      }
    }
    n_struct_ = static_cast<int>(split_.size());

    // Normalize rows: rhs >= 0; '<' gets a slack (basic), '>' gets a surplus
    // plus artificial, '=' gets an artificial. Rows with rhs 0 and '>' are
    // negated into '<' so they need no artificial.
    struct NRow {
      std::vector<std::pair<int, double>> coeffs;  // structural columns
      char rel;
      double rhs;
    };
    std::vector<NRow> nrows;
    for (const auto& row : lp.rows) {
      NRow nr;
      nr.rel = row.rel;
      nr.rhs = row.rhs;
      for (auto [j, v] : row.coeffs) {
        if (v == 0.0) continue;
        nr.coeffs.push_back({pos_col[j], v});
        if (neg_col[j] >= 0) nr.coeffs.push_back({neg_col[j], -v});
      }
      if (nr.rhs < 0.0) {
        for (auto& [_, v] : nr.coeffs) v = -v;
        nr.rhs = -nr.rhs;
        nr.rel = nr.rel == '<' ? '>' : (nr.rel == '>' ? '<' : '=');
      }
      if (nr.rel == '>' && nr.rhs == 0.0) {
        for (auto& [_, v] : nr.coeffs) v = -v;
        nr.rel = '<';
      }
      nrows.push_back(std::move(nr));
    }

    rows_ = static_cast<int>(nrows.size());
    lex_cols_.assign(rows_, -1);
    int n_slack = 0, n_art = 0;
    for (const auto& r : nrows) {
      if (r.rel == '<' || r.rel == '>') ++n_slack;
      if (r.rel == '>' || r.rel == '=') ++n_art;
    }
    n_art_ = n_art;
    int slack_begin = n_struct_;
    art_begin_ = n_struct_ + n_slack;
    cols_ = n_struct_ + n_slack + n_art + 1;
    if (static_cast<long long>(rows_ + 1) * cols_ > 30'000'000)
      throw capacity_error("simplex: tableau of " +
                           std::to_string(static_cast<long long>(rows_ + 1) * cols_) +
                           " cells exceeds the in-memory cap");
    tab_.assign(rows_ + 1, std::vector<double>(cols_, 0.0));
    basis_.assign(rows_, -1);

    int si = 0, ai = 0;
    for (int r = 0; r < rows_; ++r) {
      const auto& nr = nrows[r];
      for (auto [c, v] : nr.coeffs) a(r, c) += v;
      a(r, rhs_col()) = nr.rhs;
      if (nr.rel == '<' && nr.rhs == 0.0 && opt_.perturb > 0.0) {
        std::uint64_t z = (static_cast<std::uint64_t>(r) + 1) * 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        double u = 1.0 + static_cast<double>(z >> 11) * 0x1.0p-53;
        a(r, rhs_col()) = opt_.perturb * u;
      }
      if (nr.rel == '<') {
        a(r, slack_begin + si) = 1.0;
        basis_[r] = slack_begin + si;
        lex_cols_[r] = slack_begin + si;
        ++si;
      } else if (nr.rel == '>') {
        a(r, slack_begin + si) = -1.0;
        ++si;
        a(r, art_begin_ + ai) = 1.0;
        basis_[r] = art_begin_ + ai;
        lex_cols_[r] = art_begin_ + ai;
        ++ai;
      } else {
        a(r, art_begin_ + ai) = 1.0;
        basis_[r] = art_begin_ + ai;
        lex_cols_[r] = art_begin_ + ai;
        ++ai;
      }
    }

    // Phase-2 costs in min form along the split columns.
    cost_.assign(cols_ - 1, 0.0);
    for (int c = 0; c < n_struct_; ++c)
      cost_[c] = -split_[c].second * lp.objective[split_[c].first];
  }

  void set_phase1_objective() {
    auto& z = tab_[rows_];
    std::fill(z.begin(), z.end(), 0.0);
    for (int c = art_begin_; c < art_begin_ + n_art_; ++c) z[c] = 1.0;
    // Price out basic artificials.
    for (int r = 0; r < rows_; ++r)
      if (basis_[r] >= art_begin_)
        for (int c = 0; c < cols_; ++c) z[c] -= a(r, c);
    phase1_ = true;
  }

  void set_phase2_objective() {
    auto& z = tab_[rows_];
    std::fill(z.begin(), z.end(), 0.0);
    for (int c = 0; c < cols_ - 1; ++c) z[c] = cost_[c];
    for (int r = 0; r < rows_; ++r) {
      int b = basis_[r];
      double cb = cost_[b];
      if (cb != 0.0)
        for (int c = 0; c < cols_; ++c) z[c] -= cb * a(r, c);
    }
  }

  bool column_allowed(int c) const {
    // Artificial columns may never re-enter once phase 1 is done.
    return phase1_ || c < art_begin_;
  }

  /// Entering candidates with meaningfully negative reduced cost, most
  /// negative first (ties by index). Bland mode returns plain index order.
  std::vector<int> entering_candidates(bool bland) const {
    const auto& z = tab_[rows_];
    double thresh = -opt_.eps;
    std::vector<std::pair<double, int>> neg;
    for (int c = 0; c < cols_ - 1; ++c) {
      if (!column_allowed(c)) continue;
      if (z[c] < thresh) neg.push_back({z[c], c});
    }
    if (bland) {
      std::sort(neg.begin(), neg.end(),
                [](const auto& a, const auto& b) { return a.second < b.second; });
    } else {
      std::sort(neg.begin(), neg.end());
    }
    std::vector<int> out;
    out.reserve(neg.size());
    for (auto& [_, c] : neg) out.push_back(c);
    return out;
  }

  int choose_leaving(int enter) const {
    // Min-ratio test with lexicographic refinement: among the rows attaining
    // the minimum ratio, compare the rows of the (implicit) basis inverse,
    // scaled by the pivot entry, in the fixed initial-identity column order.
    // This is the textbook lexicographic rule, which rules out cycling under
    // any entering rule; the rhs snap-to-zero keeps degenerate ties exact.
    std::vector<int> cand;
    double best_ratio = kInf;
    for (int r = 0; r < rows_; ++r) {
      double arc = tab_[r][enter];
      if (arc <= opt_.eps) continue;
      double ratio = tab_[r][cols_ - 1] / arc;
      if (ratio < best_ratio - 1e-12 * (1.0 + std::abs(best_ratio))) {
        best_ratio = ratio;
        cand.clear();
        cand.push_back(r);
      } else if (ratio <= best_ratio + 1e-12 * (1.0 + std::abs(best_ratio))) {
        best_ratio = std::min(best_ratio, ratio);
        cand.push_back(r);
      }
    }
    if (cand.empty()) return -1;
    for (int c : lex_cols_) {
      if (cand.size() == 1) break;
      double best = kInf;
      std::vector<int> keep;
      for (int r : cand) {
        double v = tab_[r][c] / tab_[r][enter];
        if (v < best) {
          best = v;
          keep.clear();
          keep.push_back(r);
        } else if (v == best) {
          keep.push_back(r);
        }
      }
      cand = std::move(keep);
    }
    return cand.front();
  }

  void pivot(int r, int c) {
    double piv = a(r, c);
    auto& row = tab_[r];
    for (double& v : row) v /= piv;
    for (int i = 0; i <= rows_; ++i) {
      if (i == r) continue;
      double f = a(i, c);
      if (f == 0.0) continue;
      auto& ri = tab_[i];
      for (int j = 0; j < cols_; ++j) ri[j] -= f * row[j];
    }
    basis_[r] = c;
    // Snap tiny negative basic values (pivot noise) back to feasibility.
    for (int i = 0; i < rows_; ++i)
      if (tab_[i][cols_ - 1] < 0.0 && tab_[i][cols_ - 1] > -1e-11)
        tab_[i][cols_ - 1] = 0.0;
  }

  void run(LpSolution& sol) {
    bool bland = false;
    int stall = 0;
    double last_obj = obj_value();
    while (true) {
      auto candidates = entering_candidates(bland);
      if (candidates.empty()) return;  // optimal for this phase
      int enter = -1, leave = -1;
      // Prefer the first candidate with a numerically solid pivot; fall back
      // to the best pivot magnitude seen if all are tiny.
      double best_piv = 0.0;
      int best_enter = -1, best_leave = -1;
      for (int c : candidates) {
        int r = choose_leaving(c);
        if (r < 0) continue;  // column unbounded below? try others
        double piv = tab_[r][c];
        if (piv > 1e-7) {
          enter = c;
          leave = r;
          break;
        }
        if (piv > best_piv) {
          best_piv = piv;
          best_enter = c;
          best_leave = r;
        }
      }
      if (enter < 0) {
        if (best_enter < 0) {
          // Every improving column is unbounded: genuine unboundedness.
          throw solver_error("simplex: unbounded objective");
        }
        enter = best_enter;
        leave = best_leave;
      }
      pivot(leave, enter);
      ++sol.iterations;
      if (sol.iterations % 256 == 0) {
        // Rebuild the reduced-cost row from scratch to purge drift.
        if (phase1_)
          set_phase1_objective();
        else
          set_phase2_objective();
      }
      if (sol.iterations > opt_.max_iterations)
        throw solver_error("simplex: iteration limit exceeded");
      double obj = obj_value();
      if (obj < last_obj - 1e-12) {
        last_obj = obj;
        stall = 0;
        bland = false;
      } else if (++stall > opt_.stall_limit) {
        bland = true;
      }
    }
  }

  void pivot_out_artificials() {
    for (int r = 0; r < rows_; ++r) {
      if (basis_[r] < art_begin_) continue;
      int c = 0;
      for (; c < art_begin_; ++c)
        if (std::abs(a(r, c)) > opt_.eps) break;
      if (c < art_begin_) pivot(r, c);
      // else: redundant row; the artificial stays basic at value 0 and its
      // column is barred from entering in phase 2.
    }
  }

  void extract(const LinearProgram& lp, LpSolution& sol) {
    sol.x.assign(lp.n, 0.0);
    for (int r = 0; r < rows_; ++r) {
      int b = basis_[r];
      if (b < n_struct_) {
        auto [j, sign] = split_[b];
        sol.x[j] += sign * tab_[r][rhs_col()];
      }
    }
    double obj = 0.0;
    for (int j = 0; j < lp.n; ++j) obj += lp.objective[j] * sol.x[j];
    sol.objective = obj;
    sol.optimal = true;
  }
};

inline LpSolution solve_lp(const LinearProgram& lp,
                           SimplexOptions opt = {}) {
  SimplexSolver s(opt);
  return s.solve(lp);
}

}  // namespace callab
