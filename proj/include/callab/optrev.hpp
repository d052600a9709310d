#pragma once

#include "callab/mechanisms.hpp"
#include "callab/simplex.hpp"

namespace callab {

/// The optimal-revenue LP over explicit lotteries: one allocation variable
/// x_{v,S} per (type, bundle) plus one payment variable per type, IC rows for
/// every ordered type pair, IR and a lottery-simplex row per type.
struct RevenueLP {
  int m = 0;
  int n_types = 0;
  std::vector<double> type_probs;
  std::vector<std::vector<double>> type_values;  // [type][mask]
  LinearProgram lp;

  int n_bundles() const { return 1 << m; }
  int x_var(int type, ItemMask s) const {
    return type * n_bundles() + static_cast<int>(s);
  }
  int p_var(int type) const { return n_types * n_bundles() + type; }
  long long n_vars() const {
    return static_cast<long long>(n_types) * n_bundles() + n_types;
  }
};

inline RevenueLP build_lp(const HypergraphPrior& prior, const Caps& caps = {}) {
  RevenueLP r;
  r.m = prior.m;
  EnumeratedValuations ev = enumerate_valuations(prior, caps);
  r.n_types = static_cast<int>(ev.en.size());
  r.type_probs = ev.en.probs;
  r.type_values = std::move(ev.val);
  if (r.n_vars() > caps.max_lp_vars)
    throw capacity_error("build_lp: " + std::to_string(r.n_vars()) +
                         " variables exceeds cap " + std::to_string(caps.max_lp_vars));

  LinearProgram& lp = r.lp;
  lp.n = static_cast<int>(r.n_vars());
  lp.objective.assign(lp.n, 0.0);
  lp.free_var.assign(lp.n, false);
  for (int t = 0; t < r.n_types; ++t) {
    lp.objective[r.p_var(t)] = r.type_probs[t];
    lp.free_var[r.p_var(t)] = true;
  }
  int nb = r.n_bundles();
  auto surplus = [&](int valued_as, int allocated_to) {
    // coefficients of sum_S v_{valued_as}(S) x_{allocated_to,S}
    std::vector<std::pair<int, double>> c;
    for (int s = 0; s < nb; ++s) {
      double v = r.type_values[valued_as][s];
      if (v != 0.0) c.push_back({r.x_var(allocated_to, s), v});
    }
    return c;
  };
  for (int t = 0; t < r.n_types; ++t) {
    // IR: sum_S v_t(S) x_{t,S} - p_t >= 0
    LinearProgram::Row ir;
    ir.coeffs = surplus(t, t);
    ir.coeffs.push_back({r.p_var(t), -1.0});
    ir.rel = '>';
    ir.rhs = 0.0;
    lp.rows.push_back(std::move(ir));
  }
  for (int t = 0; t < r.n_types; ++t) {
    for (int u = 0; u < r.n_types; ++u) {
      if (u == t) continue;
      // IC: utility of truth >= utility of reporting u
      LinearProgram::Row ic;
      ic.coeffs = surplus(t, t);
      ic.coeffs.push_back({r.p_var(t), -1.0});
      for (auto [var, v] : surplus(t, u)) ic.coeffs.push_back({var, -v});
      ic.coeffs.push_back({r.p_var(u), 1.0});
      ic.rel = '>';
      ic.rhs = 0.0;
      lp.rows.push_back(std::move(ic));
    }
  }
  for (int t = 0; t < r.n_types; ++t) {
    LinearProgram::Row simplex_row;
    for (int s = 0; s < nb; ++s) simplex_row.coeffs.push_back({r.x_var(t, s), 1.0});
    simplex_row.rel = '=';
    simplex_row.rhs = 1.0;
    lp.rows.push_back(std::move(simplex_row));
  }
  return r;
}

/// LP solution: allocation lottery over bundles and payment per type.
struct MechanismSolution {
  std::vector<std::vector<double>> lottery;  // [type][mask]
  std::vector<double> payment;
  double objective = 0.0;
  long long iterations = 0;
};

inline MechanismSolution solve(const RevenueLP& r,
                               SimplexOptions opt = {}) {
  LpSolution s = solve_lp(r.lp, opt);
  MechanismSolution sol;
  sol.objective = s.objective;
  sol.iterations = s.iterations;
  sol.lottery.assign(r.n_types, std::vector<double>(r.n_bundles(), 0.0));
  sol.payment.assign(r.n_types, 0.0);
  for (int t = 0; t < r.n_types; ++t) {
    for (int b = 0; b < r.n_bundles(); ++b) sol.lottery[t][b] = s.x[r.x_var(t, b)];
    sol.payment[t] = s.x[r.p_var(t)];
  }
  return sol;
}

struct VerifyResult {
  bool ok = false;
  double max_residual = 0.0;   // worst IC/IR/simplex violation
  double objective_gap = 0.0;  // |reported - recomputed|
};

/// Recompute every IC/IR residual and the objective from scratch.
inline VerifyResult verify_solution(const RevenueLP& r,
                                    const MechanismSolution& sol,
                                    double feas_tol = 1e-6,
                                    double obj_tol = 1e-7) {
  VerifyResult out;
  int nb = r.n_bundles();
  auto util = [&](int valued_as, int allocated_to) {
    double v = 0.0;
    for (int b = 0; b < nb; ++b)
      v += r.type_values[valued_as][b] * sol.lottery[allocated_to][b];
    return v - sol.payment[allocated_to];
  };
  double res = 0.0;
  for (int t = 0; t < r.n_types; ++t) {
    double sum = 0.0;
    for (int b = 0; b < nb; ++b) {
      sum += sol.lottery[t][b];
      res = std::max(res, -sol.lottery[t][b]);
    }
    res = std::max(res, std::abs(sum - 1.0));
    res = std::max(res, -util(t, t));  // IR
    for (int u = 0; u < r.n_types; ++u)
      if (u != t) res = std::max(res, util(t, u) - util(t, t));  // IC
  }
  double obj = 0.0;
  for (int t = 0; t < r.n_types; ++t) obj += r.type_probs[t] * sol.payment[t];
  out.max_residual = res;
  out.objective_gap = std::abs(obj - sol.objective);
  out.ok = res <= feas_tol && out.objective_gap <= obj_tol;
  return out;
}

/// REV(D): build, solve and verify in one step.
inline MechanismSolution optimal_revenue(const HypergraphPrior& prior,
                                         const Caps& caps = {}) {
  RevenueLP r = build_lp(prior, caps);
  MechanismSolution sol = solve(r);
  VerifyResult v = verify_solution(r, sol);
  if (!v.ok)
    throw solver_error("optimal_revenue: solution failed verification, residual " +
                       std::to_string(v.max_residual));
  return sol;
}

}  // namespace callab
