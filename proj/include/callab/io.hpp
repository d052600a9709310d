#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "callab/duality.hpp"
#include "callab/lowerbounds.hpp"

namespace callab {

using json = nlohmann::ordered_json;

/// Shortest-stable formatting for CSV cells: %.12g round-trips every value we
/// emit and keeps report bytes reproducible.
inline std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// ---------------------------------------------------------------------------
// Instance files
// ---------------------------------------------------------------------------

inline json instance_to_json(const HypergraphPrior& prior) {
  json j;
  j["m"] = prior.m;
  j["edges"] = json::array();
  for (const auto& [e, d] : prior.edges) {
    json je;
    je["items"] = e.items;
    je["support"] = json::array();
    for (int i = 0; i < d.size(); ++i)
      je["support"].push_back({{"value", d.support[i]}, {"prob", d.pmf[i]}});
    j["edges"].push_back(std::move(je));
  }
  json jf;
  switch (prior.feasibility.kind) {
    case FeasibilityFamily::Kind::All:
      jf["kind"] = "all";
      break;
    case FeasibilityFamily::Kind::Cardinality:
      jf["kind"] = "cardinality";
      jf["k"] = prior.feasibility.k;
      break;
    case FeasibilityFamily::Kind::Explicit: {
      jf["kind"] = "explicit";
      jf["maximal_sets"] = json::array();
      for (const auto& s : prior.feasibility.maximal_sets)
        jf["maximal_sets"].push_back(s.items);
      break;
    }
  }
  j["feasibility"] = std::move(jf);
  return j;
}

inline std::string serialize_instance(const HypergraphPrior& prior) {
  return instance_to_json(prior).dump(2) + "\n";
}

inline std::string instance_hash(const HypergraphPrior& prior) {
  return hex64(fnv1a64(instance_to_json(prior).dump()));
}

inline HypergraphPrior instance_from_json(const json& j) {
  try {
    int m = j.at("m").get<int>();
    std::vector<std::pair<Hyperedge, DiscreteDist>> edges;
    for (const auto& je : j.at("edges")) {
      Hyperedge e(je.at("items").get<std::vector<int>>());
      std::vector<double> xs, ps;
      for (const auto& pt : je.at("support")) {
        xs.push_back(pt.at("value").get<double>());
        ps.push_back(pt.at("prob").get<double>());
      }
      edges.push_back({std::move(e), DiscreteDist(std::move(xs), std::move(ps))});
    }
    FeasibilityFamily feas;
    const auto& jf = j.at("feasibility");
    std::string kind = jf.at("kind").get<std::string>();
    if (kind == "all") {
      feas = FeasibilityFamily::all();
    } else if (kind == "cardinality") {
      feas = FeasibilityFamily::cardinality(jf.at("k").get<int>());
    } else if (kind == "explicit") {
      std::vector<Hyperedge> sets;
      for (const auto& js : jf.at("maximal_sets"))
        sets.push_back(Hyperedge(js.get<std::vector<int>>()));
      feas = FeasibilityFamily::explicit_maximal(std::move(sets));
    } else {
      throw parse_error("unknown feasibility kind '" + kind + "'");
    }
    return HypergraphPrior(m, std::move(edges), std::move(feas));
  } catch (const parse_error&) {
    throw;
  } catch (const std::exception& e) {
    throw parse_error(std::string("bad instance: ") + e.what());
  }
}

inline HypergraphPrior parse_instance(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw parse_error("instance is not valid JSON");
  return instance_from_json(j);
}

inline HypergraphPrior load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open instance file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str());
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/// Canonical chain-check order; the CSV layout is frozen on this list.
inline const std::vector<std::string>& chain_check_names() {
  static const std::vector<std::string> names = {
      "rev_le_single_plus_nonfav",
      "rev_le_4d16_simple",
      "single_le_optcopies",
      "single_le_4d_srev_4brev",
      "nonfav_le_core_tail",
      "core_le_6brev_lipschitz",
      "tail_le_count_brev",
      "brev_ge_cutoff_mass",
      "nonfav_le_12brev",
      "rev_le_exp_max_virtual",
      "virtual_pointwise_bound",
      "exceedance_le_brev",
      "core_median_concentration",
      "vcore_dominated",
      "union_bound_exact",
      "rev_ge_brev",
      "rev_ge_srev_lb",
  };
  return names;
}

struct ReportRecord {
  std::string instance_id;
  std::string instance_hash;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string status;  // ok | check_failed | capacity_error | parse_error | error
  std::string error;
  int m = 0;
  bool has_report = false;
  BenchmarkReport report;
};

inline json report_to_json(const ReportRecord& rec) {
  json j;
  j["instance_id"] = rec.instance_id;
  j["instance_hash"] = rec.instance_hash;
  j["seed"] = rec.seed;
  j["config_hash"] = rec.config_hash;
  j["status"] = rec.status;
  if (!rec.error.empty()) j["error"] = rec.error;
  j["m"] = rec.m;
  if (rec.has_report) {
    const BenchmarkReport& r = rec.report;
    j["d"] = r.d;
    j["n_profiles"] = r.n_profiles;
    j["opt_copies"] = r.opt_copies;
    j["single"] = r.single;
    j["nonfav"] = r.nonfav;
    j["core"] = r.core;
    j["tail"] = r.tail;
    j["brev_price"] = r.brev_price;
    j["brev"] = r.brev;
    j["srev_star_lb"] = r.srev_star_lb;
    j["rev_lp"] = r.rev_lp;
    j["phi_max_exp"] = r.phi_max_exp;
    j["target_k"] = r.target_k;
    j["cutoff"] = {{"t_lo", r.cutoff.t_lo},
                   {"t_hi", r.cutoff.t_hi},
                   {"theta", r.cutoff.theta},
                   {"degenerate", r.cutoff.degenerate}};
    j["lp_residual"] = r.lp_residual;
    j["lp_iterations"] = r.lp_iterations;
    j["rep_prices_injected"] = r.rep_prices_injected;
    j["checks"] = json::array();
    for (const auto& c : r.checks) {
      json jc;
      jc["name"] = c.name;
      jc["lhs"] = c.lhs;
      jc["rhs"] = c.rhs;
      jc["slack"] = c.slack();
      jc["tolerance"] = c.tolerance;
      jc["pass"] = c.pass;
      jc["skipped"] = c.skipped;
      if (!c.note.empty()) jc["note"] = c.note;
      j["checks"].push_back(std::move(jc));
    }
  }
  return j;
}

/// Flat per-instance CSV. Column order is frozen; see README.
inline std::string report_csv_header() {
  std::string h =
      "instance_id,instance_hash,seed,config_hash,status,m,d,n_profiles,"
      "opt_copies,single,nonfav,core,tail,brev_price,brev,srev_star_lb,rev_lp,"
      "phi_max_exp,target_k,cutoff_t_lo,cutoff_t_hi,cutoff_theta,"
      "cutoff_degenerate,lp_residual";
  for (const auto& n : chain_check_names()) h += "," + n + "_slack," + n + "_pass";
  return h;
}

inline std::string report_csv_row(const ReportRecord& rec) {
  std::string row = rec.instance_id + "," + rec.instance_hash + "," +
                    std::to_string(rec.seed) + "," + rec.config_hash + "," +
                    rec.status + "," + std::to_string(rec.m);
  if (!rec.has_report) {
    for (size_t i = 0; i < 18 + 2 * chain_check_names().size(); ++i) row += ",";
    return row;
  }
  const BenchmarkReport& r = rec.report;
  row += "," + std::to_string(r.d) + "," + std::to_string(r.n_profiles);
  for (double v : {r.opt_copies, r.single, r.nonfav, r.core, r.tail, r.brev_price,
                   r.brev, r.srev_star_lb, r.rev_lp, r.phi_max_exp, r.target_k,
                   r.cutoff.t_lo, r.cutoff.t_hi, r.cutoff.theta})
    row += "," + fmt_double(v);
  row += std::string(",") + (r.cutoff.degenerate ? "1" : "0");
  row += "," + fmt_double(r.lp_residual);
  for (const auto& name : chain_check_names()) {
    const InequalityCheck* c = r.find(name);
    if (c == nullptr || c->skipped) {
      row += ",,skipped";
    } else {
      row += "," + fmt_double(c->slack()) + "," + (c->pass ? "1" : "0");
    }
  }
  return row;
}

/// Aggregate CSV over a sweep: one row per inequality plus _instances rows.
inline std::string aggregate_csv(const std::vector<ReportRecord>& records) {
  std::string out = "name,checked,failed,skipped,min_slack,median_slack,max_slack\n";
  for (const auto& name : chain_check_names()) {
    std::vector<double> slacks;
    long long failed = 0, skipped = 0;
    for (const auto& rec : records) {
      if (!rec.has_report) {
        ++skipped;
        continue;
      }
      const InequalityCheck* c = rec.report.find(name);
      if (c == nullptr || c->skipped) {
        ++skipped;
        continue;
      }
      slacks.push_back(c->slack());
      if (!c->pass) ++failed;
    }
    std::sort(slacks.begin(), slacks.end());
    out += name + "," + std::to_string(slacks.size()) + "," +
           std::to_string(failed) + "," + std::to_string(skipped);
    if (slacks.empty()) {
      out += ",,,\n";
    } else {
      double median = slacks.size() % 2 == 1
                          ? slacks[slacks.size() / 2]
                          : 0.5 * (slacks[slacks.size() / 2 - 1] +
                                   slacks[slacks.size() / 2]);
      out += "," + fmt_double(slacks.front()) + "," + fmt_double(median) + "," +
             fmt_double(slacks.back()) + "\n";
    }
  }
  long long ok = 0, failed = 0, capacity = 0, errors = 0;
  for (const auto& rec : records) {
    if (rec.status == "ok") ++ok;
    else if (rec.status == "check_failed") ++failed;
    else if (rec.status == "capacity_error") ++capacity;
    else ++errors;
  }
  out += "_instances_ok," + std::to_string(ok) + ",,,,,\n";
  out += "_instances_check_failed," + std::to_string(failed) + ",,,,,\n";
  out += "_instances_skipped_capacity," + std::to_string(capacity) + ",,,,,\n";
  out += "_instances_error," + std::to_string(errors) + ",,,,,\n";
  return out;
}

/// Per-type lottery/payment dump for regression snapshots.
inline std::string solution_dump(const RevenueLP& lp, const MechanismSolution& sol) {
  std::string out;
  out += "objective " + fmt_double(sol.objective) + "\n";
  for (int t = 0; t < lp.n_types; ++t) {
    out += "type " + std::to_string(t) + " prob " + fmt_double(lp.type_probs[t]) +
           " payment " + fmt_double(sol.payment[t]) + "\n";
    for (int b = 0; b < lp.n_bundles(); ++b)
      if (sol.lottery[t][b] > 1e-12)
        out += "  bundle " + Hyperedge::from_mask(b).str() + " w.p. " +
               fmt_double(sol.lottery[t][b]) + "\n";
  }
  return out;
}

}  // namespace callab
