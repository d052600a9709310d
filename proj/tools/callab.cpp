// Command-line harness: instance generation, inequality-chain checks, and
// seeded batch sweeps with CSV reports.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "callab/io.hpp"
#include "callab/random_instances.hpp"

namespace {

using namespace callab;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitParseError = 2;
constexpr int kExitCapacity = 3;
constexpr int kExitUsage = 4;

struct RunConfig {
  std::uint64_t seed = 1;
  double q = 1.0;
  double k = 1.66;
  int grid_density = 12;
  std::string mode = "exact";  // exact | mc:N
  long long cap_profiles = 1'000'000;
  long long cap_lp_vars = 5'000;

  bool is_mc() const { return mode.rfind("mc:", 0) == 0; }
  long long mc_samples() const { return std::atoll(mode.c_str() + 3); }
  Caps caps() const {
    Caps c;
    c.max_profiles = cap_profiles;
    c.max_lp_vars = cap_lp_vars;
    return c;
  }
  ChainConfig chain() const {
    ChainConfig cfg;
    cfg.k = k;
    cfg.q = q;
    cfg.grid.max_candidates_per_item = grid_density;
    cfg.caps = caps();
    return cfg;
  }
  std::string hash() const {
    std::string s = "q=" + fmt_double(q) + ";k=" + fmt_double(k) +
                    ";grid=" + std::to_string(grid_density) + ";mode=" + mode +
                    ";cap_profiles=" + std::to_string(cap_profiles) +
                    ";cap_lp_vars=" + std::to_string(cap_lp_vars);
    return hex64(fnv1a64(s));
  }
};

void add_config_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--seed", cfg.seed, "rng seed recorded in every output record");
  cmd->add_option("--q", cfg.q, "copies-pricing parameter for the injected representative-item prices");
  cmd->add_option("--k", cfg.k, "target tail count for the CORE/TAIL cutoff");
  cmd->add_option("--grid-density", cfg.grid_density,
                  "price candidates per item in the SREV* search");
  cmd->add_option("--mode", cfg.mode, "exact or mc:N (Monte Carlo with N samples)");
  cmd->add_option("--cap-profiles", cfg.cap_profiles, "profile enumeration cap");
  cmd->add_option("--cap-lp-vars", cfg.cap_lp_vars, "LP variable cap");
}

std::string out_dir() {
  const char* env = std::getenv("CAL_LAB_OUT_DIR");
  return env != nullptr && *env != '\0' ? env : ".";
}

std::string resolve_out(const std::string& flag, const std::string& fallback) {
  if (!flag.empty()) return flag;
  return (std::filesystem::path(out_dir()) / fallback).string();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

std::vector<Hyperedge> parse_edge_list(const std::string& text) {
  std::vector<Hyperedge> edges;
  std::string cur;
  auto flush = [&]() {
    std::vector<int> items;
    std::string num;
    for (char c : cur + ",") {
      if (std::isdigit(static_cast<unsigned char>(c))) {
        num += c;
      } else if (!num.empty()) {
        items.push_back(std::atoi(num.c_str()));
        num.clear();
      }
    }
    if (!items.empty()) edges.push_back(Hyperedge(items));
    cur.clear();
  };
  for (char c : text) {
    if (c == ';')
      flush();
    else
      cur += c;
  }
  flush();
  return edges;
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

struct GenArgs {
  std::string kind;
  std::string edges_spec;
  int a = 10;
  int m = 3;
  int d = 2;
  int k = 2;
  int edges_max = 3;
  int supports_max = 3;
  std::uint64_t seed = 1;
  std::string out;
};

int run_gen(const GenArgs& args) {
  HypergraphPrior prior;
  if (args.kind == "lb") {
    prior = gen_lb_instance(parse_edge_list(args.edges_spec), args.a).prior;
  } else if (args.kind == "regular") {
    prior = gen_lb_instance(gen_regular_graph(args.m, args.d), args.a).prior;
  } else if (args.kind == "ph") {
    prior = gen_lb_instance(gen_ph_k(args.m, args.k), args.a).prior;
  } else if (args.kind == "ps") {
    prior = gen_lb_instance(gen_ps_k(args.m, args.k), args.a).prior;
  } else if (args.kind == "random") {
    RandomPriorParams params;
    params.m_max = args.m;
    params.edges_max = args.edges_max;
    params.support_max = args.supports_max;
    std::mt19937_64 rng(args.seed);
    prior = random_prior(rng, params);
  } else {
    std::cerr << "unknown --kind '" << args.kind << "'\n";
    return kExitUsage;
  }
  std::string path = resolve_out(args.out, "instance_" + args.kind + ".json");
  write_file(path, serialize_instance(prior));
  std::cout << path << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

ReportRecord check_instance(const HypergraphPrior& prior, std::string id,
                            const RunConfig& cfg) {
  ReportRecord rec;
  rec.instance_id = std::move(id);
  rec.instance_hash = instance_hash(prior);
  rec.seed = cfg.seed;
  rec.config_hash = cfg.hash();
  rec.m = prior.m;
  try {
    rec.report = check_chain(prior, cfg.chain());
    rec.has_report = true;
    rec.status = rec.report.all_pass() ? "ok" : "check_failed";
  } catch (const capacity_error& e) {
    rec.status = "capacity_error";
    rec.error = e.what();
  } catch (const std::exception& e) {
    rec.status = "error";
    rec.error = e.what();
  }
  return rec;
}

json mc_report(const HypergraphPrior& prior, const RunConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  long long n = std::max<long long>(cfg.mc_samples(), 100);
  auto copies = opt_copies_mc(prior, n, rng);
  auto b = brev_mc(prior, n, rng, cfg.caps());
  json j;
  j["mode"] = "mc";
  j["samples"] = n;
  j["opt_copies"] = {{"mean", copies.mean}, {"std_error", copies.std_error}};
  j["brev"] = {{"mean", b.mean}, {"std_error", b.std_error}};
  j["chain_checks"] = "skipped (exact mode required)";
  return j;
}

int run_check(const std::string& instance_path, const RunConfig& cfg,
              const std::string& out_flag, const std::string& csv_flag) {
  HypergraphPrior prior;
  try {
    prior = load_instance(instance_path);
  } catch (const parse_error& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParseError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParseError;
  }
  std::string stem = std::filesystem::path(instance_path).stem().string();
  if (cfg.is_mc()) {
    json j = mc_report(prior, cfg);
    j["instance_id"] = stem;
    j["instance_hash"] = instance_hash(prior);
    j["seed"] = cfg.seed;
    std::string path = resolve_out(out_flag, stem + "_report.json");
    write_file(path, j.dump(2) + "\n");
    std::cout << "wrote " << path << " (Monte Carlo mode, chain checks skipped)\n";
    return kExitOk;
  }
  auto started = std::chrono::steady_clock::now();
  ReportRecord rec = check_instance(prior, stem, cfg);
  auto elapsed = std::chrono::duration<double, std::milli>(
                     std::chrono::steady_clock::now() - started)
                     .count();
  std::cerr << "check " << stem << ": " << fmt_double(elapsed) << " ms\n";
  if (rec.status == "capacity_error") {
    std::cerr << "capacity error: " << rec.error
              << " (rerun with --mode mc:N or raise the caps)\n";
    return kExitCapacity;
  }
  if (rec.status == "error") {
    std::cerr << "error: " << rec.error << "\n";
    return kExitUsage;
  }
  std::string path = resolve_out(out_flag, stem + "_report.json");
  write_file(path, report_to_json(rec).dump(2) + "\n");
  if (!csv_flag.empty())
    write_file(csv_flag, report_csv_header() + "\n" + report_csv_row(rec) + "\n");
  for (const auto& c : rec.report.checks)
    std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name
              << " slack=" << fmt_double(c.slack()) << "\n";
  std::cout << (rec.status == "ok" ? "all checks passed" : "CHECKS FAILED")
            << "; report: " << path << "\n";
  return rec.status == "ok" ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct SweepArgs {
  long long count = 10;
  int m_max = 3;
  int edges_max = 3;
  int supports_max = 3;
  std::string out;
  std::string instances_out;
};

int run_sweep(const SweepArgs& args, const RunConfig& cfg) {
  RandomPriorParams params;
  params.m_max = args.m_max;
  params.edges_max = args.edges_max;
  params.support_max = args.supports_max;
  std::vector<ReportRecord> records;
  for (long long i = 0; i < args.count; ++i) {
    std::mt19937_64 rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(i)));
    HypergraphPrior prior = random_prior(rng, params);
    char id[64];
    std::snprintf(id, sizeof(id), "random-%llu-%06lld",
                  static_cast<unsigned long long>(cfg.seed), i);
    records.push_back(check_instance(prior, id, cfg));
  }
  std::sort(records.begin(), records.end(),
            [](const ReportRecord& a, const ReportRecord& b) {
              return a.instance_id < b.instance_id;
            });
  std::string path = resolve_out(args.out, "sweep_aggregate.csv");
  write_file(path, aggregate_csv(records));
  if (!args.instances_out.empty()) {
    std::string csv = report_csv_header() + "\n";
    for (const auto& rec : records) csv += report_csv_row(rec) + "\n";
    write_file(args.instances_out, csv);
  }
  long long failed = 0, capacity = 0;
  for (const auto& rec : records) {
    if (rec.status == "check_failed") ++failed;
    if (rec.status == "capacity_error") ++capacity;
  }
  std::cout << "sweep: " << records.size() << " instances, " << failed
            << " check failures, " << capacity << " skipped (capacity); aggregate: "
            << path << "\n";
  return failed == 0 ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact desk-scale laboratory for revenue maximization with "
               "complements and substitutes"};
  app.require_subcommand(1);

  GenArgs gen_args;
  CLI::App* gen = app.add_subcommand("gen", "generate an instance file");
  gen->add_option("--kind", gen_args.kind, "lb | regular | ph | ps | random")
      ->required();
  gen->add_option("--edges", gen_args.edges_spec, "lb edge list, e.g. \"{0};{1,2}\"");
  gen->add_option("--a", gen_args.a, "index offset for the lower-bound family");
  gen->add_option("--m", gen_args.m, "item count (max for random)");
  gen->add_option("--d", gen_args.d, "regular-graph degree");
  gen->add_option("--k", gen_args.k, "PH/PS parameter");
  gen->add_option("--edges-max", gen_args.edges_max, "random: max active edges");
  gen->add_option("--supports-max", gen_args.supports_max,
                  "random: max support size per edge");
  gen->add_option("--seed", gen_args.seed, "random: rng seed");
  gen->add_option("--out", gen_args.out, "output path");

  RunConfig check_cfg;
  std::string instance_path, check_out, check_csv;
  CLI::App* check = app.add_subcommand("check", "run the inequality chain on one instance");
  check->add_option("--instance", instance_path, "instance file")->required();
  check->add_option("--out", check_out, "report JSON path");
  check->add_option("--csv", check_csv, "also write a one-row CSV here");
  add_config_flags(check, check_cfg);

  SweepArgs sweep_args;
  RunConfig sweep_cfg;
  CLI::App* sweep = app.add_subcommand("sweep", "check a batch of seeded random instances");
  sweep->add_option("--count", sweep_args.count, "number of instances");
  sweep->add_option("--m-max", sweep_args.m_max, "max item count");
  sweep->add_option("--edges-max", sweep_args.edges_max, "max active edges");
  sweep->add_option("--supports-max", sweep_args.supports_max, "max support size");
  sweep->add_option("--out", sweep_args.out, "aggregate CSV path");
  sweep->add_option("--instances-out", sweep_args.instances_out,
                    "optional per-instance CSV path");
  add_config_flags(sweep, sweep_cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) return run_gen(gen_args);
    if (check->parsed()) return run_check(instance_path, check_cfg, check_out, check_csv);
    if (sweep->parsed()) return run_sweep(sweep_args, sweep_cfg);
  } catch (const capacity_error& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return kExitCapacity;
  } catch (const parse_error& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParseError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
