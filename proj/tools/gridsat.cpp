// gridsat: command-line front end for the compatibility-matrix solver.
//
//   gridsat solve  [file] [--variant V] [--schedule S] [--trace] [--json]
//   gridsat oracle [file]
//   gridsat trace  [file] [--variant V] [--schedule S]
//   gridsat audit  [--count N] [--seed N] [--out DIR] [--json] ...
//
// Verdict and model lines go to stdout; everything else goes to stderr.
// Exit codes: 10 SAT, 20 UNSAT, 0 other success, 1 usage/parse error,
// 2 soundness violation found by an audit.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "gridsat/gridsat.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitSoundness = 2;
constexpr int kExitSat = 10;
constexpr int kExitUnsat = 20;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

gridsat::Var oracle_guard() {
  const char* env = std::getenv("GRIDSAT_ORACLE_MAX_VARS");
  if (!env || !*env) return gridsat::kDefaultOracleMaxVars;
  char* end = nullptr;
  unsigned long v = std::strtoul(env, &end, 10);
  if (*end != '\0' || v > 62) throw UsageError("GRIDSAT_ORACLE_MAX_VARS must be an integer in 0..62");
  return static_cast<gridsat::Var>(v);
}

gridsat::ParsedCnf read_input(const std::string& path) {
  if (path.empty() || path == "-") return gridsat::parse_dimacs(std::cin);
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  return gridsat::parse_dimacs(in);
}

gridsat::EngineOptions engine_options(gridsat::Variant variant, const std::optional<std::string>& schedule) {
  gridsat::EngineOptions opts;
  if (variant == gridsat::Variant::triangular) {
    if (schedule && *schedule == "all") throw UsageError("--schedule all is not admissible for the triangular variant");
    opts.schedule = gridsat::Schedule::upper();
  } else if (schedule && *schedule == "upper") {
    opts.schedule = gridsat::Schedule::upper();
  }
  return opts;
}

void print_sweep(std::ostream& os, std::size_t sweep, const gridsat::CompatMatrix& c) {
  os << "sweep " << sweep << "\n" << gridsat::serialize(c);
}

struct SolveArgs {
  std::string input;
  std::string variant = "basic";
  std::optional<std::string> schedule;
  bool trace = false;
  bool json = false;
};

int cmd_solve(const SolveArgs& args) {
  const auto variant = *gridsat::parse_variant(args.variant);
  gridsat::ParsedCnf parsed;
  try {
    parsed = read_input(args.input);
  } catch (const gridsat::TriviallyUnsatError& e) {
    std::cerr << "c " << e.what() << "\n";
    std::cout << "s UNSATISFIABLE\n";
    return kExitUnsat;
  }
  for (const auto& w : parsed.warnings) std::cerr << "c warning: " << w << "\n";

  auto opts = engine_options(variant, args.schedule);
  if (args.trace) opts.on_sweep = [](std::size_t s, const gridsat::CompatMatrix& c) { print_sweep(std::cerr, s, c); };
  const gridsat::Cnf& f = parsed.cnf;
  gridsat::EngineVerdict ev = gridsat::run_variant(variant, gridsat::build_matrix(f), opts);
  if (args.json) std::cerr << gridsat::stats_json(ev).dump() << "\n";

  if (ev.decision == gridsat::Decision::unsat) {
    std::cout << "s UNSATISFIABLE\n";
    return kExitUnsat;
  }
  opts.on_sweep = nullptr;
  gridsat::ExtractionOutcome ex = gridsat::extract_self_reduce(f, variant, opts);
  if (ex.status == gridsat::ExtractionStatus::model) {
    std::cout << "s SATISFIABLE\n" << gridsat::model_line(*ex.model) << "\n";
    return kExitSat;
  }
  nlohmann::json log = nlohmann::json::array();
  for (const auto& b : ex.branch_log) log.push_back({{"var", b.var}, {"value", b.value}, {"verdict", to_string(b.verdict)}});
  std::cerr << nlohmann::json{{"status", to_string(ex.status)}, {"branch_log", log}}.dump() << "\n";
  std::cout << "s UNKNOWN\n";
  return kExitOk;
}

int cmd_oracle(const std::string& input) {
  gridsat::ParsedCnf parsed;
  try {
    parsed = read_input(input);
  } catch (const gridsat::TriviallyUnsatError& e) {
    std::cerr << "c " << e.what() << "\n";
    std::cout << "s UNSATISFIABLE\n";
    return kExitUnsat;
  }
  for (const auto& w : parsed.warnings) std::cerr << "c warning: " << w << "\n";
  auto res = gridsat::brute_force(parsed.cnf, false, oracle_guard());
  if (res.decision == gridsat::OracleDecision::unsat) {
    std::cout << "s UNSATISFIABLE\n";
    return kExitUnsat;
  }
  std::cout << "s SATISFIABLE\n" << gridsat::model_line(res.models.front()) << "\n";
  return kExitSat;
}

int cmd_trace(const SolveArgs& args) {
  const auto variant = *gridsat::parse_variant(args.variant);
  auto parsed = read_input(args.input);
  for (const auto& w : parsed.warnings) std::cerr << "c warning: " << w << "\n";
  auto opts = engine_options(variant, args.schedule);
  opts.on_sweep = [](std::size_t s, const gridsat::CompatMatrix& c) { print_sweep(std::cout, s, c); };
  auto ev = gridsat::run_variant(variant, gridsat::build_matrix(parsed.cnf), opts);
  std::cerr << gridsat::stats_json(ev).dump() << "\n";
  return kExitOk;
}

struct AuditArgs {
  gridsat::CampaignConfig cfg;
  std::string out = "audit_out";
  bool json = false;
  bool mixed = false;
  bool no_minimize = false;
  bool timing = false;
};

int cmd_audit(AuditArgs args) {
  args.cfg.clause_len = args.mixed ? gridsat::ClauseLength::mixed : gridsat::ClauseLength::fixed3;
  args.cfg.minimize = !args.no_minimize;
  args.cfg.audit.oracle_max_vars = oracle_guard();
  try {
    args.cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  gridsat::AuditReport report = gridsat::run_campaign(args.cfg);
  gridsat::write_report(report, args.out, args.timing);
  if (args.json) std::cout << gridsat::report_json(report).dump(2) << "\n";

  for (const auto& [v, c] : report.per_variant)
    std::cerr << "c " << to_string(v) << ": both_sat=" << c.both_sat << " both_unsat=" << c.both_unsat
              << " engine_sat_oracle_unsat=" << c.engine_sat_oracle_unsat
              << " engine_unsat_oracle_sat=" << c.engine_unsat_oracle_sat << " grid_violations=" << c.grid_violations
              << "\n";
  std::cerr << "c report written to " << args.out << "\n";
  if (!report.soundness_ok()) {
    std::cerr << "c SOUNDNESS VIOLATION\n";
    return kExitSoundness;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compatibility-matrix depletion solver for 3-SAT"};
  app.require_subcommand(1);

  const std::vector<std::string> variants{"basic", "async", "triangular", "square"};
  const std::vector<std::string> schedules{"all", "upper"};

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "Decide a DIMACS formula and extract a verified model");
  solve->add_option("file", solve_args.input, "DIMACS file ('-' or omitted: stdin)");
  solve->add_option("--variant", solve_args.variant, "Depletion variant")->check(CLI::IsMember(variants));
  solve->add_option("--schedule", solve_args.schedule, "Triplet schedule")->check(CLI::IsMember(schedules));
  solve->add_flag("--trace", solve_args.trace, "Dump the matrix after every sweep to stderr");
  solve->add_flag("--json", solve_args.json, "Print run statistics as JSON to stderr");

  std::string oracle_input;
  auto* oracle = app.add_subcommand("oracle", "Exhaustive ground-truth decision");
  oracle->add_option("file", oracle_input, "DIMACS file ('-' or omitted: stdin)");

  SolveArgs trace_args;
  auto* trace = app.add_subcommand("trace", "Dump the matrix after build and after every sweep");
  trace->add_option("file", trace_args.input, "DIMACS file ('-' or omitted: stdin)");
  trace->add_option("--variant", trace_args.variant, "Depletion variant")->check(CLI::IsMember(variants));
  trace->add_option("--schedule", trace_args.schedule, "Triplet schedule")->check(CLI::IsMember(schedules));

  AuditArgs audit_args;
  auto& cfg = audit_args.cfg;
  auto* audit = app.add_subcommand("audit", "Audit every variant against the oracle on random instances");
  audit->add_option("--count", cfg.count, "Number of instances")->capture_default_str();
  audit->add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
  audit->add_option("--n-min", cfg.n_min, "Smallest variable count")->capture_default_str();
  audit->add_option("--n-max", cfg.n_max, "Largest variable count")->capture_default_str();
  audit->add_option("--ratio-min", cfg.ratio_min, "Smallest clause/variable ratio")->capture_default_str();
  audit->add_option("--ratio-max", cfg.ratio_max, "Largest clause/variable ratio")->capture_default_str();
  audit->add_option("--workers", cfg.workers, "Worker threads")->capture_default_str();
  audit->add_option("--out", audit_args.out, "Output directory")->capture_default_str();
  audit->add_flag("--json", audit_args.json, "Also print the report JSON to stdout");
  audit->add_flag("--mixed", audit_args.mixed, "Draw clause lengths from {1,2,3}");
  audit->add_flag("--embed-contradiction", cfg.embed_contradiction, "Append (x1) and (-x1) to every instance");
  audit->add_flag("--no-minimize", audit_args.no_minimize, "Keep discrepant instances unminimized");
  audit->add_flag("--timing", audit_args.timing, "Add per-variant wall times to records.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (*solve) return cmd_solve(solve_args);
    if (*oracle) return cmd_oracle(oracle_input);
    if (*trace) return cmd_trace(trace_args);
    if (*audit) return cmd_audit(audit_args);
  } catch (const gridsat::ParseError& e) {
    std::cerr << "error: parse: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kExitError;
}
