#pragma once

// Random instance generation, per-instance claim auditing of every depletion
// variant against the exhaustive oracle, counterexample minimization and
// campaign reports.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "gridsat/cnf.hpp"
#include "gridsat/compat_matrix.hpp"
#include "gridsat/depletion.hpp"
#include "gridsat/extraction.hpp"
#include "gridsat/oracle.hpp"
#include "json.hpp"

namespace gridsat {

// ---------------------------------------------------------------------------
// Random instances

/// Uniform integer in [0, bound) from the raw 64-bit engine output, so that
/// streams are identical across standard libraries.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_below: empty range");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  for (;;) {
    std::uint64_t x = rng();
    if (x < limit) return x % bound;
  }
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

enum class ClauseLength { fixed3, mixed };

struct GenConfig {
  Var num_vars = 1;
  std::size_t num_clauses = 1;
  ClauseLength clause_len = ClauseLength::fixed3;
  std::uint64_t seed = 0;
  bool allow_duplicate_clauses = true;
};

inline Cnf gen_random(const GenConfig& cfg) {
  if (cfg.num_vars < 1 || cfg.num_clauses < 1) throw std::invalid_argument("gen_random: need n >= 1 and m >= 1");
  if (cfg.clause_len == ClauseLength::fixed3 && cfg.num_vars < 3)
    throw std::invalid_argument("gen_random: 3 distinct variables need n >= 3");

  std::mt19937_64 rng(cfg.seed);
  Cnf f;
  f.num_vars = cfg.num_vars;
  const std::size_t max_len = std::min<std::size_t>(kMaxClauseLength, cfg.num_vars);
  std::size_t attempts = 0;
  const std::size_t max_attempts = 1000 * cfg.num_clauses + 1000;

  while (f.clauses.size() < cfg.num_clauses) {
    if (++attempts > max_attempts)
      throw std::invalid_argument("gen_random: cannot draw enough distinct clauses");
    const std::size_t k = cfg.clause_len == ClauseLength::fixed3 ? 3 : 1 + uniform_below(rng, max_len);
    std::vector<Literal> lits;
    while (lits.size() < k) {
      Var v = static_cast<Var>(1 + uniform_below(rng, cfg.num_vars));
      if (std::any_of(lits.begin(), lits.end(), [v](const Literal& l) { return l.var == v; })) continue;
      lits.push_back(Literal{v, false});
    }
    for (auto& l : lits) l.negated = uniform_below(rng, 2) == 1;
    std::sort(lits.begin(), lits.end());
    Clause c = Clause::make(std::move(lits));
    if (!cfg.allow_duplicate_clauses && std::find(f.clauses.begin(), f.clauses.end(), c) != f.clauses.end())
      continue;
    f.clauses.push_back(std::move(c));
  }
  return f;
}

// ---------------------------------------------------------------------------
// Minimization

using InstancePredicate = std::function<bool(const Cnf&)>;

namespace detail {

inline Cnf without_clauses(const Cnf& f, std::size_t begin, std::size_t end) {
  Cnf out;
  out.num_vars = f.num_vars;
  for (std::size_t x = 0; x < f.clauses.size(); ++x)
    if (x < begin || x >= end) out.clauses.push_back(f.clauses[x]);
  return out;
}

/// Removes single clauses until none can be removed.
inline Cnf one_minimal_pass(Cnf f, const InstancePredicate& pred) {
  bool removed = true;
  while (removed) {
    removed = false;
    for (std::size_t x = 0; x < f.clauses.size(); ++x) {
      Cnf candidate = without_clauses(f, x, x + 1);
      if (pred(candidate)) {
        f = std::move(candidate);
        removed = true;
        break;
      }
    }
  }
  return f;
}

inline bool is_one_minimal(const Cnf& f, const InstancePredicate& pred) {
  for (std::size_t x = 0; x < f.clauses.size(); ++x)
    if (pred(without_clauses(f, x, x + 1))) return false;
  return true;
}

}  // namespace detail

/// Clause-subset delta debugging. The result keeps `pred` true and no single
/// clause can be removed from it. A 1-minimal input is returned unchanged.
inline Cnf minimize(const Cnf& f, const InstancePredicate& pred) {
  if (!pred(f)) throw std::invalid_argument("minimize: predicate does not hold on the input");
  if (detail::is_one_minimal(f, pred)) return f;

  Cnf cur = f;
  std::size_t granularity = 2;
  while (cur.clauses.size() >= 2) {
    const std::size_t size = cur.clauses.size();
    granularity = std::min(granularity, size);
    const std::size_t chunk = (size + granularity - 1) / granularity;
    bool reduced = false;
    for (std::size_t begin = 0; begin < size; begin += chunk) {
      Cnf complement = detail::without_clauses(cur, begin, std::min(size, begin + chunk));
      if (pred(complement)) {
        cur = std::move(complement);
        granularity = std::max<std::size_t>(granularity - 1, 2);
        reduced = true;
        break;
      }
    }
    if (reduced) continue;
    if (granularity >= size) break;
    granularity = std::min(granularity * 2, size);
  }
  return detail::one_minimal_pass(std::move(cur), pred);
}

// ---------------------------------------------------------------------------
// Auditing one instance

struct AuditOptions {
  Var oracle_max_vars = kDefaultOracleMaxVars;
  bool run_extraction = true;
  Variant extraction_variant = Variant::basic;
};

struct VariantOutcome {
  Variant variant = Variant::basic;
  Decision decision = Decision::sat_claim;
  std::size_t sweeps = 0;
  std::size_t box_updates = 0;
  bool terminated_early = false;
  std::chrono::nanoseconds wall_time{0};
  /// Model-grid entries found cleared in the returned matrix.
  std::size_t grid_violations = 0;
  /// sweeps <= total entry count + 1.
  bool within_sweep_bound = true;
  bool agrees = true;
};

struct AuditRecord {
  std::size_t index = 0;
  Var n = 0;
  std::size_t m = 0;
  std::uint64_t seed = 0;
  OracleDecision oracle = OracleDecision::unsat;
  std::size_t model_count = 0;
  std::vector<VariantOutcome> variants;  // in kAllVariants order
  std::optional<ExtractionStatus> extraction;
  bool triangular_matches_basic = true;

  const VariantOutcome& outcome(Variant v) const {
    for (const auto& o : variants)
      if (o.variant == v) return o;
    throw std::out_of_range("variant not audited");
  }
};

inline bool agrees(Decision engine, OracleDecision oracle) {
  return (engine == Decision::unsat) == (oracle == OracleDecision::unsat);
}

inline AuditRecord audit_instance(const Cnf& f, const AuditOptions& opts = {}, std::size_t index = 0,
                                  std::uint64_t seed = 0) {
  AuditRecord rec;
  rec.index = index;
  rec.n = f.num_vars;
  rec.m = f.clauses.size();
  rec.seed = seed;

  OracleResult truth = brute_force(f, true, opts.oracle_max_vars);
  rec.oracle = truth.decision;
  rec.model_count = truth.models.size();

  std::vector<Grid> grids;
  grids.reserve(truth.models.size());
  for (const auto& a : truth.models) grids.push_back(grid_from_assignment(f, a));
  std::sort(grids.begin(), grids.end());
  grids.erase(std::unique(grids.begin(), grids.end()), grids.end());

  const CompatMatrix built = build_matrix(f);
  const std::size_t bound = built.total_entries() + 1;
  for (auto v : kAllVariants) {
    EngineVerdict ev = run_variant(v, built);
    VariantOutcome o;
    o.variant = v;
    o.decision = ev.decision;
    o.sweeps = ev.stats.sweeps;
    o.box_updates = ev.stats.box_updates;
    o.terminated_early = ev.stats.terminated_early;
    o.wall_time = ev.stats.wall_time;
    for (const auto& g : grids) o.grid_violations += cleared_grid_entries(ev.fixpoint, g);
    o.within_sweep_bound = ev.stats.sweeps <= bound;
    o.agrees = agrees(ev.decision, rec.oracle);
    rec.variants.push_back(o);
  }
  rec.triangular_matches_basic = rec.outcome(Variant::triangular).decision == rec.outcome(Variant::basic).decision;

  if (opts.run_extraction && rec.outcome(opts.extraction_variant).decision == Decision::sat_claim)
    rec.extraction = extract_self_reduce(f, opts.extraction_variant).status;
  return rec;
}

// ---------------------------------------------------------------------------
// Campaigns

struct CampaignConfig {
  std::size_t count = 0;
  std::uint64_t seed = 1;
  Var n_min = 5;
  Var n_max = 16;
  double ratio_min = 3.0;
  double ratio_max = 5.0;
  ClauseLength clause_len = ClauseLength::fixed3;
  bool allow_duplicate_clauses = true;
  /// Append (x1) and (-x1) to every instance.
  bool embed_contradiction = false;
  bool minimize = true;
  unsigned workers = 1;
  AuditOptions audit;

  void validate() const {
    if (n_min < 1 || n_max < n_min) throw std::invalid_argument("campaign: bad variable range");
    if (clause_len == ClauseLength::fixed3 && n_min < 3) throw std::invalid_argument("campaign: fixed3 needs n >= 3");
    if (!(ratio_min > 0.0) || ratio_max < ratio_min) throw std::invalid_argument("campaign: bad ratio range");
    if (n_max > audit.oracle_max_vars) throw std::invalid_argument("campaign: n_max exceeds the oracle guard");
  }
};

/// The instance a campaign draws at position `index`.
inline Cnf campaign_instance(const CampaignConfig& cfg, std::size_t index, std::uint64_t* seed_out = nullptr) {
  std::mt19937_64 rng(splitmix64(cfg.seed ^ splitmix64(index)));
  GenConfig g;
  g.num_vars = static_cast<Var>(cfg.n_min + uniform_below(rng, cfg.n_max - cfg.n_min + 1));
  auto lo = static_cast<std::size_t>(std::ceil(cfg.ratio_min * g.num_vars));
  auto hi = static_cast<std::size_t>(std::floor(cfg.ratio_max * g.num_vars));
  lo = std::max<std::size_t>(lo, 1);
  hi = std::max(hi, lo);
  g.num_clauses = lo + uniform_below(rng, hi - lo + 1);
  g.clause_len = cfg.clause_len;
  g.allow_duplicate_clauses = cfg.allow_duplicate_clauses;
  g.seed = rng();
  if (seed_out) *seed_out = g.seed;
  Cnf f = gen_random(g);
  if (cfg.embed_contradiction) {
    f.clauses.push_back(Clause::make({Literal{1, false}}));
    f.clauses.push_back(Clause::make({Literal{1, true}}));
  }
  return f;
}

enum class DiscrepancyKind { completeness, soundness, triangular_divergence };

inline const char* to_string(DiscrepancyKind k) {
  switch (k) {
    case DiscrepancyKind::completeness: return "completeness";
    case DiscrepancyKind::soundness: return "soundness";
    case DiscrepancyKind::triangular_divergence: return "triangular_divergence";
  }
  return "?";
}

struct Counterexample {
  std::size_t index = 0;
  Variant variant = Variant::basic;
  DiscrepancyKind kind = DiscrepancyKind::completeness;
  std::size_t original_clauses = 0;
  Cnf minimized;
  OracleDecision oracle = OracleDecision::unsat;
  Decision engine = Decision::sat_claim;

  std::string file_name() const {
    return "cex_" + std::to_string(index) + "_" + to_string(variant) + "_" + to_string(kind) + ".cnf";
  }
};

/// Predicate that holds while `f` still exhibits the discrepancy.
inline InstancePredicate discrepancy_predicate(DiscrepancyKind kind, Variant v, Var max_vars) {
  switch (kind) {
    case DiscrepancyKind::completeness:
      return [v, max_vars](const Cnf& f) {
        return brute_force(f, false, max_vars).decision == OracleDecision::unsat &&
               engine_decide(f, v) == Decision::sat_claim;
      };
    case DiscrepancyKind::soundness:
      return [v, max_vars](const Cnf& f) {
        return brute_force(f, false, max_vars).decision == OracleDecision::sat &&
               engine_decide(f, v) == Decision::unsat;
      };
    case DiscrepancyKind::triangular_divergence:
      return [](const Cnf& f) {
        CompatMatrix c = build_matrix(f);
        return run_variant(Variant::triangular, c).decision != run_variant(Variant::basic, c).decision;
      };
  }
  throw std::logic_error("unknown discrepancy kind");
}

struct VariantCounts {
  std::size_t both_sat = 0;
  std::size_t both_unsat = 0;
  std::size_t engine_sat_oracle_unsat = 0;
  std::size_t engine_unsat_oracle_sat = 0;
  std::size_t grid_violations = 0;
  std::size_t sweep_bound_violations = 0;

  std::size_t total() const { return both_sat + both_unsat + engine_sat_oracle_unsat + engine_unsat_oracle_sat; }
};

struct IterationStats {
  std::size_t min = 0;
  double median = 0.0;
  std::size_t max = 0;
  std::map<std::size_t, std::size_t> histogram;  // sweeps -> instances
};

inline IterationStats iteration_stats(std::vector<std::size_t> sweeps) {
  IterationStats s;
  if (sweeps.empty()) return s;
  std::sort(sweeps.begin(), sweeps.end());
  s.min = sweeps.front();
  s.max = sweeps.back();
  const std::size_t n = sweeps.size();
  s.median = n % 2 ? static_cast<double>(sweeps[n / 2]) : (sweeps[n / 2 - 1] + sweeps[n / 2]) / 2.0;
  for (auto x : sweeps) ++s.histogram[x];
  return s;
}

struct AuditReport {
  CampaignConfig config;
  std::vector<AuditRecord> records;
  std::map<Variant, VariantCounts> per_variant;
  std::map<Variant, IterationStats> iterations;
  std::size_t extraction_models = 0;
  std::size_t extraction_contradictions = 0;
  std::size_t triangular_divergences = 0;
  std::vector<Counterexample> counterexamples;

  /// No engine UNSAT on a satisfiable instance and no model grid depleted.
  bool soundness_ok() const {
    for (const auto& [v, c] : per_variant)
      if (c.engine_unsat_oracle_sat || c.grid_violations) return false;
    return true;
  }
};

namespace detail {

inline std::vector<Counterexample> minimize_discrepancies(const Cnf& f, const AuditRecord& rec,
                                                          const CampaignConfig& cfg) {
  std::vector<Counterexample> out;
  auto add = [&](DiscrepancyKind kind, Variant v, Decision engine) {
    Counterexample cx;
    cx.index = rec.index;
    cx.variant = v;
    cx.kind = kind;
    cx.original_clauses = f.clauses.size();
    cx.oracle = rec.oracle;
    cx.engine = engine;
    cx.minimized = cfg.minimize ? minimize(f, discrepancy_predicate(kind, v, cfg.audit.oracle_max_vars)) : f;
    if (kind != DiscrepancyKind::triangular_divergence) {
      cx.oracle = brute_force(cx.minimized, false, cfg.audit.oracle_max_vars).decision;
      cx.engine = engine_decide(cx.minimized, v);
    }
    out.push_back(std::move(cx));
  };
  for (const auto& o : rec.variants) {
    if (o.agrees) continue;
    add(o.decision == Decision::sat_claim ? DiscrepancyKind::completeness : DiscrepancyKind::soundness, o.variant,
        o.decision);
  }
  if (!rec.triangular_matches_basic)
    add(DiscrepancyKind::triangular_divergence, Variant::triangular, rec.outcome(Variant::triangular).decision);
  return out;
}

}  // namespace detail

/// Audits `cfg.count` generated instances. Results depend only on the
/// configuration, never on the number of workers.
inline AuditReport run_campaign(const CampaignConfig& cfg) {
  cfg.validate();
  AuditReport report;
  report.config = cfg;
  for (auto v : kAllVariants) report.per_variant[v] = {};

  std::vector<AuditRecord> records(cfg.count);
  std::vector<std::vector<Counterexample>> found(cfg.count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (;;) {
      std::size_t idx = next.fetch_add(1);
      if (idx >= cfg.count) return;
      try {
        std::uint64_t seed = 0;
        Cnf f = campaign_instance(cfg, idx, &seed);
        records[idx] = audit_instance(f, cfg.audit, idx, seed);
        found[idx] = detail::minimize_discrepancies(f, records[idx], cfg);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = cfg.count;
        return;
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(cfg.workers, static_cast<unsigned>(cfg.count)));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::map<Variant, std::vector<std::size_t>> sweeps;
  for (std::size_t idx = 0; idx < cfg.count; ++idx) {
    const auto& rec = records[idx];
    for (const auto& o : rec.variants) {
      auto& c = report.per_variant[o.variant];
      const bool engine_sat = o.decision == Decision::sat_claim;
      const bool oracle_sat = rec.oracle == OracleDecision::sat;
      if (engine_sat && oracle_sat) ++c.both_sat;
      else if (!engine_sat && !oracle_sat) ++c.both_unsat;
      else if (engine_sat) ++c.engine_sat_oracle_unsat;
      else ++c.engine_unsat_oracle_sat;
      c.grid_violations += o.grid_violations;
      c.sweep_bound_violations += o.within_sweep_bound ? 0 : 1;
      sweeps[o.variant].push_back(o.sweeps);
    }
    if (rec.extraction == ExtractionStatus::model) ++report.extraction_models;
    if (rec.extraction == ExtractionStatus::engine_contradiction) ++report.extraction_contradictions;
    if (!rec.triangular_matches_basic) ++report.triangular_divergences;
    for (auto& cx : found[idx]) report.counterexamples.push_back(std::move(cx));
  }
  for (auto v : kAllVariants) report.iterations[v] = iteration_stats(sweeps[v]);
  report.records = std::move(records);
  return report;
}

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::json stats_json(const EngineVerdict& ev) {
  return {{"variant", to_string(ev.variant)},
          {"sweeps", ev.stats.sweeps},
          {"box_updates", ev.stats.box_updates},
          {"early_exit", ev.stats.terminated_early},
          {"decision", to_string(ev.decision)}};
}

inline nlohmann::json iteration_json(const IterationStats& s) {
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& [sweeps, n] : s.histogram) hist.push_back({sweeps, n});
  return {{"min", s.min}, {"median", s.median}, {"max", s.max}, {"histogram", hist}};
}

/// Stable-key JSON form of a report. Contains no timing data, so equal
/// configurations produce identical bytes.
inline nlohmann::json report_json(const AuditReport& r) {
  const auto& c = r.config;
  nlohmann::json j;
  j["campaign"] = {{"count", c.count},
                   {"seed", c.seed},
                   {"n_min", c.n_min},
                   {"n_max", c.n_max},
                   {"ratio_min", c.ratio_min},
                   {"ratio_max", c.ratio_max},
                   {"clause_len", c.clause_len == ClauseLength::fixed3 ? "fixed3" : "mixed"},
                   {"embed_contradiction", c.embed_contradiction},
                   {"minimize", c.minimize}};
  nlohmann::json pv = nlohmann::json::object();
  for (const auto& [v, k] : r.per_variant)
    pv[to_string(v)] = {{"both_sat", k.both_sat},
                        {"both_unsat", k.both_unsat},
                        {"engine_sat_oracle_unsat", k.engine_sat_oracle_unsat},
                        {"engine_unsat_oracle_sat", k.engine_unsat_oracle_sat},
                        {"grid_violations", k.grid_violations},
                        {"sweep_bound_violations", k.sweep_bound_violations}};
  j["per_variant"] = pv;

  nlohmann::json it = iteration_json(r.iterations.count(Variant::basic) ? r.iterations.at(Variant::basic)
                                                                        : IterationStats{});
  it["variant"] = "basic";
  nlohmann::json by = nlohmann::json::object();
  for (const auto& [v, s] : r.iterations) by[to_string(v)] = iteration_json(s);
  it["by_variant"] = by;
  j["iterations"] = it;

  j["extraction"] = {{"model", r.extraction_models}, {"engine_contradiction", r.extraction_contradictions}};
  j["triangular_divergences"] = r.triangular_divergences;
  j["soundness_ok"] = r.soundness_ok();

  nlohmann::json cex = nlohmann::json::array();
  for (const auto& x : r.counterexamples)
    cex.push_back({{"dimacs", to_dimacs(x.minimized)},
                   {"variant", to_string(x.variant)},
                   {"kind", to_string(x.kind)},
                   {"oracle", to_string(x.oracle)},
                   {"engine", to_string(x.engine)},
                   {"instance", x.index},
                   {"original_clauses", x.original_clauses},
                   {"minimized_clauses", x.minimized.clauses.size()},
                   {"file", x.file_name()}});
  j["counterexamples"] = cex;
  return j;
}

inline std::string report_csv(const AuditReport& r, bool include_timing = false) {
  std::ostringstream os;
  os << "index,n,m,seed,oracle,models";
  for (auto v : kAllVariants) {
    const std::string p = to_string(v);
    os << ',' << p << "_decision," << p << "_sweeps," << p << "_updates," << p << "_early," << p
       << "_grid_violations";
    if (include_timing) os << ',' << p << "_ns";
  }
  os << ",extraction,triangular_matches_basic\n";
  for (const auto& rec : r.records) {
    os << rec.index << ',' << rec.n << ',' << rec.m << ',' << rec.seed << ',' << to_string(rec.oracle) << ','
       << rec.model_count;
    for (const auto& o : rec.variants) {
      os << ',' << to_string(o.decision) << ',' << o.sweeps << ',' << o.box_updates << ','
         << (o.terminated_early ? 1 : 0) << ',' << o.grid_violations;
      if (include_timing) os << ',' << o.wall_time.count();
    }
    os << ',' << (rec.extraction ? to_string(*rec.extraction) : "") << ','
       << (rec.triangular_matches_basic ? 1 : 0) << '\n';
  }
  return os.str();
}

/// Writes report.json, records.csv and one .cnf per counterexample.
inline void write_report(const AuditReport& r, const std::filesystem::path& dir, bool include_timing = false) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream js(dir / "report.json");
    js << report_json(r).dump(2) << '\n';
  }
  {
    std::ofstream csv(dir / "records.csv");
    csv << report_csv(r, include_timing);
  }
  for (const auto& x : r.counterexamples) {
    std::ofstream cnf(dir / x.file_name());
    cnf << "c " << to_string(x.kind) << " discrepancy, variant " << to_string(x.variant) << ", instance "
        << x.index << "\n";
    cnf << "c oracle " << to_string(x.oracle) << ", engine " << to_string(x.engine) << "\n";
    cnf << to_dimacs(x.minimized);
  }
}

}  // namespace gridsat
