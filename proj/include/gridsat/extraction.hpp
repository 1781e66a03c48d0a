#pragma once

// Turns an engine SAT claim into a model by fixing variables one at a time
// and re-running the engine on each restriction. A model is only returned
// after it has been checked against the formula.

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "gridsat/cnf.hpp"
#include "gridsat/compat_matrix.hpp"
#include "gridsat/depletion.hpp"

namespace gridsat {

enum class BranchVerdict { sat_claim, unsat, contradiction };

inline const char* to_string(BranchVerdict b) {
  switch (b) {
    case BranchVerdict::sat_claim: return "SAT_CLAIM";
    case BranchVerdict::unsat: return "UNSAT";
    case BranchVerdict::contradiction: return "CONTRADICTION";
  }
  return "?";
}

struct BranchStep {
  Var var = 0;
  bool value = false;
  BranchVerdict verdict = BranchVerdict::unsat;
  friend bool operator==(const BranchStep&, const BranchStep&) = default;
};

enum class ExtractionStatus { model, engine_contradiction };

inline const char* to_string(ExtractionStatus s) {
  return s == ExtractionStatus::model ? "MODEL" : "ENGINE_CONTRADICTION";
}

struct ExtractionOutcome {
  ExtractionStatus status = ExtractionStatus::engine_contradiction;
  std::optional<Assignment> model;
  std::vector<BranchStep> branch_log;
  std::size_t engine_runs = 0;
};

/// Engine decision on a formula, built from scratch.
inline Decision engine_decide(const Cnf& f, Variant variant, const EngineOptions& opts = {}) {
  return run_variant(variant, build_matrix(f), opts).decision;
}

using DecisionProcedure = std::function<Decision(const Cnf&)>;

/// Variables are fixed in ascending order, true tried first. Variables that
/// occur in no clause of `f` are set to false without consulting `decide`.
/// Throws std::invalid_argument if `decide` rejects `f` itself.
inline ExtractionOutcome extract_self_reduce(const Cnf& f, const DecisionProcedure& decide) {
  ExtractionOutcome out;
  ++out.engine_runs;
  if (decide(f) != Decision::sat_claim)
    throw std::invalid_argument("extract_self_reduce: engine does not claim the formula satisfiable");

  std::vector<bool> occurs(f.num_vars + 1, false);
  for (const auto& c : f.clauses)
    for (const auto& l : c) occurs[l.var] = true;

  Assignment model(f.num_vars);
  Cnf current = f;
  auto try_branch = [&](Var v, bool value) -> std::optional<Cnf> {
    Restriction r = assign_var(current, v, value);
    if (std::holds_alternative<Contradiction>(r)) {
      out.branch_log.push_back({v, value, BranchVerdict::contradiction});
      return std::nullopt;
    }
    Cnf& next = std::get<Cnf>(r);
    ++out.engine_runs;
    Decision d = decide(next);
    out.branch_log.push_back({v, value, d == Decision::sat_claim ? BranchVerdict::sat_claim : BranchVerdict::unsat});
    if (d != Decision::sat_claim) return std::nullopt;
    return std::move(next);
  };

  for (Var v = 1; v <= f.num_vars; ++v) {
    if (!occurs[v]) continue;
    if (auto next = try_branch(v, true)) {
      model.set(v, true);
      current = std::move(*next);
    } else if (auto alt = try_branch(v, false)) {
      model.set(v, false);
      current = std::move(*alt);
    } else {
      out.status = ExtractionStatus::engine_contradiction;
      return out;
    }
  }

  if (!evaluate(f, model)) {
    out.status = ExtractionStatus::engine_contradiction;
    return out;
  }
  out.status = ExtractionStatus::model;
  out.model = std::move(model);
  return out;
}

inline ExtractionOutcome extract_self_reduce(const Cnf& f, Variant variant, const EngineOptions& opts = {}) {
  EngineOptions quiet = opts;
  quiet.on_sweep = nullptr;
  return extract_self_reduce(f, [&](const Cnf& g) { return engine_decide(g, variant, quiet); });
}

// ---------------------------------------------------------------------------
// DIMACS solution output

/// "v <lits> 0" for all variables of the model.
inline std::string model_line(const Assignment& a) {
  std::string s = "v";
  for (Var v = 1; v <= a.size(); ++v) s += " " + std::string(a[v] ? "" : "-") + std::to_string(v);
  s += " 0";
  return s;
}

}  // namespace gridsat
