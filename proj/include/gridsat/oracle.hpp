#pragma once

// Ground truth by exhaustive enumeration, and the correspondence between
// assignments and grids of the compatibility matrix.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gridsat/cnf.hpp"
#include "gridsat/compat_matrix.hpp"

namespace gridsat {

inline constexpr Var kDefaultOracleMaxVars = 30;
inline constexpr std::uint64_t kDefaultGridCandidateLimit = std::uint64_t{1} << 20;

class GuardExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OracleDecision { sat, unsat };

inline const char* to_string(OracleDecision d) { return d == OracleDecision::sat ? "SAT" : "UNSAT"; }

struct OracleResult {
  OracleDecision decision = OracleDecision::unsat;
  /// Every model when enumeration was requested, else at most the first.
  std::vector<Assignment> models;
};

/// Assignment number `code` in canonical order: x1 is the most significant
/// bit, false = 0.
inline Assignment assignment_from_code(Var n, std::uint64_t code) {
  Assignment a(n);
  for (Var v = 1; v <= n; ++v) a.set(v, (code >> (n - v)) & 1u);
  return a;
}

/// Scans all 2^n assignments in canonical order.
inline OracleResult brute_force(const Cnf& f, bool enumerate_all, Var max_vars = kDefaultOracleMaxVars) {
  const Var n = f.num_vars;
  if (n > max_vars || n > 62)
    throw GuardExceeded("oracle limited to " + std::to_string(max_vars) + " variables, formula has " +
                        std::to_string(n));

  // A clause is falsified exactly when the bits of its variables equal the
  // clause's falsifying pattern.
  struct Mask {
    std::uint64_t vars = 0;
    std::uint64_t falsifying = 0;
  };
  std::vector<Mask> masks;
  masks.reserve(f.clauses.size());
  for (const auto& c : f.clauses) {
    Mask mk;
    for (const auto& l : c) {
      if (l.var > n) throw std::invalid_argument("literal variable exceeds num_vars");
      std::uint64_t bit = std::uint64_t{1} << (n - l.var);
      mk.vars |= bit;
      if (l.negated) mk.falsifying |= bit;
    }
    masks.push_back(mk);
  }

  OracleResult out;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t code = 0; code < total; ++code) {
    bool ok = true;
    for (const auto& mk : masks)
      if ((code & mk.vars) == mk.falsifying) {
        ok = false;
        break;
      }
    if (!ok) continue;
    out.decision = OracleDecision::sat;
    out.models.push_back(assignment_from_code(n, code));
    if (!enumerate_all) break;
  }
  return out;
}

inline Grid grid_from_assignment(const Cnf& f, const Assignment& a) {
  Grid g;
  g.row_choice.reserve(f.clauses.size());
  for (const auto& c : f.clauses) g.row_choice.push_back(row_of(c, a));
  return g;
}

/// Product of the per-clause row counts, saturating at 2^63.
inline std::uint64_t grid_candidate_count(const CompatMatrix& c) {
  std::uint64_t total = 1;
  for (auto d : c.dims()) {
    if (total > (std::uint64_t{1} << 62) / d) return std::uint64_t{1} << 63;
    total *= d;
  }
  return total;
}

/// Every grid of `c` whose entries are all set, in mixed-radix lexicographic
/// order of (mu(0), ..., mu(m-1)). Plain scan over all candidates.
inline std::vector<Grid> scan_solution_grids(const CompatMatrix& c,
                                             std::uint64_t candidate_limit = kDefaultGridCandidateLimit) {
  const std::uint64_t candidates = grid_candidate_count(c);
  if (candidates > candidate_limit)
    throw GuardExceeded("grid scan limited to " + std::to_string(candidate_limit) + " candidates");
  const std::size_t m = c.size();
  std::vector<Grid> out;
  Grid g;
  g.row_choice.assign(m, 0);
  for (std::uint64_t n = 0; n < candidates; ++n) {
    if (is_solution_grid(c, g)) out.push_back(g);
    for (std::size_t pos = m; pos-- > 0;) {
      if (++g.row_choice[pos] < c.dims()[pos]) break;
      g.row_choice[pos] = 0;
    }
  }
  return out;
}

/// Solution grids of the built matrix obtained from the formula's models,
/// deduplicated and sorted.
inline std::vector<Grid> enumerate_solution_grids(const Cnf& f,
                                                  std::uint64_t candidate_limit = kDefaultGridCandidateLimit,
                                                  Var max_vars = kDefaultOracleMaxVars) {
  std::uint64_t candidates = 1;
  for (const auto& c : f.clauses) {
    candidates *= c.rows();
    if (candidates > candidate_limit)
      throw GuardExceeded("grid enumeration limited to " + std::to_string(candidate_limit) + " candidates");
  }
  auto res = brute_force(f, true, max_vars);
  std::vector<Grid> grids;
  grids.reserve(res.models.size());
  for (const auto& a : res.models) grids.push_back(grid_from_assignment(f, a));
  std::sort(grids.begin(), grids.end());
  grids.erase(std::unique(grids.begin(), grids.end()), grids.end());
  return grids;
}

}  // namespace gridsat
