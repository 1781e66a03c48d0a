#pragma once

// Formula model for 3-SAT: literals, normalized clauses, DIMACS ingestion,
// per-clause truth tables and the substitution step used by extraction.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace gridsat {

using Var = std::uint32_t;

inline constexpr std::size_t kMaxClauseLength = 3;

struct Literal {
  Var var = 1;
  bool negated = false;

  constexpr Literal() = default;
  constexpr Literal(Var v, bool neg) : var(v), negated(neg) {}

  static Literal from_dimacs(long long lit) {
    if (lit == 0) throw std::invalid_argument("literal 0 is a clause terminator");
    return Literal{static_cast<Var>(lit < 0 ? -lit : lit), lit < 0};
  }

  long long to_dimacs() const {
    return negated ? -static_cast<long long>(var) : static_cast<long long>(var);
  }

  /// True iff the literal holds when its variable takes `value`.
  constexpr bool satisfied_by(bool value) const { return value != negated; }

  friend constexpr bool operator==(const Literal&, const Literal&) = default;
  friend constexpr auto operator<=>(const Literal&, const Literal&) = default;
};

/// A disjunction of one to three literals over distinct variables, sorted by
/// variable. Construct through Clause::make or normalize_literals.
class Clause {
 public:
  Clause() = default;

  /// Validates an already-normalized literal list.
  static Clause make(std::vector<Literal> lits) {
    if (lits.empty() || lits.size() > kMaxClauseLength)
      throw std::invalid_argument("clause length must be 1..3");
    for (std::size_t p = 0; p < lits.size(); ++p) {
      if (lits[p].var == 0) throw std::invalid_argument("variable index must be >= 1");
      if (p > 0 && lits[p - 1].var >= lits[p].var)
        throw std::invalid_argument("clause literals must have strictly ascending variables");
    }
    Clause c;
    c.lits_ = std::move(lits);
    return c;
  }

  std::size_t size() const { return lits_.size(); }
  const Literal& operator[](std::size_t p) const { return lits_[p]; }
  auto begin() const { return lits_.begin(); }
  auto end() const { return lits_.end(); }
  const std::vector<Literal>& literals() const { return lits_; }

  /// Number of truth-table rows, 2^k.
  std::size_t rows() const { return std::size_t{1} << lits_.size(); }

  bool mentions(Var v) const {
    return std::any_of(lits_.begin(), lits_.end(), [v](const Literal& l) { return l.var == v; });
  }

  friend bool operator==(const Clause&, const Clause&) = default;

 private:
  std::vector<Literal> lits_;
};

enum class NormalizeStatus { ok, tautology, empty };

struct NormalizedLiterals {
  NormalizeStatus status = NormalizeStatus::ok;
  std::vector<Literal> literals;
};

/// Sorts by variable, collapses duplicate literals and detects complementary
/// pairs. Does not enforce the length bound.
inline NormalizedLiterals normalize_literals(std::vector<Literal> lits) {
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  for (std::size_t p = 1; p < lits.size(); ++p)
    if (lits[p - 1].var == lits[p].var) return {NormalizeStatus::tautology, {}};
  if (lits.empty()) return {NormalizeStatus::empty, {}};
  return {NormalizeStatus::ok, std::move(lits)};
}

struct Cnf {
  Var num_vars = 0;
  std::vector<Clause> clauses;

  std::size_t num_clauses() const { return clauses.size(); }

  /// Throws if a clause references a variable beyond num_vars.
  void validate() const {
    for (const auto& c : clauses)
      for (const auto& l : c)
        if (l.var > num_vars) throw std::invalid_argument("literal variable exceeds num_vars");
  }

  friend bool operator==(const Cnf&, const Cnf&) = default;
};

/// Builds a Cnf from DIMACS-style integer clauses, applying normalization.
/// Tautologies are dropped; empty or over-long clauses throw.
inline Cnf make_cnf(Var num_vars, const std::vector<std::vector<long long>>& clauses) {
  Cnf f;
  f.num_vars = num_vars;
  for (const auto& raw : clauses) {
    std::vector<Literal> lits;
    for (long long x : raw) lits.push_back(Literal::from_dimacs(x));
    auto norm = normalize_literals(std::move(lits));
    if (norm.status == NormalizeStatus::tautology) continue;
    if (norm.status == NormalizeStatus::empty) throw std::invalid_argument("empty clause");
    f.clauses.push_back(Clause::make(std::move(norm.literals)));
  }
  f.validate();
  return f;
}

/// Re-applies clause normalization; the identity on any Cnf built by this
/// library.
inline Cnf normalize(const Cnf& f) {
  Cnf out;
  out.num_vars = f.num_vars;
  for (const auto& c : f.clauses) {
    auto norm = normalize_literals(c.literals());
    if (norm.status == NormalizeStatus::tautology) continue;
    if (norm.status == NormalizeStatus::empty) throw std::invalid_argument("empty clause");
    out.clauses.push_back(Clause::make(std::move(norm.literals)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// DIMACS

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The input contains an empty clause and is therefore unsatisfiable.
class TriviallyUnsatError : public ParseError {
 public:
  explicit TriviallyUnsatError(const std::string& what) : ParseError(what) {}
};

struct ParsedCnf {
  Cnf cnf;
  std::vector<std::string> warnings;
};

inline ParsedCnf parse_dimacs(std::istream& in) {
  ParsedCnf out;
  bool have_header = false;
  std::size_t declared_clauses = 0;
  std::size_t clauses_seen = 0;
  std::size_t line_no = 0;
  std::vector<Literal> pending;
  std::string line;

  auto where = [&] { return "line " + std::to_string(line_no) + ": "; };

  auto finish_clause = [&] {
    ++clauses_seen;
    auto norm = normalize_literals(std::move(pending));
    pending.clear();
    switch (norm.status) {
      case NormalizeStatus::empty:
        throw TriviallyUnsatError(where() + "empty clause (trivially UNSAT input)");
      case NormalizeStatus::tautology:
        out.warnings.push_back(where() + "dropped tautological clause " + std::to_string(clauses_seen));
        return;
      case NormalizeStatus::ok:
        break;
    }
    if (norm.literals.size() > kMaxClauseLength)
      throw ParseError(where() + "clause " + std::to_string(clauses_seen) + " has " +
                       std::to_string(norm.literals.size()) + " distinct literals (max 3)");
    out.cnf.clauses.push_back(Clause::make(std::move(norm.literals)));
  };

  while (std::getline(in, line)) {
    ++line_no;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    char lead = line[first];
    if (lead == 'c') continue;
    if (lead == '%') break;  // SATLIB trailer
    std::istringstream ls(line.substr(first));
    if (lead == 'p') {
      if (have_header) throw ParseError(where() + "duplicate header");
      std::string p, fmt, extra;
      long long n = -1, m = -1;
      if (!(ls >> p >> fmt >> n >> m) || p != "p" || fmt != "cnf" || n < 0 || m < 0 || (ls >> extra))
        throw ParseError(where() + "malformed header, expected 'p cnf <vars> <clauses>'");
      if (n > 0xFFFFFFFFLL) throw ParseError(where() + "variable count too large");
      out.cnf.num_vars = static_cast<Var>(n);
      declared_clauses = static_cast<std::size_t>(m);
      have_header = true;
      continue;
    }
    if (!have_header) throw ParseError(where() + "clause data before 'p cnf' header");
    std::string tok;
    while (ls >> tok) {
      char* endp = nullptr;
      long long lit = std::strtoll(tok.c_str(), &endp, 10);
      if (endp == tok.c_str() || *endp != '\0') throw ParseError(where() + "bad literal '" + tok + "'");
      if (lit == 0) {
        finish_clause();
        continue;
      }
      long long v = lit < 0 ? -lit : lit;
      if (v > static_cast<long long>(out.cnf.num_vars))
        throw ParseError(where() + "literal " + tok + " exceeds declared variable count " +
                         std::to_string(out.cnf.num_vars));
      pending.push_back(Literal::from_dimacs(lit));
    }
  }
  if (!have_header) throw ParseError("missing 'p cnf' header");
  if (!pending.empty()) throw ParseError("last clause is not terminated by 0");
  if (clauses_seen != declared_clauses)
    out.warnings.push_back("header declares " + std::to_string(declared_clauses) + " clauses, found " +
                           std::to_string(clauses_seen));
  return out;
}

inline ParsedCnf parse_dimacs(const std::string& text) {
  std::istringstream in(text);
  return parse_dimacs(in);
}

inline std::string to_dimacs(const Cnf& f) {
  std::string s = "p cnf " + std::to_string(f.num_vars) + " " + std::to_string(f.clauses.size()) + "\n";
  for (const auto& c : f.clauses) {
    for (const auto& l : c) s += std::to_string(l.to_dimacs()) + " ";
    s += "0\n";
  }
  return s;
}

// ---------------------------------------------------------------------------
// Assignments and evaluation

/// Total assignment over variables 1..n.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(Var n, bool fill = false) : values_(n, fill) {}
  explicit Assignment(std::vector<bool> values) : values_(std::move(values)) {}

  Var size() const { return static_cast<Var>(values_.size()); }
  bool operator[](Var v) const { return values_.at(v - 1); }
  void set(Var v, bool value) { values_.at(v - 1) = value; }

  friend bool operator==(const Assignment&, const Assignment&) = default;

 private:
  std::vector<bool> values_;
};

inline bool evaluate(const Clause& c, const Assignment& a) {
  return std::any_of(c.begin(), c.end(), [&](const Literal& l) { return l.satisfied_by(a[l.var]); });
}

inline bool evaluate(const Cnf& f, const Assignment& a) {
  if (a.size() < f.num_vars) throw std::invalid_argument("assignment does not cover all variables");
  return std::all_of(f.clauses.begin(), f.clauses.end(), [&](const Clause& c) { return evaluate(c, a); });
}

// ---------------------------------------------------------------------------
// Truth tables
//
// Canonical row order: the clause's variables in ascending order form a
// binary number, false = 0, the last variable least significant.

/// Value of the p-th clause variable in row `row` of a k-literal clause.
constexpr bool row_value(std::size_t k, std::size_t row, std::size_t p) {
  return ((row >> (k - 1 - p)) & 1u) != 0;
}

/// The unique row on which the clause evaluates to false.
inline std::size_t falsifying_row(const Clause& c) {
  std::size_t row = 0;
  for (std::size_t p = 0; p < c.size(); ++p)
    if (c[p].negated) row |= std::size_t{1} << (c.size() - 1 - p);
  return row;
}

/// Canonical row index of the restriction of `a` to the clause's variables.
inline std::size_t row_of(const Clause& c, const Assignment& a) {
  std::size_t row = 0;
  for (std::size_t p = 0; p < c.size(); ++p)
    if (a[c[p].var]) row |= std::size_t{1} << (c.size() - 1 - p);
  return row;
}

struct TruthTable {
  struct Row {
    std::vector<bool> values;  // parallel to clause literals
    bool clause_value = false;
  };

  Clause clause;
  std::vector<Row> rows;
};

inline TruthTable truth_table(const Clause& c) {
  TruthTable t;
  t.clause = c;
  const std::size_t k = c.size();
  const std::size_t falsifying = falsifying_row(c);
  for (std::size_t r = 0; r < c.rows(); ++r) {
    TruthTable::Row row;
    for (std::size_t p = 0; p < k; ++p) row.values.push_back(row_value(k, r, p));
    row.clause_value = r != falsifying;
    t.rows.push_back(std::move(row));
  }
  return t;
}

// ---------------------------------------------------------------------------
// Substitution

struct Contradiction {
  std::size_t clause_index = 0;  // first clause falsified by the substitution
};

using Restriction = std::variant<Cnf, Contradiction>;

/// Substitutes v := value. Satisfied clauses disappear and falsified literals
/// are removed; an emptied clause yields Contradiction. num_vars is kept.
inline Restriction assign_var(const Cnf& f, Var v, bool value) {
  if (v < 1 || v > f.num_vars) throw std::out_of_range("assign_var: variable out of range");
  Cnf out;
  out.num_vars = f.num_vars;
  for (std::size_t i = 0; i < f.clauses.size(); ++i) {
    const Clause& c = f.clauses[i];
    std::vector<Literal> rest;
    bool satisfied = false;
    for (const auto& l : c) {
      if (l.var != v) {
        rest.push_back(l);
      } else if (l.satisfied_by(value)) {
        satisfied = true;
        break;
      }
    }
    if (satisfied) continue;
    if (rest.empty()) return Contradiction{i};
    out.clauses.push_back(Clause::make(std::move(rest)));
  }
  return out;
}

}  // namespace gridsat
