#include "gridsat/cnf.hpp"

#include <gtest/gtest.h>

#include "gridsat/oracle.hpp"
#include "test_support.hpp"

namespace gridsat {
namespace {

Clause clause(std::vector<long long> lits) {
  std::vector<Literal> out;
  for (auto x : lits) out.push_back(Literal::from_dimacs(x));
  return Clause::make(normalize_literals(out).literals);
}

TEST(ParseDimacs, BasicFormula) {
  auto parsed = parse_dimacs("p cnf 2 2\n1 2 0\n-1 0\n");
  EXPECT_TRUE(parsed.warnings.empty());
  EXPECT_EQ(parsed.cnf, make_cnf(2, {{1, 2}, {-1}}));
  EXPECT_EQ(parsed.cnf.clauses[1][0], (Literal{1, true}));
}

TEST(ParseDimacs, CommentsAreSkipped) {
  auto parsed = parse_dimacs("c note\np cnf 1 1\n1 0\n");
  EXPECT_EQ(parsed.cnf, make_cnf(1, {{1}}));
}

TEST(ParseDimacs, TautologyDroppedWithWarning) {
  auto parsed = parse_dimacs("p cnf 2 1\n1 -1 2 0\n");
  EXPECT_EQ(parsed.cnf.num_vars, 2u);
  EXPECT_TRUE(parsed.cnf.clauses.empty());
  ASSERT_EQ(parsed.warnings.size(), 1u);
  EXPECT_NE(parsed.warnings[0].find("tautolog"), std::string::npos);
}

TEST(ParseDimacs, DuplicateLiteralsCollapse) {
  auto parsed = parse_dimacs("p cnf 3 1\n3 1 3 1 -2 0\n");
  ASSERT_EQ(parsed.cnf.clauses.size(), 1u);
  EXPECT_EQ(parsed.cnf.clauses[0], clause({1, -2, 3}));
}

TEST(ParseDimacs, ClausesMaySpanLines) {
  auto parsed = parse_dimacs("p cnf 3 2\n1 2\n3 0 -1\n0\n");
  EXPECT_EQ(parsed.cnf, make_cnf(3, {{1, 2, 3}, {-1}}));
}

TEST(ParseDimacs, Errors) {
  EXPECT_THROW(parse_dimacs("p cnf x 1\n1 0\n"), ParseError);
  EXPECT_THROW(parse_dimacs("p dnf 1 1\n1 0\n"), ParseError);
  EXPECT_THROW(parse_dimacs("1 0\n"), ParseError);
  EXPECT_THROW(parse_dimacs(""), ParseError);
  EXPECT_THROW(parse_dimacs("p cnf 2 1\n3 0\n"), ParseError);
  EXPECT_THROW(parse_dimacs("p cnf 4 1\n1 2 3 4 0\n"), ParseError);
  EXPECT_THROW(parse_dimacs("p cnf 2 1\n1 2\n"), ParseError);
  EXPECT_THROW(parse_dimacs("p cnf 2 1\n1 z 0\n"), ParseError);
}

TEST(ParseDimacs, EmptyClauseIsTriviallyUnsat) {
  EXPECT_THROW(parse_dimacs("p cnf 2 2\n1 2 0\n0\n"), TriviallyUnsatError);
}

TEST(ParseDimacs, SatlibTrailerEndsInput) {
  auto parsed = parse_dimacs("p cnf 1 1\n1 0\n%\n0\n");
  EXPECT_EQ(parsed.cnf.clauses.size(), 1u);
}

TEST(ParseDimacs, ClauseCountMismatchWarns) {
  auto parsed = parse_dimacs("p cnf 1 3\n1 0\n");
  EXPECT_EQ(parsed.warnings.size(), 1u);
}

TEST(Clause, RejectsBadLiteralLists) {
  EXPECT_THROW(Clause::make({}), std::invalid_argument);
  EXPECT_THROW(Clause::make({{2, false}, {1, false}}), std::invalid_argument);
  EXPECT_THROW(Clause::make({{1, false}, {1, true}}), std::invalid_argument);
  EXPECT_THROW(Clause::make({{1, false}, {2, false}, {3, false}, {4, false}}), std::invalid_argument);
}

TEST(Evaluate, Examples) {
  Cnf contradiction = make_cnf(1, {{1}, {-1}});
  EXPECT_FALSE(evaluate(contradiction, Assignment(std::vector<bool>{false})));
  EXPECT_FALSE(evaluate(contradiction, Assignment(std::vector<bool>{true})));

  Cnf f = make_cnf(2, {{1, 2}});
  EXPECT_TRUE(evaluate(f, Assignment(std::vector<bool>{false, true})));

  Cnf g = make_cnf(2, {{1, 2}, {-1}});
  int satisfied = 0;
  for (std::uint64_t code = 0; code < 4; ++code) {
    Assignment a = assignment_from_code(2, code);
    if (evaluate(g, a)) {
      ++satisfied;
      EXPECT_FALSE(a[1]);
      EXPECT_TRUE(a[2]);
    }
  }
  EXPECT_EQ(satisfied, 1);
}

TEST(Evaluate, ShortAssignmentThrows) {
  EXPECT_THROW(evaluate(make_cnf(2, {{1, 2}}), Assignment(1)), std::invalid_argument);
}

TEST(TruthTable, UnitClause) {
  TruthTable t = truth_table(clause({-1}));
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0].values, std::vector<bool>{false});
  EXPECT_TRUE(t.rows[0].clause_value);
  EXPECT_EQ(t.rows[1].values, std::vector<bool>{true});
  EXPECT_FALSE(t.rows[1].clause_value);
}

TEST(TruthTable, BinaryClauseCanonicalOrder) {
  TruthTable t = truth_table(clause({1, 2}));
  ASSERT_EQ(t.rows.size(), 4u);
  const std::vector<std::vector<bool>> values{{false, false}, {false, true}, {true, false}, {true, true}};
  const std::vector<bool> expect{false, true, true, true};
  for (std::size_t r = 0; r < 4; ++r) {
    EXPECT_EQ(t.rows[r].values, values[r]);
    EXPECT_EQ(t.rows[r].clause_value, expect[r]);
  }
}

TEST(TruthTable, EveryClauseHasExactlyOneFalseRow) {
  for (int mask = 0; mask < 8; ++mask) {
    for (std::size_t k = 1; k <= 3; ++k) {
      std::vector<long long> lits;
      for (std::size_t p = 0; p < k; ++p) lits.push_back((mask >> p) & 1 ? -(long long)(p + 1) : (long long)(p + 1));
      TruthTable t = truth_table(clause(lits));
      ASSERT_EQ(t.rows.size(), std::size_t{1} << k);
      std::size_t falses = 0;
      for (std::size_t r = 0; r < t.rows.size(); ++r) {
        if (!t.rows[r].clause_value) {
          ++falses;
          EXPECT_EQ(r, falsifying_row(t.clause));
        }
      }
      EXPECT_EQ(falses, 1u);
      if (k == 3) {
        EXPECT_EQ(t.rows.size() - falses, 7u);
      }
    }
  }
}

TEST(AssignVar, Examples) {
  Cnf f = make_cnf(2, {{1, 2}, {-1}});
  Restriction r = assign_var(f, 1, false);
  ASSERT_TRUE(std::holds_alternative<Cnf>(r));
  EXPECT_EQ(std::get<Cnf>(r), make_cnf(2, {{2}}));

  Restriction c = assign_var(make_cnf(1, {{1}}), 1, false);
  EXPECT_TRUE(std::holds_alternative<Contradiction>(c));

  Restriction s = assign_var(make_cnf(3, {{1, 2, 3}}), 2, false);
  ASSERT_TRUE(std::holds_alternative<Cnf>(s));
  EXPECT_EQ(std::get<Cnf>(s), make_cnf(3, {{1, 3}}));

  EXPECT_THROW(assign_var(f, 3, true), std::out_of_range);
}

// Property checks over seeded random formulas.

TEST(CnfProperties, NormalizationIsIdempotent) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Cnf f = testing::random_formula(seed);
    EXPECT_EQ(normalize(f), f);
    EXPECT_EQ(normalize(normalize(f)), normalize(f));
  }
}

TEST(CnfProperties, EvaluateMatchesTruthTableRows) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Cnf f = testing::random_formula(seed, 8, 12);
    for (std::uint64_t code = 0; code < (std::uint64_t{1} << f.num_vars); ++code) {
      Assignment a = assignment_from_code(f.num_vars, code);
      bool via_tables = true;
      for (const auto& c : f.clauses) via_tables = via_tables && truth_table(c).rows[row_of(c, a)].clause_value;
      ASSERT_EQ(evaluate(f, a), via_tables) << "seed " << seed;
    }
  }
}

TEST(CnfProperties, AssignVarPreservesModels) {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    Cnf f = testing::random_formula(seed, 10, 20);
    for (Var v = 1; v <= f.num_vars; ++v) {
      for (bool value : {false, true}) {
        Restriction r = assign_var(f, v, value);
        for (std::uint64_t code = 0; code < (std::uint64_t{1} << f.num_vars); ++code) {
          Assignment a = assignment_from_code(f.num_vars, code);
          if (a[v] != value) continue;
          const bool original = evaluate(f, a);
          const bool restricted = std::holds_alternative<Cnf>(r) && evaluate(std::get<Cnf>(r), a);
          ASSERT_EQ(original, restricted) << "seed " << seed << " v " << v;
        }
      }
    }
  }
}

TEST(CnfProperties, DimacsRoundTrip) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Cnf f = testing::random_formula(seed);
    EXPECT_EQ(parse_dimacs(to_dimacs(f)).cnf, f);
  }
}

}  // namespace
}  // namespace gridsat
