#include "gridsat/compat_matrix.hpp"

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace gridsat {
namespace {

Clause clause(std::vector<long long> lits) { return make_cnf(3, {lits}).clauses.front(); }

TEST(RowsCompatible, SharedVariableMustAgree) {
  TruthTable pos = truth_table(clause({1}));
  TruthTable neg = truth_table(clause({-1}));
  // row 1 of (x1) is x1=T, row 0 of (-x1) is x1=F: both satisfying, x1 differs.
  EXPECT_FALSE(rows_compatible(pos, 1, neg, 0));
}

TEST(RowsCompatible, FalsifyingRowNeverCompatible) {
  TruthTable a = truth_table(clause({1, 2}));
  TruthTable b = truth_table(clause({3}));
  for (std::size_t nu = 0; nu < 2; ++nu) EXPECT_FALSE(rows_compatible(a, 0, b, nu));
  for (std::size_t mu = 0; mu < 4; ++mu) EXPECT_FALSE(rows_compatible(a, mu, b, 0));
}

TEST(RowsCompatible, DisjointVariables) {
  TruthTable a = truth_table(clause({1, 2}));
  TruthTable b = truth_table(clause({-3}));
  for (std::size_t mu = 1; mu < 4; ++mu) EXPECT_TRUE(rows_compatible(a, mu, b, 0));
}

TEST(BuildMatrix, ContradictionHasEmptyOffDiagonalBox) {
  CompatMatrix c = build_matrix(make_cnf(1, {{1}, {-1}}));
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.box(0, 1), CompatBox(2, 2));
  EXPECT_TRUE(c.box(0, 1).empty());
  EXPECT_TRUE(c.box(1, 0).empty());
}

TEST(BuildMatrix, ThreeWideClausesGive24) {
  CompatMatrix c = build_matrix(make_cnf(5, {{1, 2, 3}, {-2, 4, 5}, {1, -4, -5}}));
  EXPECT_EQ(c.total_dimension(), 24u);
}

TEST(BuildMatrix, UnitClauseIsDiag01) {
  CompatMatrix c = build_matrix(make_cnf(1, {{1}}));
  EXPECT_EQ(c.box(0, 0), CompatBox::from_rows({{0, 0}, {0, 1}}));
}

TEST(BuildMatrix, KnownSmallMatrix) {
  // (x1 v x2) & (-x1): only rows (F,T) and (F) meet.
  CompatMatrix c = build_matrix(make_cnf(2, {{1, 2}, {-1}}));
  EXPECT_EQ(serialize(c), "cm 2 4 2\nbox 0 0 0000,0100,0010,0001\nbox 0 1 00,10,00,00\nbox 1 1 10,00\n");
}

TEST(IsBoxEmpty, Examples) {
  EXPECT_TRUE(CompatBox(2, 2).empty());
  EXPECT_FALSE(CompatBox::from_rows({{0, 0}, {0, 1}}).empty());
}

TEST(CheckStructure, FreshMatrixIsClean) {
  CompatMatrix c = build_matrix(make_cnf(3, {{1, 2, 3}, {-1, 2}, {-3}}));
  EXPECT_TRUE(check_structure(c, StructureCheck::built).empty());
}

TEST(CheckStructure, DetectsSymmetryViolation) {
  CompatMatrix c = build_matrix(make_cnf(2, {{1}, {2}}));
  ASSERT_TRUE(c.box(0, 1).test(1, 1));
  c.box(0, 1).set(0, 1);  // no matching (1,0) entry in box(1,0)
  auto v = check_structure(c);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0], (Violation{Violation::Kind::symmetry, 0, 1, 0, 1}));
}

TEST(CheckStructure, DetectsDiagonalViolation) {
  CompatMatrix c = build_matrix(make_cnf(2, {{1, 2}}));
  c.box(0, 0).set(1, 2);
  auto v = check_structure(c);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, Violation::Kind::diagonal_off_entry);
}

TEST(CheckStructure, BuiltModeCountsDiagonalZeros) {
  CompatMatrix c = build_matrix(make_cnf(2, {{1, 2}}));
  c.box(0, 0).clear(1, 1);
  EXPECT_TRUE(check_structure(c, StructureCheck::depleted).empty());
  auto v = check_structure(c, StructureCheck::built);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, Violation::Kind::diagonal_zero_count);
}

TEST(Serialize, RoundTripAndDeterminism) {
  CompatMatrix c = build_matrix(make_cnf(1, {{1}, {-1}}));
  EXPECT_EQ(serialize(c), "cm 2 2 2\nbox 0 0 00,01\nbox 0 1 00,00\nbox 1 1 10,00\n");
  EXPECT_EQ(deserialize(serialize(c)), c);
  EXPECT_EQ(serialize(build_matrix(make_cnf(1, {{1}, {-1}}))), serialize(c));
}

TEST(Serialize, EmptyMatrix) {
  CompatMatrix c = build_matrix(Cnf{});
  EXPECT_EQ(serialize(c), "cm 0\n");
  EXPECT_EQ(deserialize("cm 0\n"), c);
}

TEST(Deserialize, Errors) {
  const std::string good = serialize(build_matrix(make_cnf(1, {{1}, {-1}})));
  EXPECT_THROW(deserialize(good.substr(0, good.size() - 12)), FormatError);
  EXPECT_THROW(deserialize(""), FormatError);
  EXPECT_THROW(deserialize("cm 1 3\nbox 0 0 000,000,000\n"), FormatError);
  EXPECT_THROW(deserialize("cm 1 2\nbox 0 0 00\n"), FormatError);
  EXPECT_THROW(deserialize("cm 1 2\nbox 0 0 00,0x\n"), FormatError);
  EXPECT_THROW(deserialize("cm 1 2\nbox 0 0 00,000\n"), FormatError);
  EXPECT_THROW(deserialize("cm 2 2 2\nbox 0 1 00,00\nbox 0 0 00,01\nbox 1 1 10,00\n"), FormatError);
  EXPECT_THROW(deserialize("mat 1 2\nbox 0 0 00,01\n"), FormatError);
}

TEST(CompatBox, TransposeAndProductBasics) {
  CompatBox a = CompatBox::from_rows({{1, 0, 1, 1}, {0, 1, 0, 0}});
  CompatBox t = a.transpose();
  EXPECT_EQ(t, CompatBox::from_rows({{1, 0}, {0, 1}, {1, 0}, {1, 0}}));
  EXPECT_EQ(t.transpose(), a);
  EXPECT_EQ(a.count(), 4u);
  EXPECT_THROW(CompatBox(3, 2), std::invalid_argument);
}

// Properties over random formulas.

TEST(CompatMatrixProperties, StructureAndSizeBound) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    Cnf f = testing::random_formula(seed, 12, 40);
    CompatMatrix c = build_matrix(f);
    EXPECT_TRUE(check_structure(c, StructureCheck::built).empty()) << "seed " << seed;
    EXPECT_LE(c.total_dimension(), 8 * f.clauses.size());
  }
}

TEST(CompatMatrixProperties, FalsifyingRowsAndColumnsAreZero) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Cnf f = testing::random_formula(seed, 8, 15);
    CompatMatrix c = build_matrix(f);
    for (std::size_t i = 0; i < c.size(); ++i) {
      const std::size_t fr = falsifying_row(f.clauses[i]);
      for (std::size_t j = 0; j < c.size(); ++j) {
        EXPECT_EQ(c.box(i, j).row(fr), 0);
        for (std::size_t mu = 0; mu < c.dims()[j]; ++mu) EXPECT_FALSE(c.box(j, i).test(mu, fr));
      }
    }
  }
}

TEST(CompatMatrixProperties, MatchesAssignmentEnumeration) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Cnf f = testing::random_formula(seed, 10, 20);
    EXPECT_TRUE(testing::same(testing::reference_matrix(f), build_matrix(f))) << "seed " << seed;
  }
}

TEST(CompatMatrixProperties, SerializationRoundTrip) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    CompatMatrix c = build_matrix(testing::random_formula(seed));
    EXPECT_EQ(deserialize(serialize(c)), c);
  }
}

}  // namespace
}  // namespace gridsat
