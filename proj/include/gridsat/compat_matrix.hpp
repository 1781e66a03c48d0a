#pragma once

// Compatibility boxes and the block compatibility matrix of a formula.
//
// Box C_ij has one row per truth-table row of clause i and one column per row
// of clause j. Entry (mu, nu) is set iff both rows satisfy their clauses and
// agree on every shared variable. Falsifying rows are kept (as all-zero
// rows/columns) so every box has the full 2^k x 2^k shape.

#include <array>
#include <bit>
#include <cstdint>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gridsat/cnf.hpp"

namespace gridsat {

/// Dense bit matrix of at most 8x8. Row mu is packed into one byte, bit nu
/// set for column nu. Bits outside rows() x cols() are always zero.
class CompatBox {
 public:
  using RowBits = std::uint8_t;

  CompatBox() = default;
  CompatBox(std::size_t rows, std::size_t cols) : rows_(check_dim(rows)), cols_(check_dim(cols)) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  bool test(std::size_t mu, std::size_t nu) const { return (bits_[mu] >> nu) & 1u; }
  void set(std::size_t mu, std::size_t nu) { bits_[mu] = static_cast<RowBits>(bits_[mu] | (1u << nu)); }
  void clear(std::size_t mu, std::size_t nu) { bits_[mu] = static_cast<RowBits>(bits_[mu] & ~(1u << nu)); }

  RowBits row(std::size_t mu) const { return bits_[mu]; }
  void set_row(std::size_t mu, RowBits bits) { bits_[mu] = static_cast<RowBits>(bits & col_mask()); }

  /// Mask of the used column bits.
  RowBits col_mask() const { return static_cast<RowBits>((1u << cols_) - 1u); }

  bool empty() const {
    for (std::size_t mu = 0; mu < rows_; ++mu)
      if (bits_[mu]) return false;
    return true;
  }

  std::size_t count() const {
    std::size_t n = 0;
    for (std::size_t mu = 0; mu < rows_; ++mu) n += static_cast<std::size_t>(std::popcount(bits_[mu]));
    return n;
  }

  std::size_t entries() const { return rows_ * cols_; }

  CompatBox transpose() const {
    CompatBox t(cols_, rows_);
    for (std::size_t mu = 0; mu < rows_; ++mu)
      for (RowBits r = bits_[mu]; r; r = static_cast<RowBits>(r & (r - 1)))
        t.set(static_cast<std::size_t>(std::countr_zero(r)), mu);
    return t;
  }

  /// Entrywise AND; returns the number of bits cleared.
  std::size_t and_assign(const CompatBox& other) {
    if (other.rows_ != rows_ || other.cols_ != cols_) throw std::invalid_argument("box dimension mismatch");
    std::size_t cleared = 0;
    for (std::size_t mu = 0; mu < rows_; ++mu) {
      RowBits next = bits_[mu] & other.bits_[mu];
      cleared += static_cast<std::size_t>(std::popcount(static_cast<RowBits>(bits_[mu] ^ next)));
      bits_[mu] = next;
    }
    return cleared;
  }

  /// Entrywise A <= B.
  bool subset_of(const CompatBox& other) const {
    for (std::size_t mu = 0; mu < rows_; ++mu)
      if (bits_[mu] & ~other.bits_[mu]) return false;
    return true;
  }

  friend bool operator==(const CompatBox&, const CompatBox&) = default;

  static CompatBox identity(std::size_t n) {
    CompatBox b(n, n);
    for (std::size_t mu = 0; mu < n; ++mu) b.set(mu, mu);
    return b;
  }

  /// Builds a box from row-major 0/1 values.
  static CompatBox from_rows(const std::vector<std::vector<int>>& rows) {
    if (rows.empty()) throw std::invalid_argument("box needs at least one row");
    CompatBox b(rows.size(), rows.front().size());
    for (std::size_t mu = 0; mu < rows.size(); ++mu) {
      if (rows[mu].size() != b.cols_) throw std::invalid_argument("ragged box rows");
      for (std::size_t nu = 0; nu < b.cols_; ++nu) {
        if (rows[mu][nu] != 0 && rows[mu][nu] != 1) throw std::invalid_argument("box entries must be 0/1");
        if (rows[mu][nu]) b.set(mu, nu);
      }
    }
    return b;
  }

 private:
  static std::uint8_t check_dim(std::size_t d) {
    if (d != 1 && d != 2 && d != 4 && d != 8) throw std::invalid_argument("box dimension must be 1, 2, 4 or 8");
    return static_cast<std::uint8_t>(d);
  }

  std::uint8_t rows_ = 1;
  std::uint8_t cols_ = 1;
  std::array<RowBits, 8> bits_{};
};

/// Boolean matrix product: (AB)(mu, nu) = OR_alpha A(mu, alpha) AND B(alpha, nu).
inline CompatBox bool_product(const CompatBox& a, const CompatBox& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("bool_product: inner dimensions differ");
  CompatBox out(a.rows(), b.cols());
  for (std::size_t mu = 0; mu < a.rows(); ++mu) {
    CompatBox::RowBits acc = 0;
    for (CompatBox::RowBits r = a.row(mu); r; r = static_cast<CompatBox::RowBits>(r & (r - 1)))
      acc |= b.row(static_cast<std::size_t>(std::countr_zero(r)));
    out.set_row(mu, acc);
  }
  return out;
}

/// One row index per clause.
struct Grid {
  std::vector<std::size_t> row_choice;
  friend bool operator==(const Grid&, const Grid&) = default;
  friend auto operator<=>(const Grid&, const Grid&) = default;
};

/// m x m block matrix of compatibility boxes, stored row-major.
class CompatMatrix {
 public:
  CompatMatrix() = default;

  /// All-zero matrix with the given per-clause dimensions.
  explicit CompatMatrix(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
    boxes_.reserve(dims_.size() * dims_.size());
    for (std::size_t i = 0; i < dims_.size(); ++i)
      for (std::size_t j = 0; j < dims_.size(); ++j) boxes_.emplace_back(dims_[i], dims_[j]);
  }

  std::size_t size() const { return dims_.size(); }
  const std::vector<std::size_t>& dims() const { return dims_; }

  CompatBox& box(std::size_t i, std::size_t j) { return boxes_[i * dims_.size() + j]; }
  const CompatBox& box(std::size_t i, std::size_t j) const { return boxes_[i * dims_.size() + j]; }

  /// Writes `b` to C_ij and its transpose to C_ji.
  void set_symmetric(std::size_t i, std::size_t j, const CompatBox& b) {
    box(i, j) = b;
    if (i != j) box(j, i) = b.transpose();
  }

  /// Side length of the flattened 0/1 matrix, sum of 2^k_i.
  std::size_t total_dimension() const {
    std::size_t d = 0;
    for (auto x : dims_) d += x;
    return d;
  }

  std::size_t total_entries() const {
    std::size_t d = total_dimension();
    return d * d;
  }

  std::size_t count() const {
    std::size_t n = 0;
    for (const auto& b : boxes_) n += b.count();
    return n;
  }

  bool has_empty_box() const {
    for (const auto& b : boxes_)
      if (b.empty()) return true;
    return false;
  }

  /// Entrywise C <= other.
  bool subset_of(const CompatMatrix& other) const {
    if (dims_ != other.dims_) return false;
    for (std::size_t x = 0; x < boxes_.size(); ++x)
      if (!boxes_[x].subset_of(other.boxes_[x])) return false;
    return true;
  }

  friend bool operator==(const CompatMatrix&, const CompatMatrix&) = default;

 private:
  std::vector<std::size_t> dims_;
  std::vector<CompatBox> boxes_;
};

// ---------------------------------------------------------------------------
// Construction

/// Both rows satisfy their clauses and agree on every shared variable.
inline bool rows_compatible(const TruthTable& ti, std::size_t mu, const TruthTable& tj, std::size_t nu) {
  const auto& ri = ti.rows.at(mu);
  const auto& rj = tj.rows.at(nu);
  if (!ri.clause_value || !rj.clause_value) return false;
  for (std::size_t p = 0; p < ti.clause.size(); ++p)
    for (std::size_t q = 0; q < tj.clause.size(); ++q)
      if (ti.clause[p].var == tj.clause[q].var && ri.values[p] != rj.values[q]) return false;
  return true;
}

inline CompatMatrix build_matrix(const Cnf& f) {
  std::vector<std::size_t> dims;
  std::vector<TruthTable> tables;
  for (const auto& c : f.clauses) {
    dims.push_back(c.rows());
    tables.push_back(truth_table(c));
  }
  CompatMatrix cm(dims);
  const std::size_t m = dims.size();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      CompatBox b(dims[i], dims[j]);
      for (std::size_t mu = 0; mu < dims[i]; ++mu)
        for (std::size_t nu = 0; nu < dims[j]; ++nu)
          if (rows_compatible(tables[i], mu, tables[j], nu)) b.set(mu, nu);
      cm.set_symmetric(i, j, b);
    }
  }
  return cm;
}

// ---------------------------------------------------------------------------
// Structural checks

struct Violation {
  enum class Kind { symmetry, diagonal_off_entry, diagonal_zero_count };
  Kind kind;
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t mu = 0;
  std::size_t nu = 0;

  friend bool operator==(const Violation&, const Violation&) = default;
};

inline const char* to_string(Violation::Kind k) {
  switch (k) {
    case Violation::Kind::symmetry: return "symmetry";
    case Violation::Kind::diagonal_off_entry: return "diagonal_off_entry";
    case Violation::Kind::diagonal_zero_count: return "diagonal_zero_count";
  }
  return "?";
}

/// `depleted` checks symmetry and diagonality of the C_ii boxes. `built`
/// additionally requires exactly one zero on each C_ii diagonal, which only
/// holds before depletion.
enum class StructureCheck { depleted, built };

inline std::vector<Violation> check_structure(const CompatMatrix& c,
                                              StructureCheck mode = StructureCheck::depleted) {
  std::vector<Violation> out;
  const std::size_t m = c.size();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const auto& a = c.box(i, j);
      const auto& b = c.box(j, i);
      for (std::size_t mu = 0; mu < a.rows(); ++mu)
        for (std::size_t nu = 0; nu < a.cols(); ++nu)
          if (a.test(mu, nu) != b.test(nu, mu)) out.push_back({Violation::Kind::symmetry, i, j, mu, nu});
    }
    const auto& d = c.box(i, i);
    std::size_t zeros = 0;
    for (std::size_t mu = 0; mu < d.rows(); ++mu) {
      for (std::size_t nu = 0; nu < d.cols(); ++nu) {
        if (mu == nu) {
          zeros += d.test(mu, mu) ? 0 : 1;
        } else if (d.test(mu, nu)) {
          out.push_back({Violation::Kind::diagonal_off_entry, i, i, mu, nu});
        }
      }
    }
    if (mode == StructureCheck::built && zeros != 1)
      out.push_back({Violation::Kind::diagonal_zero_count, i, i, zeros, 0});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Grids

inline bool is_solution_grid(const CompatMatrix& c, const Grid& g) {
  const std::size_t m = c.size();
  if (g.row_choice.size() != m) throw std::invalid_argument("grid size does not match matrix");
  for (std::size_t i = 0; i < m; ++i)
    if (g.row_choice[i] >= c.dims()[i]) throw std::invalid_argument("grid row index out of range");
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (!c.box(i, j).test(g.row_choice[i], g.row_choice[j])) return false;
  return true;
}

/// Number of set entries of C that a grid selects but that are cleared.
inline std::size_t cleared_grid_entries(const CompatMatrix& c, const Grid& g) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = 0; j < c.size(); ++j)
      if (!c.box(i, j).test(g.row_choice[i], g.row_choice[j])) ++n;
  return n;
}

// ---------------------------------------------------------------------------
// Text serialization
//
//   cm <m> <dim_0> ... <dim_{m-1}>
//   box <i> <j> <row_0>,<row_1>,...        for every 0 <= i <= j < m
//
// Box indices are 0-based; each row is a string of '0'/'1', column 0 first.

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string serialize(const CompatMatrix& c) {
  std::string s = "cm " + std::to_string(c.size());
  for (auto d : c.dims()) s += " " + std::to_string(d);
  s += "\n";
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = i; j < c.size(); ++j) {
      const auto& b = c.box(i, j);
      s += "box " + std::to_string(i) + " " + std::to_string(j) + " ";
      for (std::size_t mu = 0; mu < b.rows(); ++mu) {
        if (mu) s += ',';
        for (std::size_t nu = 0; nu < b.cols(); ++nu) s += b.test(mu, nu) ? '1' : '0';
      }
      s += "\n";
    }
  }
  return s;
}

inline CompatMatrix deserialize(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("missing 'cm' header");
  std::istringstream hs(line);
  std::string tag;
  std::size_t m = 0;
  if (!(hs >> tag >> m) || tag != "cm") throw FormatError("malformed 'cm' header");
  std::vector<std::size_t> dims(m);
  for (auto& d : dims) {
    if (!(hs >> d) || (d != 1 && d != 2 && d != 4 && d != 8)) throw FormatError("bad clause dimension in header");
  }
  if (hs >> tag) throw FormatError("trailing tokens in header");
  CompatMatrix c(dims);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      if (!std::getline(in, line)) throw FormatError("truncated input: missing box line");
      std::istringstream ls(line);
      std::size_t bi = 0, bj = 0;
      std::string rows, rest;
      if (!(ls >> tag >> bi >> bj >> rows) || tag != "box" || (ls >> rest))
        throw FormatError("malformed box line: " + line);
      if (bi != i || bj != j) throw FormatError("box lines out of canonical order at " + line);
      CompatBox b(dims[i], dims[j]);
      std::size_t mu = 0, nu = 0;
      for (char ch : rows) {
        if (ch == ',') {
          if (nu != dims[j]) throw FormatError("row width mismatch in " + line);
          ++mu;
          nu = 0;
          continue;
        }
        if ((ch != '0' && ch != '1') || mu >= dims[i] || nu >= dims[j])
          throw FormatError("bad row data in " + line);
        if (ch == '1') b.set(mu, nu);
        ++nu;
      }
      if (mu + 1 != dims[i] || nu != dims[j]) throw FormatError("box shape mismatch in " + line);
      c.set_symmetric(i, j, b);
    }
  }
  return c;
}

inline CompatMatrix deserialize(const std::string& text) {
  std::istringstream in(text);
  return deserialize(in);
}

}  // namespace gridsat
