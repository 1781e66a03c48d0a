#pragma once

// Depletion filters over a compatibility matrix. Each variant only clears
// entries, so every run is a descending chain that stops at a fixpoint (or
// earlier, once some box is entirely false).
//
//   basic       synchronous  C_ij <- AND_k C_ik C_kj
//   async       in place     C_ij <- C_ij AND C_ik C_kj   over a schedule
//   triangular  in place, i < k < j, three coupled updates per triplet
//   square      0/1 integer form, min / floor-of-average rewrite of basic

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gridsat/compat_matrix.hpp"

namespace gridsat {

enum class Variant { basic, async, triangular, square };

inline constexpr Variant kAllVariants[] = {Variant::basic, Variant::async, Variant::triangular, Variant::square};

inline const char* to_string(Variant v) {
  switch (v) {
    case Variant::basic: return "basic";
    case Variant::async: return "async";
    case Variant::triangular: return "triangular";
    case Variant::square: return "square";
  }
  return "?";
}

inline std::optional<Variant> parse_variant(std::string_view s) {
  for (auto v : kAllVariants)
    if (s == to_string(v)) return v;
  return std::nullopt;
}

enum class Decision { unsat, sat_claim };

inline const char* to_string(Decision d) { return d == Decision::unsat ? "UNSAT" : "SAT_CLAIM"; }

struct Triplet {
  std::size_t i = 0;
  std::size_t k = 0;
  std::size_t j = 0;
  friend bool operator==(const Triplet&, const Triplet&) = default;
};

/// Order in which the in-place variants visit index triplets during a sweep.
struct Schedule {
  enum class Kind { all_triplets, upper_triplets, custom };

  Kind kind = Kind::all_triplets;
  std::vector<Triplet> triplets;  // only for Kind::custom

  static Schedule all() { return {Kind::all_triplets, {}}; }
  static Schedule upper() { return {Kind::upper_triplets, {}}; }
  static Schedule custom(std::vector<Triplet> order) { return {Kind::custom, std::move(order)}; }

  /// Calls fn(i, k, j) for every triplet of one sweep, in order. Stops early
  /// when fn returns false; returns false in that case.
  template <typename Fn>
  bool for_each(std::size_t m, Fn&& fn) const {
    switch (kind) {
      case Kind::all_triplets:
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t k = 0; k < m; ++k)
            for (std::size_t j = 0; j < m; ++j)
              if (!fn(i, k, j)) return false;
        return true;
      case Kind::upper_triplets:
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t k = i + 1; k < m; ++k)
            for (std::size_t j = k + 1; j < m; ++j)
              if (!fn(i, k, j)) return false;
        return true;
      case Kind::custom:
        for (const auto& t : triplets) {
          if (t.i >= m || t.k >= m || t.j >= m) throw std::out_of_range("schedule triplet out of range");
          if (!fn(t.i, t.k, t.j)) return false;
        }
        return true;
    }
    return true;
  }
};

struct RunStats {
  std::size_t sweeps = 0;
  std::size_t box_updates = 0;  // entries cleared, counted over both triangles
  bool terminated_early = false;
  std::chrono::nanoseconds wall_time{0};
};

struct EngineVerdict {
  Decision decision = Decision::sat_claim;
  CompatMatrix fixpoint;
  RunStats stats;
  Variant variant = Variant::basic;
};

struct EngineOptions {
  /// Stop as soon as some box is entirely false.
  bool early_exit = true;
  /// Used by async and triangular; triangular requires i < k < j.
  Schedule schedule = Schedule::all();
  /// Called with sweep 0 for the input and after every completed sweep.
  std::function<void(std::size_t sweep, const CompatMatrix&)> on_sweep;
};

/// UNSAT iff some box is entirely false.
inline Decision decide(const CompatMatrix& c) { return c.has_empty_box() ? Decision::unsat : Decision::sat_claim; }

namespace detail {

using Clock = std::chrono::steady_clock;

/// Row mu of A B, given row mu of A.
inline CompatBox::RowBits product_row(CompatBox::RowBits a_row, const CompatBox& b) {
  CompatBox::RowBits acc = 0;
  for (; a_row; a_row = static_cast<CompatBox::RowBits>(a_row & (a_row - 1)))
    acc |= b.row(static_cast<std::size_t>(std::countr_zero(a_row)));
  return acc;
}

/// target <- target AND (A B), mirrored into the transposed box. Returns the
/// number of entries cleared in the whole matrix.
inline std::size_t deplete(CompatMatrix& c, std::size_t i, std::size_t j, const CompatBox& a, const CompatBox& b) {
  CompatBox& target = c.box(i, j);
  bool changed = false;
  std::size_t cleared = 0;
  for (std::size_t mu = 0; mu < target.rows(); ++mu) {
    CompatBox::RowBits cur = target.row(mu);
    if (!cur) continue;
    CompatBox::RowBits next = cur & product_row(a.row(mu), b);
    if (next != cur) {
      cleared += static_cast<std::size_t>(std::popcount(static_cast<CompatBox::RowBits>(cur ^ next)));
      target.set_row(mu, next);
      changed = true;
    }
  }
  if (changed && i != j) {
    c.box(j, i) = target.transpose();
    cleared *= 2;
  }
  return cleared;
}

class Timer {
 public:
  Timer() : start_(Clock::now()) {}
  std::chrono::nanoseconds elapsed() const {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start_);
  }

 private:
  Clock::time_point start_;
};

inline EngineVerdict finish(Variant v, CompatMatrix c, RunStats stats, const Timer& t) {
  stats.wall_time = t.elapsed();
  EngineVerdict out;
  out.decision = decide(c);
  out.fixpoint = std::move(c);
  out.stats = stats;
  out.variant = v;
  return out;
}

inline void notify(const EngineOptions& opts, std::size_t sweep, const CompatMatrix& c) {
  if (opts.on_sweep) opts.on_sweep(sweep, c);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Basic (synchronous)

/// One synchronous step: every box is recomputed from the previous matrix.
inline CompatMatrix step_basic(const CompatMatrix& prev) {
  const std::size_t m = prev.size();
  CompatMatrix next = prev;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      CompatBox out(prev.dims()[i], prev.dims()[j]);
      for (std::size_t mu = 0; mu < out.rows(); ++mu) {
        CompatBox::RowBits acc = out.col_mask();
        for (std::size_t k = 0; k < m && acc; ++k)
          acc &= detail::product_row(prev.box(i, k).row(mu), prev.box(k, j));
        out.set_row(mu, acc);
      }
      next.set_symmetric(i, j, out);
    }
  }
  return next;
}

inline EngineVerdict run_basic(CompatMatrix c, const EngineOptions& opts = {}) {
  detail::Timer timer;
  RunStats stats;
  const std::size_t initial = c.count();
  detail::notify(opts, 0, c);
  if (opts.early_exit && c.has_empty_box()) {
    stats.terminated_early = true;
    return detail::finish(Variant::basic, std::move(c), stats, timer);
  }
  for (;;) {
    CompatMatrix next = step_basic(c);
    ++stats.sweeps;
    const bool changed = !(next == c);
    c = std::move(next);
    detail::notify(opts, stats.sweeps, c);
    if (!changed) break;
    if (opts.early_exit && c.has_empty_box()) {
      stats.terminated_early = true;
      break;
    }
  }
  stats.box_updates = initial - c.count();
  return detail::finish(Variant::basic, std::move(c), stats, timer);
}

// ---------------------------------------------------------------------------
// Asynchronous

/// In-place depletion C_ij <- C_ij AND C_ik C_kj along the schedule, each
/// write mirrored to C_ji, until a sweep clears nothing.
inline EngineVerdict run_async(CompatMatrix c, const EngineOptions& opts = {}) {
  detail::Timer timer;
  RunStats stats;
  const std::size_t m = c.size();
  detail::notify(opts, 0, c);
  if (opts.early_exit && c.has_empty_box()) {
    stats.terminated_early = true;
    return detail::finish(Variant::async, std::move(c), stats, timer);
  }
  for (;;) {
    std::size_t cleared_this_sweep = 0;
    bool emptied = false;
    opts.schedule.for_each(m, [&](std::size_t i, std::size_t k, std::size_t j) {
      // Copies: when k == i or k == j the factor aliases the target box.
      const CompatBox a = c.box(i, k);
      const CompatBox b = c.box(k, j);
      std::size_t cleared = detail::deplete(c, i, j, a, b);
      cleared_this_sweep += cleared;
      if (cleared && opts.early_exit && c.box(i, j).empty()) {
        emptied = true;
        return false;
      }
      return true;
    });
    ++stats.sweeps;
    stats.box_updates += cleared_this_sweep;
    detail::notify(opts, stats.sweeps, c);
    if (emptied) {
      stats.terminated_early = true;
      break;
    }
    if (cleared_this_sweep == 0) break;
  }
  return detail::finish(Variant::async, std::move(c), stats, timer);
}

// ---------------------------------------------------------------------------
// Triangular

/// Visits only triplets i < k < j and applies
///   C_ij <- C_ij AND C_ik C_kj
///   C_ik <- C_ik AND C_ij C_kj^T
///   C_kj <- C_kj AND C_ik^T C_ij
/// with mirrored writes. With fewer than three clauses there is nothing to
/// visit and the input is returned as is.
inline EngineVerdict run_triangular(CompatMatrix c, const EngineOptions& opts = {}) {
  if (opts.schedule.kind == Schedule::Kind::all_triplets)
    throw std::invalid_argument("triangular variant needs an upper (i < k < j) schedule");
  for (const auto& t : opts.schedule.triplets)
    if (!(t.i < t.k && t.k < t.j)) throw std::invalid_argument("triangular schedule triplet must satisfy i < k < j");

  detail::Timer timer;
  RunStats stats;
  const std::size_t m = c.size();
  detail::notify(opts, 0, c);
  if (opts.early_exit && c.has_empty_box()) {
    stats.terminated_early = true;
    return detail::finish(Variant::triangular, std::move(c), stats, timer);
  }
  if (m < 3) return detail::finish(Variant::triangular, std::move(c), stats, timer);

  for (;;) {
    std::size_t cleared_this_sweep = 0;
    bool emptied = false;
    auto apply = [&](std::size_t i, std::size_t j, const CompatBox& a, const CompatBox& b) {
      std::size_t cleared = detail::deplete(c, i, j, a, b);
      cleared_this_sweep += cleared;
      return cleared && opts.early_exit && c.box(i, j).empty();
    };
    opts.schedule.for_each(m, [&](std::size_t i, std::size_t k, std::size_t j) {
      // C_kj^T is stored as C_jk and C_ik^T as C_ki.
      if (apply(i, j, c.box(i, k), c.box(k, j)) || apply(i, k, c.box(i, j), c.box(j, k)) ||
          apply(k, j, c.box(k, i), c.box(i, j))) {
        emptied = true;
        return false;
      }
      return true;
    });
    ++stats.sweeps;
    stats.box_updates += cleared_this_sweep;
    detail::notify(opts, stats.sweeps, c);
    if (emptied) {
      stats.terminated_early = true;
      break;
    }
    if (cleared_this_sweep == 0) break;
  }
  return detail::finish(Variant::triangular, std::move(c), stats, timer);
}

// ---------------------------------------------------------------------------
// Square (0/1 integer form)

/// The compatibility matrix flattened into a (sum 2^k_i)-square matrix of
/// integers. Clause i occupies rows/columns [offset(i), offset(i) + dim(i)).
class ZeroOneMatrix {
 public:
  ZeroOneMatrix() = default;

  explicit ZeroOneMatrix(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
    offsets_.reserve(dims_.size());
    for (auto d : dims_) {
      offsets_.push_back(size_);
      size_ += d;
    }
    data_.assign(size_ * size_, 0);
  }

  std::size_t size() const { return size_; }
  std::size_t clauses() const { return dims_.size(); }
  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t offset(std::size_t i) const { return offsets_[i]; }

  int& at(std::size_t row, std::size_t col) { return data_[row * size_ + col]; }
  int at(std::size_t row, std::size_t col) const { return data_[row * size_ + col]; }

  /// Entry (mu, nu) of box (i, j).
  int& x(std::size_t mu, std::size_t nu, std::size_t i, std::size_t j) { return at(offsets_[i] + mu, offsets_[j] + nu); }
  int x(std::size_t mu, std::size_t nu, std::size_t i, std::size_t j) const {
    return at(offsets_[i] + mu, offsets_[j] + nu);
  }

  friend bool operator==(const ZeroOneMatrix&, const ZeroOneMatrix&) = default;

 private:
  std::vector<std::size_t> dims_;
  std::vector<std::size_t> offsets_;
  std::size_t size_ = 0;
  std::vector<int> data_;
};

inline ZeroOneMatrix to_zero_one(const CompatMatrix& c) {
  ZeroOneMatrix z(c.dims());
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = 0; j < c.size(); ++j) {
      const auto& b = c.box(i, j);
      for (std::size_t mu = 0; mu < b.rows(); ++mu)
        for (std::size_t nu = 0; nu < b.cols(); ++nu) z.x(mu, nu, i, j) = b.test(mu, nu) ? 1 : 0;
    }
  return z;
}

/// Throws std::invalid_argument on any entry other than 0 or 1.
inline CompatMatrix from_zero_one(const ZeroOneMatrix& z) {
  CompatMatrix c(z.dims());
  for (std::size_t i = 0; i < z.clauses(); ++i)
    for (std::size_t j = 0; j < z.clauses(); ++j) {
      auto& b = c.box(i, j);
      for (std::size_t mu = 0; mu < b.rows(); ++mu)
        for (std::size_t nu = 0; nu < b.cols(); ++nu) {
          int v = z.x(mu, nu, i, j);
          if (v != 0 && v != 1) throw std::invalid_argument("0/1 matrix has a non-binary entry");
          if (v) b.set(mu, nu);
        }
    }
  return c;
}

/// floor((1/m) * sum_beta max_alpha x(mu,alpha,i,beta) * x(alpha,nu,beta,j)),
/// clamped to at most 1. Each summand is 0 or 1, so the floor is 1 exactly
/// when all m summands are 1; the sum is abandoned once that is impossible.
inline int square_support(const ZeroOneMatrix& z, std::size_t mu, std::size_t nu, std::size_t i, std::size_t j) {
  const std::size_t m = z.clauses();
  long sum = 0;
  for (std::size_t beta = 0; beta < m; ++beta) {
    int best = 0;
    for (std::size_t alpha = 0; alpha < z.dims()[beta] && best < 1; ++alpha)
      best = std::max(best, z.x(mu, alpha, i, beta) * z.x(alpha, nu, beta, j));
    sum += best;
    if (sum + static_cast<long>(m - beta - 1) < static_cast<long>(m)) return 0;
  }
  return std::min(1L, sum / static_cast<long>(m));
}

/// One synchronous sweep; returns the next matrix. Same value as
/// square_support, evaluated over contiguous rows of `prev` and its transpose.
/// Entries must be 0 or 1.
inline ZeroOneMatrix step_square(const ZeroOneMatrix& prev) {
  ZeroOneMatrix next = prev;
  const std::size_t m = prev.clauses();
  const std::size_t size = prev.size();
  std::vector<std::uint8_t> flat(size * size);
  std::vector<std::uint8_t> trans(size * size);
  for (std::size_t r = 0; r < size; ++r)
    for (std::size_t c = 0; c < size; ++c) {
      flat[r * size + c] = static_cast<std::uint8_t>(prev.at(r, c));
      trans[c * size + r] = static_cast<std::uint8_t>(prev.at(r, c));
    }
  const auto& dims = prev.dims();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t mu = 0; mu < dims[i]; ++mu) {
      const std::uint8_t* left = &flat[(prev.offset(i) + mu) * size];
      for (std::size_t j = 0; j < m; ++j)
        for (std::size_t nu = 0; nu < dims[j]; ++nu) {
          const std::size_t col = prev.offset(j) + nu;
          const int cur = left[col];
          if (cur == 0) continue;
          const std::uint8_t* right = &trans[col * size];
          long sum = 0;
          for (std::size_t beta = 0; beta < m; ++beta) {
            const std::size_t off = prev.offset(beta);
            int best = 0;
            for (std::size_t alpha = 0; alpha < dims[beta] && best < 1; ++alpha)
              best = std::max(best, left[off + alpha] * right[off + alpha]);
            sum += best;
            if (best == 0) break;
          }
          next.x(mu, nu, i, j) = std::min(cur, static_cast<int>(std::min(1L, sum / static_cast<long>(m))));
        }
    }
  return next;
}

inline EngineVerdict run_square(ZeroOneMatrix z, const EngineOptions& opts = {}) {
  detail::Timer timer;
  RunStats stats;
  CompatMatrix view = from_zero_one(z);  // validates binary entries
  const std::size_t initial = view.count();
  detail::notify(opts, 0, view);
  if (opts.early_exit && view.has_empty_box()) {
    stats.terminated_early = true;
    return detail::finish(Variant::square, std::move(view), stats, timer);
  }
  for (;;) {
    ZeroOneMatrix next = step_square(z);
    ++stats.sweeps;
    const bool changed = !(next == z);
    z = std::move(next);
    view = from_zero_one(z);
    detail::notify(opts, stats.sweeps, view);
    if (!changed) break;
    if (opts.early_exit && view.has_empty_box()) {
      stats.terminated_early = true;
      break;
    }
  }
  stats.box_updates = initial - view.count();
  return detail::finish(Variant::square, std::move(view), stats, timer);
}

// ---------------------------------------------------------------------------

/// Runs `v` on `c`. For triangular an all-triplets schedule is replaced by
/// the upper one.
inline EngineVerdict run_variant(Variant v, const CompatMatrix& c, EngineOptions opts = {}) {
  switch (v) {
    case Variant::basic: return run_basic(c, opts);
    case Variant::async: return run_async(c, opts);
    case Variant::triangular:
      if (opts.schedule.kind == Schedule::Kind::all_triplets) opts.schedule = Schedule::upper();
      return run_triangular(c, opts);
    case Variant::square: return run_square(to_zero_one(c), opts);
  }
  throw std::logic_error("unknown variant");
}

}  // namespace gridsat
