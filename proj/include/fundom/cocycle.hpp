#pragma once

// The continuous cocycle phi = sum_n phi_n over the rotation by alpha.
// Level n places tent bumps of height (3/4)^n on the 2^(n+1) translates
// R^j N, j = -2^n .. 2^n - 1, of a neighbourhood N of the Cantor set, with
// sign - for j >= 0 and + for j < 0, so that every point of C loses
// |i| (3/4)^n along its first |i| <= 2^n steps in either direction.

#include "fundom/cantor.hpp"
#include "fundom/diophantine.hpp"
#include "fundom/numerics.hpp"

#include <gmpxx.h>

#include <memory>
#include <span>
#include <vector>

namespace fundom {

struct LevelGeometry {
  std::size_t depth = 0;  // d(n): cover depth whose translates separate
  BigFloat epsilon;       // ramp width, exact dyadic
  BigFloat gap;           // certified separation of the translates
};

// d(n) is the minimal separating depth for range 2^n; epsilon is gap/3
// rounded down, so 2 epsilon stays strictly below the gap.
LevelGeometry choose_epsilon(std::size_t level, const DigitSequence& seq, const Alpha& alpha, std::size_t d_max,
                             std::span<const Prec> ladder = kDefaultLadder);

class BumpLevel {
 public:
  BumpLevel(std::size_t level, const DigitSequence& seq, LevelGeometry geometry);

  std::size_t level() const { return level_; }
  long translate_count() const { return 1L << level_; }  // 2^n translates on each side
  const mpq_class& amplitude() const { return amplitude_; }
  const LevelGeometry& geometry() const { return geometry_; }
  const CantorCover& cover() const { return *cover_; }

  // Tent profile f(y) = (3/4)^n max(0, 1 - dist(y, cover)/epsilon).
  Interval profile(const CirclePoint& y) const;

 private:
  std::size_t level_;
  mpq_class amplitude_;
  LevelGeometry geometry_;
  std::shared_ptr<const CantorCover> cover_;
};

// phi_n(x) = -f(R^-j x) on R^j N for 0 <= j < 2^n, +f(R^-j x) on R^j N for
// -2^n <= j < 0, zero elsewhere.
Interval bump_value(const BumpLevel& level, const Interval& alpha, const CirclePoint& x);

class CocycleStack {
 public:
  CocycleStack(Alpha alpha, DigitSequence seq, std::vector<BumpLevel> levels, Prec prec = kDefaultPrec);

  // Builds levels 1..n_max with choose_epsilon.
  static CocycleStack build(const Alpha& alpha, const DigitSequence& seq, std::size_t n_max, std::size_t d_max,
                            std::span<const Prec> ladder = kDefaultLadder);

  const Alpha& alpha() const { return alpha_; }
  const Interval& alpha_interval() const { return alpha_iv_; }
  const DigitSequence& sequence() const { return seq_; }
  const std::vector<BumpLevel>& levels() const { return levels_; }
  std::size_t n_max() const { return levels_.size(); }
  Prec prec() const { return prec_; }

  // sum_{n > n_max} (3/4)^n = 3 (3/4)^n_max, exact.
  mpq_class tail_bound() const;

  // R^k x.
  CirclePoint rotate(const CirclePoint& x, long k) const;

 private:
  Alpha alpha_;
  DigitSequence seq_;
  std::vector<BumpLevel> levels_;
  Prec prec_;
  Interval alpha_iv_;
};

// Sum of the built levels at x.
Interval phi_truncated(const CocycleStack& stack, const CirclePoint& x);
// Enclosure of the full phi: built levels plus/minus tail_bound.
Interval phi(const CocycleStack& stack, const CirclePoint& x);

struct BirkhoffValue {
  Interval value;           // Birkhoff sum of the built levels
  mpq_class truncation;     // |m| tail_bound: two-sided error against the full phi
};

// phi^(m)(x): sum_{i<m} phi(R^i x) for m > 0, -sum_{1<=i<=-m} phi(R^-i x)
// for m < 0, and 0 for m = 0.
BirkhoffValue birkhoff(const CocycleStack& stack, const CirclePoint& x, long m);
// Same sum for a single level.
Interval birkhoff_level(const CocycleStack& stack, std::size_t level, const CirclePoint& x, long m);

// All Birkhoff sums phi^(i)(x), i = -radius..radius (index i + radius),
// accumulated incrementally.
std::vector<Interval> birkhoff_range(const CocycleStack& stack, const CirclePoint& x, long radius);

// M = 1 + sum_{n>=0} 2^(n+1) exp(-(3/4)(3/2)^n).
Interval bound_M(Prec prec = kDefaultPrec);

// Bounds on sum_{|i| > radius} exp(phi^(i)(x)) for x in C.
// The block bound uses, for 2^n <= |i| < 2^(n+1), only the level n+1
// estimate exp(-(3/4)(3/2)^n). The all-level bound adds every level m with
// 2^m >= |i|: phi^(i)(x) <= -4 |i| (3/4)^m0, m0 = ceil(log2 |i|).
Interval block_tail_bound(long radius, Prec prec = kDefaultPrec);
Interval all_level_tail_bound(long radius, Prec prec = kDefaultPrec);

}  // namespace fundom
