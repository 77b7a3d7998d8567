#pragma once

// The Cantor set C = { sum eps_n / q_n : eps_n in {0,1} } at finite depth:
// digit sequences, cylinder covers, the fair-coin measure mu0, and
// certification that rotated copies of C are pairwise disjoint.

#include "fundom/diophantine.hpp"
#include "fundom/numerics.hpp"

#include <gmpxx.h>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fundom {

enum class SequenceProvenance { golden_fast_path, general_construction };

std::string_view to_string(SequenceProvenance p);

struct DigitSequence {
  std::vector<mpz_class> q;  // q_0 = 1, q_1, ..., q_N
  SequenceProvenance provenance = SequenceProvenance::general_construction;

  std::size_t size() const { return q.size(); }
  std::size_t last_index() const { return q.size() - 1; }
};

// q_k = 2^(3^k) for k >= 1.
DigitSequence golden_digit_sequence(std::size_t n_terms);

// q_{n+1} is the smallest multiple of q_n with q_{n+1} >= 3 q_n and
// q_{n+1} >= 2^n p(q_n).
DigitSequence build_digit_sequence(const ApproximationProfile& profile, std::size_t n_terms);

struct DigitConditionCheck {
  bool q0_is_one = false;
  bool divisibility = false;
  bool ratio_third = false;
  bool approximation = false;  // p(q_n) / q_{n+1} <= 2^-n
  std::size_t first_failure = 0;  // index n of the first failing step, or size
  bool all() const { return q0_is_one && divisibility && ratio_third && approximation; }
};

// Exact integer check of the four growth conditions on every computed step.
DigitConditionCheck check_digit_conditions(const DigitSequence& seq, const ApproximationProfile& profile);

// Enclosure of sum_{n > d} 1/q_n. Terms past the stored sequence are bounded
// by 1/(2 q_N), which holds whenever the continuation keeps q_{n+1} >= 3 q_n.
struct TailBound {
  mpq_class lo, hi;
  Interval interval(Prec prec) const { return Interval::hull(lo, hi, prec); }
};
TailBound tail(const DigitSequence& seq, std::size_t d);

using CylinderCode = std::vector<std::uint8_t>;  // eps_1..eps_d, each 0 or 1

// Cylinder index k <-> code, eps_1 is the most significant bit.
CylinderCode code_of(std::uint64_t k, std::size_t depth);

class CantorCover {
 public:
  CantorCover(const DigitSequence& seq, std::size_t depth);

  std::size_t depth() const { return depth_; }
  std::size_t size() const { return lefts_.size(); }
  const mpq_class& left(std::size_t k) const { return lefts_[k]; }
  const std::vector<mpq_class>& lefts() const { return lefts_; }
  const TailBound& arc_length() const { return tail_; }
  mpq_class mass_per_cylinder() const;

  CircleArc arc(std::size_t k, Prec prec) const;
  // Right end of the whole cover.
  mpq_class right_end() const { return lefts_.back() + tail_.hi; }

  // Circle distance from p to the union of the cover arcs.
  Interval dist(const CirclePoint& p) const;

 private:
  std::size_t depth_;
  std::vector<mpq_class> lefts_;  // sorted, exact
  TailBound tail_;
  std::vector<Interval> left_cache_;  // lefts at kDefaultPrec
  Interval length_cache_;
};

inline CantorCover cover(const DigitSequence& seq, std::size_t d) { return CantorCover(seq, d); }

// Enclosure of the point of C whose code starts with `code`, using the first d digits.
CirclePoint point_from_code(const DigitSequence& seq, std::span<const std::uint8_t> code, std::size_t d, Prec prec);
// Exact partial sum sum_{n <= len} digits_n / q_n, digits in {-1, 0, 1}.
mpq_class partial_sum(const DigitSequence& seq, std::span<const int> digits);

// mu0[0, x] for the fair-coin law, with error at most one cylinder mass.
Interval mu0_cdf(const DigitSequence& seq, const CirclePoint& x, std::size_t d);

// ------------------------------------------------------- disjointness ----

struct TranslateSeparation {
  std::size_t depth = 0;
  Prec prec = 0;
  BigFloat gap;  // certified lower bound on the distance between distinct translates
};

// Searches depth 0..d_max for one where the translates R^j cover(d),
// j in [j_min, j_max], are pairwise disjoint; certifies the smallest gap
// between distinct translates. Throws DisjointnessUndecided when exhausted.
TranslateSeparation separate_translates(const DigitSequence& seq, const Alpha& alpha, long j_min, long j_max,
                                        std::size_t d_max, std::span<const Prec> ladder = kDefaultLadder);

struct PairSeparation {
  long n = 0, m = 0;
  std::size_t depth = 0;
  BigFloat gap;
};

struct DisjointnessReport {
  long range = 0;
  std::size_t d_max = 0;
  std::vector<PairSeparation> pairs;  // all -range <= n < m <= range
  BigFloat min_gap;
  std::size_t max_depth = 0;
};

DisjointnessReport verify_translate_disjointness(const DigitSequence& seq, const Alpha& alpha, long range_n,
                                                 std::size_t d_max, std::span<const Prec> ladder = kDefaultLadder);

}  // namespace fundom
