#pragma once

// Outward-rounded interval arithmetic on MPFR dyadic endpoints, circle
// geometry on R/Z, and lazily refinable reals.

#include <mpfr.h>
#include <gmpxx.h>

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace fundom {

using Prec = mpfr_prec_t;

inline constexpr Prec kDefaultPrec = 128;
inline constexpr std::array<Prec, 4> kDefaultLadder{64, 128, 256, 512};

// Owning wrapper around mpfr_t. Copies keep the source precision.
class BigFloat {
 public:
  explicit BigFloat(Prec prec = kDefaultPrec);
  BigFloat(long v, Prec prec);
  BigFloat(const BigFloat& other);
  BigFloat(BigFloat&& other) noexcept;
  BigFloat& operator=(const BigFloat& other);
  BigFloat& operator=(BigFloat&& other) noexcept;
  ~BigFloat();

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  Prec prec() const { return mpfr_get_prec(v_); }
  double to_double(mpfr_rnd_t rnd = MPFR_RNDN) const { return mpfr_get_d(v_, rnd); }
  mpq_class to_rational() const;

  // Exact textual form "<hex mantissa>p<exp>@<prec>"; parse(str()) is bit-identical.
  std::string str() const;
  static BigFloat parse(const std::string& s);

  friend bool operator<(const BigFloat& a, const BigFloat& b) { return mpfr_less_p(a.v_, b.v_); }
  friend bool operator<=(const BigFloat& a, const BigFloat& b) { return mpfr_lessequal_p(a.v_, b.v_); }
  friend bool operator==(const BigFloat& a, const BigFloat& b) { return mpfr_equal_p(a.v_, b.v_); }

 private:
  mpfr_t v_;
  bool live_ = true;
};

// Closed interval [lo, hi] with dyadic endpoints. Every operation rounds the
// lower endpoint down and the upper endpoint up, so the exact result of the
// real operation on any members of the operands lies inside the result.
class Interval {
 public:
  explicit Interval(Prec prec = kDefaultPrec);
  Interval(BigFloat lo, BigFloat hi);

  static Interval from_long(long v, Prec prec);
  static Interval from_rational(const mpq_class& q, Prec prec);
  static Interval from_integer(const mpz_class& z, Prec prec);
  static Interval hull(const mpq_class& a, const mpq_class& b, Prec prec);
  static Interval pi(Prec prec);
  // 2^e exactly.
  static Interval pow2(long e, Prec prec);

  const BigFloat& lo() const { return lo_; }
  const BigFloat& hi() const { return hi_; }
  Prec prec() const;

  // Upper bound on hi - lo.
  double width() const;
  BigFloat mid() const;
  double mid_double() const { return mid().to_double(); }
  bool is_point() const { return lo_ == hi_; }

  bool contains(const mpq_class& q) const;
  bool contains(const Interval& other) const;
  bool contains_zero() const;
  bool certainly_positive() const { return mpfr_sgn(lo_.get()) > 0; }
  bool certainly_negative() const { return mpfr_sgn(hi_.get()) < 0; }
  bool certainly_less(const Interval& o) const { return hi_ < o.lo_; }

  Interval with_prec(Prec prec) const;

  friend Interval operator+(const Interval& a, const Interval& b);
  friend Interval operator-(const Interval& a, const Interval& b);
  friend Interval operator*(const Interval& a, const Interval& b);
  friend Interval operator/(const Interval& a, const Interval& b);
  friend Interval operator-(const Interval& a);
  Interval& operator+=(const Interval& b) { return *this = *this + b; }
  Interval& operator-=(const Interval& b) { return *this = *this - b; }

  Interval scaled(long k) const;  // exact-ish multiplication by an integer
  Interval mul_2si(long e) const;  // exact multiplication by 2^e

 private:
  BigFloat lo_, hi_;
};

Interval exp(const Interval& x);
Interval abs(const Interval& x);
Interval min(const Interval& a, const Interval& b);
Interval max(const Interval& a, const Interval& b);
Interval floor_part(const Interval& x);  // [floor(lo), floor(hi)]
Interval hull(const Interval& a, const Interval& b);
// Intersection of two enclosures of the same quantity; throws if disjoint.
Interval intersect(const Interval& a, const Interval& b);

// Distance from x to the nearest integer, enclosed in [0, 1/2].
Interval dist_to_integers(const Interval& x);

// ---------------------------------------------------------------- circle --

// Point of R/Z. The stored enclosure satisfies 0 <= lo < 1; hi may exceed 1
// when the enclosure straddles the wrap point.
class CirclePoint {
 public:
  explicit CirclePoint(Interval rep);
  static CirclePoint from_rational(const mpq_class& q, Prec prec);

  const Interval& rep() const { return rep_; }
  bool straddles_wrap() const;
  CirclePoint rotated(const Interval& angle) const { return CirclePoint(rep_ + angle); }

 private:
  Interval rep_;
};

Interval circle_dist(const CirclePoint& a, const CirclePoint& b);
Interval dist_to_grid(const Interval& x, const mpz_class& q);

// Closed arc [left, left + length] on R/Z.
class CircleArc {
 public:
  CircleArc(CirclePoint left, Interval length);

  const CirclePoint& left() const { return left_; }
  const Interval& length() const { return length_; }
  // Right end as a lift, i.e. left.rep + length (may exceed 1).
  Interval right() const { return left_.rep() + length_; }

  // Circle distance from p to the arc (0 inside).
  Interval dist(const CirclePoint& p) const;

 private:
  CirclePoint left_;
  Interval length_;
};

enum class Ordering { less, greater, undecided };

// ---------------------------------------------------------------- reals --

// Real number given by a generator of enclosures at any requested precision,
// together with the tightest enclosure seen so far. Values are immutable:
// refine() returns a new Real whose enclosure is contained in the old one.
class Real {
 public:
  using Generator = std::function<Interval(Prec)>;

  explicit Real(Generator gen, Prec prec = 64);
  static Real rational(const mpq_class& q);

  const Interval& enclosure() const { return enclosure_; }
  Real refine(Prec prec) const;
  Interval at(Prec prec) const { return (*gen_)(prec); }

 private:
  Real(std::shared_ptr<const Generator> gen, Interval enclosure);
  std::shared_ptr<const Generator> gen_;
  Interval enclosure_;
};

Real circle_dist(const Real& a, const Real& b);
Real dist_to_grid(const Real& x, const mpz_class& q);

// Resolves a < b or a > b by refining both up the ladder. Never returns a
// wrong strict ordering; returns undecided if the enclosures still overlap at
// the last rung.
Ordering decide(const Real& a, const Real& b, std::span<const Prec> ladder = kDefaultLadder);

}  // namespace fundom
