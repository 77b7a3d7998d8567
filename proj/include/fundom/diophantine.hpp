#pragma once

// Rotation angles given by continued fractions, and the approximation
// function p(q) that keeps every nonzero multiple of the angle away from the
// grids (1/q)Z.

#include "fundom/numerics.hpp"

#include <gmpxx.h>

#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fundom {

// An irrational rotation angle in [0, 1), represented by its continued
// fraction [0; a_1, a_2, ...]. Three kinds of input are accepted:
//   "golden"                 (sqrt(5) - 1) / 2
//   "cf:a,b,c" / "cf:x,y;a,b"  eventually periodic quotients (prefix;period)
//   "0.618...+-1e-14"        decimal centre with an absolute error bound
// A decimal without error bound denotes a rational and is rejected.
class Alpha {
 public:
  static Alpha parse(const std::string& spec);
  static Alpha golden();
  static Alpha periodic(std::vector<long> prefix, std::vector<long> period);

  const std::string& spec() const { return spec_; }
  bool is_golden() const { return kind_ == Kind::golden; }

  // k-th partial quotient, k >= 1. Throws NotCertifiable for decimal input
  // whose error bound is too wide to fix the quotient.
  long quotient(std::size_t k) const;

  // Exact rational bounds lo <= alpha <= hi with hi - lo <= 2^-bits.
  std::pair<mpq_class, mpq_class> bounds(long bits) const;
  // Like bounds(), but a fixed decimal enclosure is returned as-is.
  std::pair<mpq_class, mpq_class> best_bounds(long bits) const;
  bool refinable() const { return kind_ != Kind::decimal; }
  Interval interval(Prec prec) const;
  Real real() const;

 private:
  enum class Kind { golden, periodic, decimal };
  Alpha() = default;

  Kind kind_ = Kind::golden;
  std::string spec_;
  std::vector<long> prefix_, period_;
  mpq_class dec_lo_, dec_hi_;
  std::shared_ptr<std::vector<long>> dec_quotients_;
};

struct Convergent {
  mpz_class num;
  mpz_class den;
};

struct ContinuedFraction {
  std::vector<long> quotients;         // a_1..a_k
  std::vector<Convergent> convergents;  // p_j/q_j for j = 1..k
};

ContinuedFraction expand_alpha(const Alpha& alpha, std::size_t k);

// Continued-fraction quotients of a positive rational, a_0 first.
std::vector<mpz_class> rational_quotients(mpq_class x);

// The function p of the construction, tabulated exactly and lazily:
//   p(q) = max_{1<=n<=q} ceil(1 / dist(n alpha, (1/q)Z)).
// Entries are computed from the continued fraction of q*alpha mod 1, whose
// convergent denominators are the record minimizers of ||n q alpha||.
class ApproximationProfile {
 public:
  explicit ApproximationProfile(Alpha alpha) : alpha_(std::move(alpha)) {}
  ApproximationProfile(const ApproximationProfile&) = delete;
  ApproximationProfile& operator=(const ApproximationProfile&) = delete;

  const Alpha& alpha() const { return alpha_; }

  mpz_class p(const mpz_class& q) const;
  // ceil(1 / dist(n alpha, (1/q)Z)), the minimal valid p_n(q).
  mpz_class p_n(const mpz_class& n, const mpz_class& q) const;

  std::map<mpz_class, mpz_class> table() const;

 private:
  Alpha alpha_;
  mutable std::mutex mu_;
  mutable std::map<mpz_class, mpz_class> table_;
};

inline mpz_class build_p(const ApproximationProfile& profile, const mpz_class& q) { return profile.p(q); }

struct CpWitness {
  Interval value;     // enclosure of min over the window of p(q) dist(x, (1/q)Z)
  mpz_class argmin;   // q attaining the minimum midpoint
  mpz_class q_first;  // window actually used
  mpz_class q_last;
  std::size_t count = 0;
};

// Finite-window upper-bound witness for the liminf c_p(x).
CpWitness estimate_c_p(const Real& x, const ApproximationProfile& profile, const mpz_class& q_first,
                       const mpz_class& q_last);
CpWitness estimate_c_p(const Real& x, const ApproximationProfile& profile, std::span<const mpz_class> qs);

// Working precision sufficient to resolve p(q) dist(x, (1/q)Z) for |x| < 2^12.
Prec precision_for_grid(const mpz_class& q, const mpz_class& pq);

}  // namespace fundom
