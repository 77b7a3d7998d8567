#include "fundom/cantor.hpp"

#include "fundom/error.hpp"

#include <algorithm>
#include <optional>

namespace fundom {

namespace {

constexpr std::size_t kMaxCoverDepth = 24;
constexpr unsigned long kMaxGoldenExponent = 1UL << 26;

mpz_class pow2z(unsigned long e) {
  mpz_class z;
  mpz_ui_pow_ui(z.get_mpz_t(), 2, e);
  return z;
}

}  // namespace

std::string_view to_string(SequenceProvenance p) {
  return p == SequenceProvenance::golden_fast_path ? "golden-fast-path" : "general-construction";
}

DigitSequence golden_digit_sequence(std::size_t n_terms) {
  DigitSequence seq;
  seq.provenance = SequenceProvenance::golden_fast_path;
  seq.q.push_back(1);
  unsigned long exponent = 1;
  for (std::size_t k = 1; k <= n_terms; ++k) {
    exponent *= 3;
    if (exponent > kMaxGoldenExponent)
      throw Error(ErrorCode::DepthTooLarge, "golden digit 2^(3^" + std::to_string(k) + ") exceeds the integer budget");
    seq.q.push_back(pow2z(exponent));
  }
  return seq;
}

DigitSequence build_digit_sequence(const ApproximationProfile& profile, std::size_t n_terms) {
  if (n_terms < 1) throw Error(ErrorCode::InvalidArgument, "digit sequence needs N >= 1");
  DigitSequence seq;
  seq.provenance = SequenceProvenance::general_construction;
  seq.q.push_back(1);
  for (std::size_t n = 0; n < n_terms; ++n) {
    const mpz_class& qn = seq.q.back();
    if (mpz_sizeinbase(qn.get_mpz_t(), 2) > (1UL << 22))
      throw Error(ErrorCode::DepthTooLarge, "digit sequence outgrew the integer budget at n = " + std::to_string(n));
    mpz_class need = std::max<mpz_class>(3 * qn, pow2z(n) * profile.p(qn));
    mpz_class mult;
    mpz_cdiv_q(mult.get_mpz_t(), need.get_mpz_t(), qn.get_mpz_t());
    seq.q.push_back(mult * qn);
  }
  return seq;
}

DigitConditionCheck check_digit_conditions(const DigitSequence& seq, const ApproximationProfile& profile) {
  DigitConditionCheck c;
  c.q0_is_one = !seq.q.empty() && seq.q[0] == 1;
  c.divisibility = c.ratio_third = c.approximation = true;
  c.first_failure = seq.q.size();
  for (std::size_t n = 0; n + 1 < seq.q.size(); ++n) {
    const mpz_class& a = seq.q[n];
    const mpz_class& b = seq.q[n + 1];
    bool div = mpz_divisible_p(b.get_mpz_t(), a.get_mpz_t()) != 0;
    bool third = 3 * a <= b;
    bool approx = pow2z(n) * profile.p(a) <= b;
    if (!(div && third && approx) && c.first_failure == seq.q.size()) c.first_failure = n;
    c.divisibility = c.divisibility && div;
    c.ratio_third = c.ratio_third && third;
    c.approximation = c.approximation && approx;
  }
  return c;
}

TailBound tail(const DigitSequence& seq, std::size_t d) {
  if (seq.q.empty() || d > seq.last_index())
    throw Error(ErrorCode::InvalidArgument, "tail depth beyond the digit sequence");
  TailBound t;
  t.lo = 0;
  for (std::size_t n = d + 1; n < seq.q.size(); ++n) t.lo += mpq_class(1, seq.q[n]);
  t.lo.canonicalize();
  t.hi = t.lo + mpq_class(1, 2 * seq.q.back());
  t.hi.canonicalize();
  return t;
}

CylinderCode code_of(std::uint64_t k, std::size_t depth) {
  CylinderCode code(depth);
  for (std::size_t n = 0; n < depth; ++n) code[n] = static_cast<std::uint8_t>((k >> (depth - 1 - n)) & 1U);
  return code;
}

// ----------------------------------------------------------- CantorCover --

CantorCover::CantorCover(const DigitSequence& seq, std::size_t depth) : depth_(depth) {
  if (depth > kMaxCoverDepth) throw Error(ErrorCode::BudgetExceeded, "cover depth above " + std::to_string(kMaxCoverDepth));
  if (depth > seq.last_index()) throw Error(ErrorCode::InvalidArgument, "cover depth beyond the digit sequence");
  tail_ = tail(seq, depth);
  lefts_.reserve(std::size_t{1} << depth);
  lefts_.push_back(0);
  for (std::size_t n = 1; n <= depth; ++n) {
    mpq_class step(1, seq.q[n]);
    std::vector<mpq_class> next;
    next.reserve(lefts_.size() * 2);
    for (const auto& l : lefts_) {
      next.push_back(l);
      next.push_back(l + step);
    }
    lefts_ = std::move(next);
  }
  left_cache_.reserve(lefts_.size());
  for (const auto& l : lefts_) left_cache_.push_back(Interval::from_rational(l, kDefaultPrec));
  length_cache_ = tail_.interval(kDefaultPrec);
}

mpq_class CantorCover::mass_per_cylinder() const { return mpq_class(1, pow2z(depth_)); }

CircleArc CantorCover::arc(std::size_t k, Prec prec) const {
  if (prec == kDefaultPrec) return CircleArc(CirclePoint(left_cache_.at(k)), length_cache_);
  return CircleArc(CirclePoint(Interval::from_rational(lefts_.at(k), prec)), tail_.interval(prec));
}

Interval CantorCover::dist(const CirclePoint& p) const {
  const Prec prec = p.rep().prec();
  BigFloat m = p.rep().mid();
  // Last arc whose left end is <= the midpoint.
  auto it = std::upper_bound(lefts_.begin(), lefts_.end(), m,
                             [](const BigFloat& v, const mpq_class& l) { return mpfr_cmp_q(v.get(), l.get_mpq_t()) < 0; });
  std::ptrdiff_t idx = std::distance(lefts_.begin(), it) - 1;
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(lefts_.size());
  std::vector<std::ptrdiff_t> candidates{0, n - 1};
  for (std::ptrdiff_t k = idx - 1; k <= idx + 2; ++k)
    if (k >= 0 && k < n) candidates.push_back(k);
  std::optional<Interval> best;
  for (auto k : candidates) {
    Interval d = arc(static_cast<std::size_t>(k), prec).dist(p);
    best = best ? min(*best, d) : d;
  }
  return *best;
}

CirclePoint point_from_code(const DigitSequence& seq, std::span<const std::uint8_t> code, std::size_t d, Prec prec) {
  if (code.size() < d) throw Error(ErrorCode::InvalidArgument, "code shorter than the requested depth");
  mpq_class s = 0;
  for (std::size_t n = 1; n <= d; ++n) {
    if (code[n - 1] > 1) throw Error(ErrorCode::InvalidArgument, "cylinder digits must be 0 or 1");
    if (code[n - 1]) s += mpq_class(1, seq.q.at(n));
  }
  s.canonicalize();
  TailBound t = tail(seq, d);
  return CirclePoint(Interval::hull(s, s + t.hi, prec));
}

mpq_class partial_sum(const DigitSequence& seq, std::span<const int> digits) {
  mpq_class s = 0;
  for (std::size_t n = 1; n <= digits.size(); ++n) {
    int e = digits[n - 1];
    if (e < -1 || e > 1) throw Error(ErrorCode::InvalidArgument, "difference digits must lie in {-1, 0, 1}");
    if (e) s += mpq_class(e, seq.q.at(n));
  }
  s.canonicalize();
  return s;
}

Interval mu0_cdf(const DigitSequence& seq, const CirclePoint& x, std::size_t d) {
  CantorCover cov(seq, d);
  const Interval& r = x.rep();
  const Prec prec = std::max<Prec>(r.prec(), kDefaultPrec);
  if (x.straddles_wrap()) {
    // Enclosure reaches past 1: the cdf value lies between its value at lo and 1.
    Interval at_lo = mu0_cdf(seq, CirclePoint(Interval(r.lo(), r.lo())), d);
    return {at_lo.lo(), BigFloat(1, prec)};
  }
  const mpq_class& t_hi = cov.arc_length().hi;
  const auto& lefts = cov.lefts();
  // Arcs entirely left of x.lo are counted in full; arcs starting after x.hi not at all.
  auto full_end = std::partition_point(lefts.begin(), lefts.end(), [&](const mpq_class& l) {
    mpq_class right = l + t_hi;
    return mpfr_cmp_q(r.lo().get(), right.get_mpq_t()) > 0;
  });
  auto touched_end = std::partition_point(lefts.begin(), lefts.end(), [&](const mpq_class& l) {
    return mpfr_cmp_q(r.hi().get(), l.get_mpq_t()) >= 0;
  });
  mpq_class mass = cov.mass_per_cylinder();
  mpq_class lo = mass * static_cast<unsigned long>(std::distance(lefts.begin(), full_end));
  mpq_class hi = mass * static_cast<unsigned long>(std::distance(lefts.begin(), std::max(full_end, touched_end)));
  return Interval::hull(lo, hi, prec);
}

// ------------------------------------------------------- disjointness ----

namespace {

struct Piece {
  BigFloat lo, hi;
  long set;
};

void append_translate(std::vector<Piece>& out, const CantorCover& cov, const Interval& shift, long set, Prec prec) {
  Interval len = cov.arc_length().interval(prec);
  BigFloat one(1, prec), zero(0, prec);
  for (const auto& l : cov.lefts()) {
    CirclePoint left(Interval::from_rational(l, prec) + shift);
    Interval right = left.rep() + len;
    if (mpfr_cmp_ui(right.hi().get(), 1) < 0 && mpfr_cmp_ui(left.rep().hi().get(), 1) < 0) {
      out.push_back({left.rep().lo(), right.hi(), set});
      continue;
    }
    out.push_back({left.rep().lo(), one, set});
    BigFloat wrapped(prec);
    mpfr_sub_ui(wrapped.get(), right.hi().get(), 1, MPFR_RNDU);
    out.push_back({zero, wrapped, set});
  }
}

// Sorts the pieces and returns the smallest gap between pieces of different
// sets if every adjacent pair (including across the wrap point) is separated.
std::optional<BigFloat> certify_pieces(std::vector<Piece>& pieces, Prec prec) {
  std::sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) { return a.lo < b.lo; });
  std::optional<BigFloat> best;
  BigFloat gap(prec);
  auto consider = [&](const Piece& a, const Piece& b, bool wrap) {
    mpfr_sub(gap.get(), b.lo.get(), a.hi.get(), MPFR_RNDD);
    if (wrap) mpfr_add_ui(gap.get(), gap.get(), 1, MPFR_RNDD);
    if (mpfr_sgn(gap.get()) <= 0) return false;
    if (a.set != b.set && (!best || gap < *best)) best = gap;
    return true;
  };
  for (std::size_t i = 0; i + 1 < pieces.size(); ++i)
    if (!consider(pieces[i], pieces[i + 1], false)) return std::nullopt;
  if (pieces.size() > 1 && !consider(pieces.back(), pieces.front(), true)) return std::nullopt;
  if (!best) return std::nullopt;
  return best;
}

}  // namespace

TranslateSeparation separate_translates(const DigitSequence& seq, const Alpha& alpha, long j_min, long j_max,
                                        std::size_t d_max, std::span<const Prec> ladder) {
  if (j_max <= j_min) throw Error(ErrorCode::InvalidArgument, "need at least two translates");
  const std::size_t depth_cap = std::min({d_max, seq.last_index(), kMaxCoverDepth});
  for (std::size_t d = 0; d <= depth_cap; ++d) {
    CantorCover cov(seq, d);
    for (Prec prec : ladder) {
      Interval a = alpha.interval(prec);
      std::vector<Piece> pieces;
      pieces.reserve(cov.size() * static_cast<std::size_t>(j_max - j_min + 1) + 8);
      for (long j = j_min; j <= j_max; ++j) append_translate(pieces, cov, a.scaled(j), j, prec);
      if (auto gap = certify_pieces(pieces, prec)) return {d, prec, *gap};
    }
  }
  throw Error(ErrorCode::DisjointnessUndecided, "translates R^j C, j in [" + std::to_string(j_min) + ", " +
                                                    std::to_string(j_max) + "], not separated up to depth " +
                                                    std::to_string(depth_cap));
}

DisjointnessReport verify_translate_disjointness(const DigitSequence& seq, const Alpha& alpha, long range_n,
                                                 std::size_t d_max, std::span<const Prec> ladder) {
  if (range_n < 1) throw Error(ErrorCode::InvalidArgument, "range_N must be >= 1");
  DisjointnessReport rep;
  rep.range = range_n;
  rep.d_max = d_max;
  // Rotation invariance: R^n C and R^m C are separated exactly as C and R^(m-n) C.
  std::vector<TranslateSeparation> by_offset(static_cast<std::size_t>(2 * range_n + 1));
  for (long delta = 1; delta <= 2 * range_n; ++delta) {
    try {
      by_offset[static_cast<std::size_t>(delta)] = separate_translates(seq, alpha, 0, delta, d_max, ladder);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DisjointnessUndecided) throw;
      throw Error(ErrorCode::DisjointnessUndecided,
                  "DisjointnessUndecided(n, n+" + std::to_string(delta) + "): " + e.what());
    }
  }
  bool first = true;
  for (long n = -range_n; n <= range_n; ++n) {
    for (long m = n + 1; m <= range_n; ++m) {
      const auto& s = by_offset[static_cast<std::size_t>(m - n)];
      rep.pairs.push_back({n, m, s.depth, s.gap});
      if (first || s.gap < rep.min_gap) rep.min_gap = s.gap;
      rep.max_depth = std::max(rep.max_depth, s.depth);
      first = false;
    }
  }
  return rep;
}

}  // namespace fundom
