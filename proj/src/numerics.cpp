#include "fundom/numerics.hpp"

#include "fundom/error.hpp"

#include <algorithm>
#include <cstdlib>
#include <utility>

namespace fundom {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::RationalInput: return "RationalInput";
    case ErrorCode::NotCertifiable: return "NotCertifiable";
    case ErrorCode::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorCode::DisjointnessUndecided: return "DisjointnessUndecided";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::ToleranceNotMet: return "ToleranceNotMet";
    case ErrorCode::DepthTooLarge: return "DepthTooLarge";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

// -------------------------------------------------------------- BigFloat --

BigFloat::BigFloat(Prec prec) {
  mpfr_init2(v_, prec);
  mpfr_set_zero(v_, 1);
}

BigFloat::BigFloat(long v, Prec prec) {
  mpfr_init2(v_, prec);
  mpfr_set_si(v_, v, MPFR_RNDN);
}

BigFloat::BigFloat(const BigFloat& other) {
  mpfr_init2(v_, other.prec());
  mpfr_set(v_, other.v_, MPFR_RNDN);
}

BigFloat::BigFloat(BigFloat&& other) noexcept {
  mpfr_init2(v_, other.prec());
  mpfr_swap(v_, other.v_);
}

BigFloat& BigFloat::operator=(const BigFloat& other) {
  if (this != &other) {
    mpfr_set_prec(v_, other.prec());
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  return *this;
}

BigFloat& BigFloat::operator=(BigFloat&& other) noexcept {
  if (this != &other) {
    if (prec() != other.prec()) mpfr_set_prec(v_, other.prec());
    mpfr_swap(v_, other.v_);
  }
  return *this;
}

BigFloat::~BigFloat() { mpfr_clear(v_); }

mpq_class BigFloat::to_rational() const {
  mpz_class m;
  mpfr_exp_t e = mpfr_get_z_2exp(m.get_mpz_t(), v_);
  mpq_class q(m);
  if (e >= 0) {
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 2, static_cast<unsigned long>(e));
    q *= scale;
  } else {
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 2, static_cast<unsigned long>(-e));
    q /= scale;
  }
  q.canonicalize();
  return q;
}

std::string BigFloat::str() const {
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%Ra@%ld", v_, static_cast<long>(prec()));
  std::string out(buf);
  mpfr_free_str(buf);
  return out;
}

BigFloat BigFloat::parse(const std::string& s) {
  auto at = s.rfind('@');
  if (at == std::string::npos) throw Error(ErrorCode::ParseError, "bad float literal: " + s);
  char* end = nullptr;
  long prec = std::strtol(s.c_str() + at + 1, &end, 10);
  if (prec < MPFR_PREC_MIN || prec > MPFR_PREC_MAX || *end != '\0')
    throw Error(ErrorCode::ParseError, "bad float precision: " + s);
  BigFloat out(prec);
  std::string body = s.substr(0, at);
  if (mpfr_set_str(out.v_, body.c_str(), 0, MPFR_RNDN) != 0)
    throw Error(ErrorCode::ParseError, "inexact or malformed float literal: " + s);
  return out;
}

// -------------------------------------------------------------- Interval --

namespace {

Prec joint_prec(const Interval& a, const Interval& b) { return std::max(a.prec(), b.prec()); }

BigFloat& min_into(BigFloat& acc, const BigFloat& v) {
  if (v < acc) acc = v;
  return acc;
}
BigFloat& max_into(BigFloat& acc, const BigFloat& v) {
  if (acc < v) acc = v;
  return acc;
}

}  // namespace

Interval::Interval(Prec prec) : lo_(prec), hi_(prec) {}

Interval::Interval(BigFloat lo, BigFloat hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (mpfr_nan_p(lo_.get()) || mpfr_nan_p(hi_.get()) || hi_ < lo_)
    throw Error(ErrorCode::InvalidArgument, "interval with lo > hi or NaN endpoint");
}

Interval Interval::from_long(long v, Prec prec) {
  BigFloat lo(prec), hi(prec);
  mpfr_set_si(lo.get(), v, MPFR_RNDD);
  mpfr_set_si(hi.get(), v, MPFR_RNDU);
  return {std::move(lo), std::move(hi)};
}

Interval Interval::from_rational(const mpq_class& q, Prec prec) {
  BigFloat lo(prec), hi(prec);
  mpfr_set_q(lo.get(), q.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(hi.get(), q.get_mpq_t(), MPFR_RNDU);
  return {std::move(lo), std::move(hi)};
}

Interval Interval::from_integer(const mpz_class& z, Prec prec) {
  BigFloat lo(prec), hi(prec);
  mpfr_set_z(lo.get(), z.get_mpz_t(), MPFR_RNDD);
  mpfr_set_z(hi.get(), z.get_mpz_t(), MPFR_RNDU);
  return {std::move(lo), std::move(hi)};
}

Interval Interval::hull(const mpq_class& a, const mpq_class& b, Prec prec) {
  const mpq_class& l = a < b ? a : b;
  const mpq_class& h = a < b ? b : a;
  BigFloat lo(prec), hi(prec);
  mpfr_set_q(lo.get(), l.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(hi.get(), h.get_mpq_t(), MPFR_RNDU);
  return {std::move(lo), std::move(hi)};
}

Interval Interval::pi(Prec prec) {
  BigFloat lo(prec), hi(prec);
  mpfr_const_pi(lo.get(), MPFR_RNDD);
  mpfr_const_pi(hi.get(), MPFR_RNDU);
  return {std::move(lo), std::move(hi)};
}

Interval Interval::pow2(long e, Prec prec) {
  BigFloat v(prec);
  mpfr_set_ui_2exp(v.get(), 1, e, MPFR_RNDN);
  return {v, v};
}

Prec Interval::prec() const { return std::max(lo_.prec(), hi_.prec()); }

double Interval::width() const {
  BigFloat w(53);
  mpfr_sub(w.get(), hi_.get(), lo_.get(), MPFR_RNDU);
  return w.to_double(MPFR_RNDU);
}

BigFloat Interval::mid() const {
  BigFloat m(prec() + 1);
  mpfr_add(m.get(), lo_.get(), hi_.get(), MPFR_RNDN);
  mpfr_div_2ui(m.get(), m.get(), 1, MPFR_RNDN);
  return m;
}

bool Interval::contains(const mpq_class& q) const {
  return mpfr_cmp_q(lo_.get(), q.get_mpq_t()) <= 0 && mpfr_cmp_q(hi_.get(), q.get_mpq_t()) >= 0;
}

bool Interval::contains(const Interval& other) const { return lo_ <= other.lo_ && other.hi_ <= hi_; }

bool Interval::contains_zero() const { return mpfr_sgn(lo_.get()) <= 0 && mpfr_sgn(hi_.get()) >= 0; }

Interval Interval::with_prec(Prec prec) const {
  BigFloat lo(prec), hi(prec);
  mpfr_set(lo.get(), lo_.get(), MPFR_RNDD);
  mpfr_set(hi.get(), hi_.get(), MPFR_RNDU);
  return {std::move(lo), std::move(hi)};
}

Interval operator+(const Interval& a, const Interval& b) {
  const Prec p = joint_prec(a, b);
  BigFloat lo(p), hi(p);
  mpfr_add(lo.get(), a.lo_.get(), b.lo_.get(), MPFR_RNDD);
  mpfr_add(hi.get(), a.hi_.get(), b.hi_.get(), MPFR_RNDU);
  return {std::move(lo), std::move(hi)};
}

Interval operator-(const Interval& a, const Interval& b) {
  const Prec p = joint_prec(a, b);
  BigFloat lo(p), hi(p);
  mpfr_sub(lo.get(), a.lo_.get(), b.hi_.get(), MPFR_RNDD);
  mpfr_sub(hi.get(), a.hi_.get(), b.lo_.get(), MPFR_RNDU);
  return {std::move(lo), std::move(hi)};
}

Interval operator-(const Interval& a) {
  BigFloat lo(a.hi_.prec()), hi(a.lo_.prec());
  mpfr_neg(lo.get(), a.hi_.get(), MPFR_RNDD);
  mpfr_neg(hi.get(), a.lo_.get(), MPFR_RNDU);
  return {std::move(lo), std::move(hi)};
}

Interval operator*(const Interval& a, const Interval& b) {
  const Prec p = joint_prec(a, b);
  const BigFloat* xs[2] = {&a.lo_, &a.hi_};
  const BigFloat* ys[2] = {&b.lo_, &b.hi_};
  BigFloat lo(p), hi(p), t(p);
  bool first = true;
  for (auto* x : xs) {
    for (auto* y : ys) {
      mpfr_mul(t.get(), x->get(), y->get(), MPFR_RNDD);
      if (first) lo = t; else min_into(lo, t);
      mpfr_mul(t.get(), x->get(), y->get(), MPFR_RNDU);
      if (first) hi = t; else max_into(hi, t);
      first = false;
    }
  }
  return {std::move(lo), std::move(hi)};
}

Interval operator/(const Interval& a, const Interval& b) {
  if (b.contains_zero()) throw Error(ErrorCode::PrecisionExhausted, "interval division by an enclosure of zero");
  const Prec p = joint_prec(a, b);
  const BigFloat* xs[2] = {&a.lo_, &a.hi_};
  const BigFloat* ys[2] = {&b.lo_, &b.hi_};
  BigFloat lo(p), hi(p), t(p);
  bool first = true;
  for (auto* x : xs) {
    for (auto* y : ys) {
      mpfr_div(t.get(), x->get(), y->get(), MPFR_RNDD);
      if (first) lo = t; else min_into(lo, t);
      mpfr_div(t.get(), x->get(), y->get(), MPFR_RNDU);
      if (first) hi = t; else max_into(hi, t);
      first = false;
    }
  }
  return {std::move(lo), std::move(hi)};
}

Interval Interval::scaled(long k) const { return *this * from_long(k, prec()); }

Interval Interval::mul_2si(long e) const {
  BigFloat lo(lo_), hi(hi_);
  mpfr_mul_2si(lo.get(), lo.get(), e, MPFR_RNDD);
  mpfr_mul_2si(hi.get(), hi.get(), e, MPFR_RNDU);
  return {std::move(lo), std::move(hi)};
}

Interval exp(const Interval& x) {
  BigFloat lo(x.prec()), hi(x.prec());
  mpfr_exp(lo.get(), x.lo().get(), MPFR_RNDD);
  mpfr_exp(hi.get(), x.hi().get(), MPFR_RNDU);
  return {std::move(lo), std::move(hi)};
}

Interval abs(const Interval& x) {
  if (mpfr_sgn(x.lo().get()) >= 0) return x;
  if (mpfr_sgn(x.hi().get()) <= 0) return -x;
  BigFloat hi(x.prec());
  BigFloat neg_lo(x.prec());
  mpfr_neg(neg_lo.get(), x.lo().get(), MPFR_RNDU);
  hi = x.hi() < neg_lo ? neg_lo : x.hi();
  return {BigFloat(0, x.prec()), std::move(hi)};
}

Interval min(const Interval& a, const Interval& b) {
  return {a.lo() < b.lo() ? a.lo() : b.lo(), a.hi() < b.hi() ? a.hi() : b.hi()};
}

Interval max(const Interval& a, const Interval& b) {
  return {a.lo() < b.lo() ? b.lo() : a.lo(), a.hi() < b.hi() ? b.hi() : a.hi()};
}

Interval floor_part(const Interval& x) {
  BigFloat lo(x.lo().prec()), hi(x.hi().prec());
  mpfr_floor(lo.get(), x.lo().get());
  mpfr_floor(hi.get(), x.hi().get());
  return {std::move(lo), std::move(hi)};
}

Interval hull(const Interval& a, const Interval& b) {
  return {a.lo() < b.lo() ? a.lo() : b.lo(), a.hi() < b.hi() ? b.hi() : a.hi()};
}

Interval intersect(const Interval& a, const Interval& b) {
  const BigFloat& lo = a.lo() < b.lo() ? b.lo() : a.lo();
  const BigFloat& hi = a.hi() < b.hi() ? a.hi() : b.hi();
  if (hi < lo) throw Error(ErrorCode::InvalidArgument, "intersecting disjoint enclosures of one quantity");
  return {lo, hi};
}

Interval dist_to_integers(const Interval& x) {
  const Prec p = x.prec();
  Interval half = Interval::pow2(-1, p);
  if (!(x.width() < 0.5)) return {BigFloat(0, p), half.hi()};
  BigFloat n(p);
  mpfr_rint(n.get(), x.mid().get(), MPFR_RNDN);
  Interval t = abs(x - Interval(n, n));
  Interval one = Interval::from_long(1, p);
  if (half.hi() <= t.lo()) return one - t;  // decreasing branch
  if (t.hi() <= half.lo()) return t;        // increasing branch
  Interval left = min(t, one - t);
  return {left.lo(), half.hi()};
}

// ------------------------------------------------------------- circle ----

namespace {

Interval normalize_rep(const Interval& rep) {
  BigFloat shift(rep.lo().prec());
  mpfr_floor(shift.get(), rep.lo().get());
  if (mpfr_zero_p(shift.get())) return rep;
  return rep - Interval(shift, shift);
}

}  // namespace

CirclePoint::CirclePoint(Interval rep) : rep_(normalize_rep(rep)) {}

CirclePoint CirclePoint::from_rational(const mpq_class& q, Prec prec) {
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return CirclePoint(Interval::from_rational(q - fl, prec));
}

bool CirclePoint::straddles_wrap() const { return mpfr_cmp_ui(rep_.hi().get(), 1) >= 0; }

Interval circle_dist(const CirclePoint& a, const CirclePoint& b) { return dist_to_integers(b.rep() - a.rep()); }

Interval dist_to_grid(const Interval& x, const mpz_class& q) {
  if (q < 1) throw Error(ErrorCode::InvalidArgument, "dist_to_grid needs q >= 1");
  Interval qi = Interval::from_integer(q, x.prec());
  return dist_to_integers(x * qi) / qi;
}

CircleArc::CircleArc(CirclePoint left, Interval length) : left_(std::move(left)), length_(std::move(length)) {
  if (mpfr_sgn(length_.lo().get()) < 0 || mpfr_cmp_ui(length_.hi().get(), 1) >= 0)
    throw Error(ErrorCode::InvalidArgument, "arc length must lie in [0, 1)");
}

Interval CircleArc::dist(const CirclePoint& p) const {
  // u = offset of p past the left end, taken in [0, 1).
  Interval u = CirclePoint(p.rep() - left_.rep()).rep();
  const Prec prec = u.prec();
  Interval zero = Interval::from_long(0, prec);
  Interval one = Interval::from_long(1, prec);
  return max(zero, min(u - length_, one - u));
}

// -------------------------------------------------------------- reals ----

Real::Real(Generator gen, Prec prec)
    : gen_(std::make_shared<const Generator>(std::move(gen))), enclosure_((*gen_)(prec)) {}

Real::Real(std::shared_ptr<const Generator> gen, Interval enclosure)
    : gen_(std::move(gen)), enclosure_(std::move(enclosure)) {}

Real Real::rational(const mpq_class& q) {
  return Real([q](Prec p) { return Interval::from_rational(q, p); });
}

Real Real::refine(Prec prec) const { return Real(gen_, intersect(enclosure_, (*gen_)(prec))); }

Real circle_dist(const Real& a, const Real& b) {
  return Real([a, b](Prec p) { return circle_dist(CirclePoint(a.at(p)), CirclePoint(b.at(p))); },
              a.enclosure().prec());
}

Real dist_to_grid(const Real& x, const mpz_class& q) {
  return Real([x, q](Prec p) { return dist_to_grid(x.at(p), q); }, x.enclosure().prec());
}

Ordering decide(const Real& a, const Real& b, std::span<const Prec> ladder) {
  if (ladder.empty()) throw Error(ErrorCode::InvalidArgument, "empty precision ladder");
  Real ra = a, rb = b;
  for (Prec p : ladder) {
    ra = ra.refine(p);
    rb = rb.refine(p);
    if (ra.enclosure().certainly_less(rb.enclosure())) return Ordering::less;
    if (rb.enclosure().certainly_less(ra.enclosure())) return Ordering::greater;
  }
  return Ordering::undecided;
}

}  // namespace fundom
