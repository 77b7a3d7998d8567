#include "fundom/cocycle.hpp"

#include "fundom/error.hpp"

#include <algorithm>

namespace fundom {

namespace {

mpq_class three_quarters_pow(std::size_t n) {
  mpz_class num, den;
  mpz_ui_pow_ui(num.get_mpz_t(), 3, n);
  mpz_ui_pow_ui(den.get_mpz_t(), 4, n);
  return mpq_class(num, den);
}

mpq_class three_halves_pow(std::size_t n) {
  mpz_class num, den;
  mpz_ui_pow_ui(num.get_mpz_t(), 3, n);
  mpz_ui_pow_ui(den.get_mpz_t(), 2, n);
  return mpq_class(num, den);
}

Interval zero(Prec prec) { return Interval::from_long(0, prec); }

CirclePoint at_prec(const CirclePoint& x, Prec prec) {
  if (x.rep().prec() == prec) return x;
  return CirclePoint(x.rep().with_prec(prec));
}

}  // namespace

LevelGeometry choose_epsilon(std::size_t level, const DigitSequence& seq, const Alpha& alpha, std::size_t d_max,
                             std::span<const Prec> ladder) {
  if (level < 1) throw Error(ErrorCode::InvalidArgument, "cocycle levels start at 1");
  const long half = 1L << level;
  TranslateSeparation sep = separate_translates(seq, alpha, -half, half - 1, d_max, ladder);
  LevelGeometry g;
  g.depth = sep.depth;
  g.gap = sep.gap;
  g.epsilon = BigFloat(64);
  mpfr_div_ui(g.epsilon.get(), sep.gap.get(), 3, MPFR_RNDD);
  return g;
}

BumpLevel::BumpLevel(std::size_t level, const DigitSequence& seq, LevelGeometry geometry)
    : level_(level),
      amplitude_(three_quarters_pow(level)),
      geometry_(std::move(geometry)),
      cover_(std::make_shared<const CantorCover>(seq, geometry_.depth)) {
  if (level < 1) throw Error(ErrorCode::InvalidArgument, "cocycle levels start at 1");
  if (mpfr_sgn(geometry_.epsilon.get()) <= 0) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
}

Interval BumpLevel::profile(const CirclePoint& y) const {
  const Prec prec = y.rep().prec();
  Interval d = cover_->dist(y);
  if (mpfr_lessequal_p(geometry_.epsilon.get(), d.lo().get())) return zero(prec);
  Interval eps(geometry_.epsilon, geometry_.epsilon);
  Interval t = max(zero(prec), Interval::from_long(1, prec) - d / eps);
  return Interval::from_rational(amplitude_, prec) * t;
}

Interval bump_value(const BumpLevel& level, const Interval& alpha, const CirclePoint& x) {
  const Prec prec = x.rep().prec();
  Interval sum = zero(prec);
  const long half = level.translate_count();
  for (long j = -half; j < half; ++j) {
    Interval f = level.profile(x.rotated(alpha.scaled(-j)));
    if (f.is_point() && mpfr_zero_p(f.lo().get())) continue;
    sum = j >= 0 ? sum - f : sum + f;
  }
  return sum;
}

// ----------------------------------------------------------- CocycleStack --

CocycleStack::CocycleStack(Alpha alpha, DigitSequence seq, std::vector<BumpLevel> levels, Prec prec)
    : alpha_(std::move(alpha)), seq_(std::move(seq)), levels_(std::move(levels)), prec_(prec),
      alpha_iv_(alpha_.interval(prec)) {
  for (std::size_t i = 0; i < levels_.size(); ++i)
    if (levels_[i].level() != i + 1) throw Error(ErrorCode::InvalidArgument, "levels must be 1..n_max in order");
}

CocycleStack CocycleStack::build(const Alpha& alpha, const DigitSequence& seq, std::size_t n_max, std::size_t d_max,
                                 std::span<const Prec> ladder) {
  if (n_max < 1) throw Error(ErrorCode::InvalidArgument, "n_max must be >= 1");
  std::vector<BumpLevel> levels;
  for (std::size_t n = 1; n <= n_max; ++n) levels.emplace_back(n, seq, choose_epsilon(n, seq, alpha, d_max, ladder));
  return CocycleStack(alpha, seq, std::move(levels));
}

mpq_class CocycleStack::tail_bound() const { return 3 * three_quarters_pow(levels_.size()); }

CirclePoint CocycleStack::rotate(const CirclePoint& x, long k) const {
  return x.rotated(alpha_iv_.scaled(k));
}

Interval phi_truncated(const CocycleStack& stack, const CirclePoint& x) {
  CirclePoint xr = at_prec(x, stack.prec());
  Interval sum = zero(stack.prec());
  for (const auto& level : stack.levels()) sum += bump_value(level, stack.alpha_interval(), xr);
  return sum;
}

Interval phi(const CocycleStack& stack, const CirclePoint& x) {
  Interval t = Interval::from_rational(stack.tail_bound(), stack.prec());
  return phi_truncated(stack, x) + hull(-t, t);
}

namespace {

template <typename Eval>
Interval birkhoff_with(const CocycleStack& stack, const CirclePoint& x, long m, Eval&& eval) {
  CirclePoint xr = at_prec(x, stack.prec());
  Interval sum = zero(stack.prec());
  if (m > 0) {
    for (long i = 0; i < m; ++i) sum += eval(stack.rotate(xr, i));
  } else if (m < 0) {
    for (long i = 1; i <= -m; ++i) sum -= eval(stack.rotate(xr, -i));
  }
  return sum;
}

}  // namespace

BirkhoffValue birkhoff(const CocycleStack& stack, const CirclePoint& x, long m) {
  Interval v = birkhoff_with(stack, x, m, [&](const CirclePoint& y) { return phi_truncated(stack, y); });
  return {v, stack.tail_bound() * (m < 0 ? -m : m)};
}

Interval birkhoff_level(const CocycleStack& stack, std::size_t level, const CirclePoint& x, long m) {
  if (level < 1 || level > stack.n_max()) throw Error(ErrorCode::InvalidArgument, "level out of range");
  const BumpLevel& lv = stack.levels()[level - 1];
  return birkhoff_with(stack, x, m, [&](const CirclePoint& y) { return bump_value(lv, stack.alpha_interval(), y); });
}

std::vector<Interval> birkhoff_range(const CocycleStack& stack, const CirclePoint& x, long radius) {
  if (radius < 0) throw Error(ErrorCode::InvalidArgument, "radius must be >= 0");
  CirclePoint xr = at_prec(x, stack.prec());
  const auto r = static_cast<std::size_t>(radius);
  std::vector<Interval> out(2 * r + 1, zero(stack.prec()));
  for (long i = 0; i < radius; ++i)
    out[r + static_cast<std::size_t>(i) + 1] = out[r + static_cast<std::size_t>(i)] + phi_truncated(stack, stack.rotate(xr, i));
  for (long i = 0; i < radius; ++i)
    out[r - static_cast<std::size_t>(i) - 1] =
        out[r - static_cast<std::size_t>(i)] - phi_truncated(stack, stack.rotate(xr, -i - 1));
  return out;
}

// ------------------------------------------------------------ tail sums --

namespace {

// exp(-(3/4)(3/2)^n)
Interval decay_term(std::size_t n, Prec prec) {
  return exp(-Interval::from_rational(mpq_class(3, 4) * three_halves_pow(n), prec));
}

// Sums terms t_0, t_1, ... (given by `term`) until a term falls below
// 2^-120 and the successive ratio is at most 1/2, then adds the last term as
// a bound on the remainder.
template <typename Term>
Interval sum_with_remainder(std::size_t first, Term&& term, Prec prec, std::size_t min_terms) {
  Interval sum = zero(prec);
  Interval prev = term(first);
  sum += prev;
  for (std::size_t n = first + 1;; ++n) {
    Interval t = term(n);
    sum += t;
    bool small = mpfr_cmp_d(t.hi().get(), 0x1p-120) < 0;
    bool halving = mpfr_sgn(prev.lo().get()) == 0 || !(Interval::pow2(-1, prec) * prev).certainly_less(t);
    if (n >= first + min_terms && small && halving) {
      return sum + Interval(BigFloat(0, prec), t.hi());
    }
    prev = t;
    if (n > first + 400) throw Error(ErrorCode::BudgetExceeded, "tail series did not settle");
  }
}

}  // namespace

Interval bound_M(Prec prec) {
  auto term = [&](std::size_t n) { return decay_term(n, prec).mul_2si(static_cast<long>(n) + 1); };
  return Interval::from_long(1, prec) + sum_with_remainder(0, term, prec, 8);
}

Interval block_tail_bound(long radius, Prec prec) {
  if (radius < 0) throw Error(ErrorCode::InvalidArgument, "radius must be >= 0");
  auto term = [&](std::size_t n) {
    long lo = std::max(1L << n, radius + 1);
    long hi = (1L << (n + 1)) - 1;
    long count = hi >= lo ? 2 * (hi - lo + 1) : 0;
    return decay_term(n, prec).scaled(count);
  };
  std::size_t min_terms = 1;
  while ((1L << min_terms) <= radius) ++min_terms;
  return sum_with_remainder(0, term, prec, min_terms + 2);
}

Interval all_level_tail_bound(long radius, Prec prec) {
  if (radius < 0) throw Error(ErrorCode::InvalidArgument, "radius must be >= 0");
  // Block m holds |i| in (2^(m-1), 2^m] (block 0 is |i| = 1); there
  // phi^(i) <= -c |i| with c = 4 (3/4)^m. Geometric sum over the block, doubled for sign.
  auto term = [&](std::size_t m) {
    long b = 1L << m;
    long a = std::max(m == 0 ? 1L : (1L << (m - 1)) + 1, radius + 1);
    if (a > b) return zero(prec);
    Interval c = Interval::from_rational(4 * three_quarters_pow(m), prec);
    Interval one = Interval::from_long(1, prec);
    return (exp(-c.scaled(a)) / (one - exp(-c))).scaled(2);
  };
  std::size_t min_terms = 1;
  while ((1L << min_terms) <= radius) ++min_terms;
  return sum_with_remainder(0, term, prec, min_terms + 2);
}

}  // namespace fundom
