#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fundom/cocycle.hpp"
#include "fundom/error.hpp"

#include <cmath>
#include <random>

using namespace fundom;

namespace {

const CocycleStack& golden_stack() {
  static const CocycleStack st = CocycleStack::build(Alpha::golden(), golden_digit_sequence(7), 4, 24);
  return st;
}

bool overlap(const Interval& a, const Interval& b) { return !a.certainly_less(b) && !b.certainly_less(a); }

mpq_class random_point_of_C(const DigitSequence& s, std::size_t depth, std::mt19937_64& rng) {
  CylinderCode c = code_of(rng() % (1ULL << depth), depth);
  mpq_class x = 0;
  for (std::size_t n = 0; n < depth; ++n)
    if (c[n]) x += mpq_class(mpz_class(1), s.q[n + 1]);
  return x;
}

}  // namespace

TEST_CASE("M and the tail bounds") {
  Interval M = bound_M();
  CHECK(M.mid_double() == doctest::Approx(6.95505).epsilon(1e-5));
  CHECK(M.width() < 1e-30);
  // Direct double summation as an oracle.
  double direct = 1;
  for (int n = 0; n < 40; ++n) direct += std::ldexp(std::exp(-0.75 * std::pow(1.5, n)), n + 1);
  CHECK(M.lo().to_double() <= direct + 1e-12);
  CHECK(M.hi().to_double() >= direct - 1e-12);

  CHECK(overlap(block_tail_bound(0), M - Interval::from_long(1, kDefaultPrec)));
  for (long r : {1L, 4L, 8L, 16L, 32L}) {
    CHECK(all_level_tail_bound(r).hi() <= block_tail_bound(r).hi());
    CHECK(block_tail_bound(r + 1).hi() <= block_tail_bound(r).hi());
  }
  CHECK(block_tail_bound(32).mid_double() == doctest::Approx(0.234072).epsilon(1e-5));
}

TEST_CASE("level geometry for golden") {
  const auto& st = golden_stack();
  REQUIRE(st.n_max() == 4);
  std::vector<std::size_t> depths{0, 1, 1, 2};
  for (std::size_t n = 0; n < 4; ++n) {
    const auto& g = st.levels()[n].geometry();
    CHECK(g.depth == depths[n]);
    BigFloat twice(64);
    mpfr_mul_ui(twice.get(), g.epsilon.get(), 2, MPFR_RNDU);
    CHECK(twice < g.gap);
  }
  CHECK(st.tail_bound() == mpq_class(3 * 81, 256));
}

TEST_CASE("tent profile is flat on the cover and vanishes past epsilon") {
  const auto& st = golden_stack();
  const BumpLevel& lv = st.levels()[3];
  const mpq_class left = lv.cover().left(1);
  CHECK(lv.profile(CirclePoint::from_rational(left, 128)).contains(lv.amplitude()));
  mpq_class far = lv.cover().right_end() + lv.geometry().epsilon.to_rational() * 2;
  CHECK(lv.profile(CirclePoint::from_rational(far, 128)).contains(mpq_class(0)));
}

TEST_CASE("level Birkhoff sums equal -|i| (3/4)^n on C") {
  const auto& st = golden_stack();
  std::mt19937_64 rng(31);
  for (int t = 0; t < 10; ++t) {
    CirclePoint x = CirclePoint::from_rational(random_point_of_C(st.sequence(), 6, rng), 128);
    for (std::size_t n = 1; n <= 4; ++n) {
      long half = 1L << n;
      for (long i : {-half, -1L, 1L, half / 2, half}) {
        Interval v = birkhoff_level(st, n, x, i);
        CHECK(v.contains(mpq_class(-st.levels()[n - 1].amplitude() * (i < 0 ? -i : i))));
        CHECK(v.width() < 1e-9);
      }
    }
  }
}

TEST_CASE("phi is bounded by 3 and its enclosure contains the truncation") {
  const auto& st = golden_stack();
  std::mt19937_64 rng(37);
  for (int t = 0; t < 200; ++t) {
    CirclePoint x = CirclePoint::from_rational(mpq_class(static_cast<long>(rng() % 100000), 100000), 128);
    Interval tr = phi_truncated(st, x), full = phi(st, x);
    CHECK(full.contains(tr));
    CHECK(std::abs(tr.mid_double()) <= 3.0);
  }
}

TEST_CASE("cocycle identity phi^(m+n)(x) = phi^(m)(x) + phi^(n)(R^m x)") {
  const auto& st = golden_stack();
  std::mt19937_64 rng(41);
  for (int t = 0; t < 40; ++t) {
    CirclePoint x = CirclePoint::from_rational(mpq_class(static_cast<long>(rng() % 9973), 9973), 128);
    long m = static_cast<long>(rng() % 21) - 10, n = static_cast<long>(rng() % 21) - 10;
    Interval lhs = birkhoff(st, x, m + n).value;
    Interval rhs = birkhoff(st, x, m).value + birkhoff(st, st.rotate(x, m), n).value;
    CHECK(overlap(lhs, rhs));
  }
}

TEST_CASE("incremental Birkhoff range matches direct sums") {
  const auto& st = golden_stack();
  CirclePoint x = CirclePoint::from_rational(mpq_class(1, 8) + mpq_class(1, 512), 128);
  auto r = birkhoff_range(st, x, 12);
  for (long i = -12; i <= 12; ++i) CHECK(overlap(r[static_cast<std::size_t>(i + 12)], birkhoff(st, x, i).value));
  CHECK(birkhoff(st, x, 0).value.contains(mpq_class(0)));
  CHECK(birkhoff(st, x, -7).truncation == st.tail_bound() * 7);
}

TEST_CASE("levels must be contiguous") {
  const auto& st = golden_stack();
  std::vector<BumpLevel> lv{st.levels()[1]};
  CHECK_THROWS_AS(CocycleStack(st.alpha(), st.sequence(), lv), Error);
}
