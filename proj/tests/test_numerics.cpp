#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fundom/error.hpp"
#include "fundom/numerics.hpp"

#include <random>

using namespace fundom;

namespace {

// Random rational with numerator and denominator below 2^20, sign included.
mpq_class random_rational(std::mt19937_64& rng) {
  long num = static_cast<long>(rng() % (1u << 20)) - (1 << 19);
  long den = static_cast<long>(rng() % (1u << 20)) + 1;
  mpq_class q(num, den);
  q.canonicalize();
  return q;
}

mpq_class exact_dist_to_integers(const mpq_class& x) {
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  mpq_class f = x - fl;
  mpq_class g = 1 - f;
  return f < g ? f : g;
}

}  // namespace

TEST_CASE("interval arithmetic encloses exact rational results") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 2000; ++t) {
    mpq_class a = random_rational(rng), b = random_rational(rng);
    for (Prec prec : {Prec{24}, Prec{64}, Prec{200}}) {
      Interval A = Interval::from_rational(a, prec), B = Interval::from_rational(b, prec);
      CHECK((A + B).contains(mpq_class(a + b)));
      CHECK((A - B).contains(mpq_class(a - b)));
      CHECK((A * B).contains(mpq_class(a * b)));
      if (b != 0) CHECK((A / B).contains(mpq_class(a / b)));
      CHECK((-A).contains(mpq_class(-a)));
      CHECK(A.scaled(37).contains(mpq_class(a * 37)));
      CHECK(dist_to_integers(A).contains(exact_dist_to_integers(a)));
    }
  }
}

TEST_CASE("widths shrink as precision grows") {
  mpq_class third(1, 3);
  double prev = 1;
  for (Prec prec : kDefaultLadder) {
    Interval v = Interval::from_rational(third, prec) * Interval::from_long(7, prec);
    CHECK(v.contains(mpq_class(7, 3)));
    CHECK(v.width() < prev);
    prev = v.width();
  }
}

TEST_CASE("exp encloses known values") {
  Interval e = exp(Interval::from_long(1, 128));
  CHECK(e.lo().to_double() <= 2.718281828459045);
  CHECK(e.hi().to_double() >= 2.718281828459045);
  CHECK(e.width() < 1e-35);
  CHECK(exp(Interval::from_long(0, 64)).contains(mpq_class(1)));
}

TEST_CASE("intersect rejects disjoint enclosures") {
  Interval a = Interval::from_long(1, 64), b = Interval::from_long(2, 64);
  CHECK_THROWS_AS(intersect(a, b), Error);
  Interval h = hull(a, b);
  CHECK(intersect(h, a).contains(mpq_class(1)));
}

TEST_CASE("BigFloat text form round-trips bit for bit") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    Prec prec = 2 + static_cast<Prec>(rng() % 600);
    Interval v = Interval::from_rational(random_rational(rng), prec);
    BigFloat back = BigFloat::parse(v.lo().str());
    CHECK(back == v.lo());
    CHECK(back.prec() == v.lo().prec());
    CHECK(back.str() == v.lo().str());
  }
  CHECK_THROWS_AS(BigFloat::parse("not a number"), Error);
}

TEST_CASE("circle points keep lo in [0, 1)") {
  CirclePoint p = CirclePoint::from_rational(mpq_class(7, 4), 64);
  CHECK(p.rep().contains(mpq_class(3, 4)));
  CirclePoint q = CirclePoint::from_rational(mpq_class(-1, 4), 64);
  CHECK(q.rep().contains(mpq_class(3, 4)));
  CirclePoint r = p.rotated(Interval::from_rational(mpq_class(1, 2), 64));
  CHECK(r.rep().contains(mpq_class(1, 4)));
  CHECK(circle_dist(CirclePoint::from_rational(mpq_class(1, 10), 64), CirclePoint::from_rational(mpq_class(9, 10), 64))
            .contains(mpq_class(1, 5)));
}

TEST_CASE("arc distance is zero inside and wraps") {
  CircleArc arc(CirclePoint::from_rational(mpq_class(9, 10), 64), Interval::from_rational(mpq_class(1, 5), 64));
  CHECK(arc.dist(CirclePoint::from_rational(mpq_class(1, 20), 64)).contains(mpq_class(0)));
  CHECK(arc.dist(CirclePoint::from_rational(mpq_class(1, 5), 64)).contains(mpq_class(1, 10)));
  CHECK(arc.dist(CirclePoint::from_rational(mpq_class(8, 10), 64)).contains(mpq_class(1, 10)));
}

TEST_CASE("dist_to_grid matches the exact value") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 500; ++t) {
    mpq_class x = random_rational(rng);
    mpz_class q = 1 + rng() % 300;
    mpq_class scaled = x * q;
    mpq_class exact = exact_dist_to_integers(scaled) / q;
    CHECK(dist_to_grid(Interval::from_rational(x, 128), q).contains(exact));
  }
}

TEST_CASE("decide never contradicts the exact order") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 300; ++t) {
    mpq_class a = random_rational(rng), b = random_rational(rng);
    Ordering o = decide(Real::rational(a), Real::rational(b));
    if (a < b) CHECK(o == Ordering::less);
    else if (a > b) CHECK(o == Ordering::greater);
    else CHECK(o == Ordering::undecided);
  }
  // sqrt(2) against a close rational: resolved by refinement.
  Real sqrt2([](Prec prec) {
    BigFloat lo(prec), hi(prec);
    mpfr_sqrt_ui(lo.get(), 2, MPFR_RNDD);
    mpfr_sqrt_ui(hi.get(), 2, MPFR_RNDU);
    return Interval(lo, hi);
  });
  CHECK(decide(sqrt2, Real::rational(mpq_class(665857, 470832))) == Ordering::less);
}

TEST_CASE("refinement is monotone") {
  Real pi([](Prec prec) { return Interval::pi(prec); });
  Real r = pi;
  for (Prec prec : kDefaultLadder) {
    Real next = r.refine(prec);
    CHECK(r.enclosure().contains(next.enclosure()));
    r = next;
  }
  CHECK(r.enclosure().width() < 1e-150);
}
