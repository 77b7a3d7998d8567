#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fundom/cantor.hpp"
#include "fundom/error.hpp"

#include <algorithm>
#include <map>
#include <random>

using namespace fundom;

namespace {

mpz_class pow2(unsigned long e) { return mpz_class(1) << e; }

std::vector<mpq_class> brute_lefts(const DigitSequence& seq, std::size_t depth) {
  std::vector<mpq_class> out;
  for (std::uint64_t k = 0; k < (1ULL << depth); ++k) {
    mpq_class s = 0;
    CylinderCode c = code_of(k, depth);
    for (std::size_t n = 0; n < depth; ++n)
      if (c[n]) s += mpq_class(mpz_class(1), seq.q[n + 1]);
    out.push_back(s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("golden fast path digits are 2^(3^k)") {
  DigitSequence s = golden_digit_sequence(5);
  REQUIRE(s.size() == 6);
  CHECK(s.q[0] == 1);
  unsigned long e = 1;
  for (std::size_t k = 1; k <= 5; ++k) {
    e *= 3;
    CHECK(s.q[k] == pow2(e));
  }
  CHECK_THROWS_AS(golden_digit_sequence(40), Error);
}

TEST_CASE("general sequence takes the smallest admissible multiple") {
  ApproximationProfile prof(Alpha::golden());
  DigitSequence s = build_digit_sequence(prof, 5);
  CHECK(s.q[1] == 3);
  CHECK(s.q[2] == 42);
  CHECK(s.q[3] == 8106);
  CHECK(s.q[4] == mpz_class("5543563704"));
  for (std::size_t n = 0; n + 1 < s.size(); ++n) {
    mpz_class need = std::max<mpz_class>(3 * s.q[n], pow2(n) * prof.p(s.q[n]));
    CHECK(s.q[n + 1] >= need);
    CHECK(s.q[n + 1] - s.q[n] < need);  // the previous multiple falls short
    CHECK(s.q[n + 1] % s.q[n] == 0);
  }
}

TEST_CASE("digit conditions hold for both constructions and catch tampering") {
  for (const char* spec : {"golden", "cf:2,1,3,1"}) {
    ApproximationProfile prof(Alpha::parse(spec));
    DigitSequence s = build_digit_sequence(prof, 6);
    CHECK(check_digit_conditions(s, prof).all());
  }
  ApproximationProfile g(Alpha::golden());
  DigitSequence fast = golden_digit_sequence(6);
  CHECK(check_digit_conditions(fast, g).all());

  DigitSequence bad = fast;
  bad.q[3] += 1;
  DigitConditionCheck chk = check_digit_conditions(bad, g);
  CHECK_FALSE(chk.divisibility);
  CHECK_FALSE(chk.all());
  DigitSequence slow = fast;
  slow.q[2] = slow.q[1] * 2;
  CHECK_FALSE(check_digit_conditions(slow, g).ratio_third);
}

TEST_CASE("tail matches the geometric oracle") {
  DigitSequence s = golden_digit_sequence(4);
  TailBound t = tail(s, 1);
  mpq_class exact_part = mpq_class(1, pow2(9)) + mpq_class(1, pow2(27)) + mpq_class(1, pow2(81));
  CHECK(t.lo == exact_part);
  CHECK(t.hi == exact_part + mpq_class(1, 2 * pow2(81)));
  // The infinite golden sum lies inside.
  mpq_class longer = exact_part + mpq_class(1, pow2(243)) + mpq_class(1, pow2(729));
  CHECK(t.lo <= longer);
  CHECK(longer <= t.hi);
  CHECK(t.interval(64).mid_double() == doctest::Approx(1.953132e-3).epsilon(1e-6));
  CHECK(tail(s, 4).lo == 0);
}

TEST_CASE("code ordering puts eps_1 in the top bit") {
  CylinderCode c = code_of(0b101, 3);
  CHECK(c == CylinderCode{1, 0, 1});
  CHECK(code_of(0, 4) == CylinderCode{0, 0, 0, 0});
}

TEST_CASE("cover lefts equal the brute-force partial sums") {
  DigitSequence s = golden_digit_sequence(7);
  for (std::size_t d : {0u, 1u, 3u, 6u}) {
    CantorCover cov(s, d);
    CHECK(cov.lefts() == brute_lefts(s, d));
    CHECK(cov.mass_per_cylinder() == mpq_class(1, pow2(d)));
  }
}

TEST_CASE("cover distance agrees with a scan over arcs") {
  DigitSequence s = golden_digit_sequence(5);
  CantorCover cov(s, 3);
  std::mt19937_64 rng(23);
  for (int t = 0; t < 300; ++t) {
    mpq_class x(static_cast<long>(rng() % 100000), 100000);
    CirclePoint p = CirclePoint::from_rational(x, 128);
    mpq_class best = 1;
    for (std::size_t k = 0; k < cov.size(); ++k) {
      mpq_class a = cov.left(k), b = a + cov.arc_length().hi;
      mpq_class d;
      if (x >= a && x <= b) d = 0;
      else {
        mpq_class u = x - a;
        if (u < 0) u += 1;
        mpq_class left = 1 - u, right = u - cov.arc_length().hi;
        d = std::min(left, right);
      }
      best = std::min(best, d);
    }
    Interval got = cov.dist(p);
    // The arc end is only known up to the tail enclosure.
    CHECK(got.lo().to_double() <= best.get_d() + 1e-12);
    CHECK(got.hi().to_double() >= best.get_d() - mpq_class(cov.arc_length().hi - cov.arc_length().lo).get_d() - 1e-12);
  }
  // Points of C are at distance zero.
  CHECK(cov.dist(CirclePoint::from_rational(cov.left(5), 128)).contains(mpq_class(0)));
}

TEST_CASE("mu0 cdf stays within one cylinder of the counting oracle") {
  DigitSequence s = golden_digit_sequence(6);
  const std::size_t d = 5;
  CantorCover cov(s, d);
  std::mt19937_64 rng(29);
  for (int t = 0; t < 200; ++t) {
    mpq_class x(static_cast<long>(rng() % 1000000), 1000000);
    std::size_t full = 0, touched = 0;
    for (const auto& a : cov.lefts()) {
      if (a + cov.arc_length().hi <= x) ++full;
      if (a <= x) ++touched;
    }
    Interval got = mu0_cdf(s, CirclePoint::from_rational(x, 128), d);
    double lower = static_cast<double>(full) / 32, upper = static_cast<double>(touched) / 32;
    CHECK(got.lo().to_double() <= upper + 1e-15);
    CHECK(got.hi().to_double() >= lower - 1e-15);
    CHECK(got.width() <= 1.0 / 32 + 1e-12);
  }
}

TEST_CASE("points from codes enclose the partial sums") {
  DigitSequence s = golden_digit_sequence(6);
  CylinderCode c{1, 0, 1, 1};
  CirclePoint p = point_from_code(s, c, 4, 128);
  std::vector<int> digits{1, 0, 1, 1};
  CHECK(p.rep().contains(partial_sum(s, digits)));
}

TEST_CASE("translates separate at shallow depth for golden") {
  DigitSequence s = golden_digit_sequence(6);
  Alpha g = Alpha::golden();
  TranslateSeparation sep = separate_translates(s, g, -32, 32, 24);
  CHECK(sep.depth == 2);
  CHECK(sep.gap.to_double() == doctest::Approx(3.88e-4).epsilon(1e-2));

  DisjointnessReport r = verify_translate_disjointness(s, g, 16, 24);
  CHECK(r.pairs.size() == 33 * 32 / 2);
  CHECK(mpfr_sgn(r.min_gap.get()) > 0);
  // The gap of a pair depends only on m - n.
  std::map<long, double> by_delta;
  for (const auto& p : r.pairs) {
    double g0 = p.gap.to_double();
    auto [it, fresh] = by_delta.emplace(p.m - p.n, g0);
    if (!fresh) CHECK(it->second == g0);
  }
}

TEST_CASE("too deep a search budget is refused") {
  DigitSequence s = golden_digit_sequence(4);
  CHECK_THROWS_AS(CantorCover(s, 30), Error);
}
