#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fundom/conjugacy.hpp"
#include "fundom/error.hpp"

#include <cmath>
#include <random>

using namespace fundom;

namespace {

struct Small {
  CocycleStack stack = CocycleStack::build(Alpha::golden(), golden_digit_sequence(6), 4, 24);
  WeightedAtomMeasure mu = assemble_mu(stack, 8, 4);
  ConjugacyDescriptor desc{mu, Alpha::golden()};
};

const Small& small() {
  static const Small s;
  return s;
}

double d(const BigFloat& v) { return v.to_double(); }

}  // namespace

TEST_CASE("atom masses are positive and normalized") {
  const auto& mu = small().mu;
  CHECK(mu.atoms().size() == 17 * 16);
  for (const auto& a : mu.atoms()) CHECK(a.mass.certainly_positive());
  Interval total = mu.total_mass();
  CHECK(total.contains(mpq_class(1)));
  CHECK(total.width() < 1e-25);
  for (std::size_t j = 1; j < mu.atoms().size(); ++j)
    CHECK(mu.atoms()[j - 1].location.lo() < mu.atoms()[j].location.lo());
  // Block 0 carries exp(0) 2^-d per cylinder.
  CHECK(mu.block_mass(0).mid_double() == doctest::Approx(1 / mu.normalizer().mid_double()));
  for (long i = 1; i <= 8; ++i) CHECK(mu.block_mass(i).mid_double() < mu.block_mass(0).mid_double());
}

TEST_CASE("h and h^-1 are inverse increasing maps") {
  const auto& desc = small().desc;
  CHECK(mpfr_zero_p(desc.h(desc.make(0)).get()));
  BigFloat prev = desc.make(-1);
  for (int j = 0; j <= 1000; ++j) {
    BigFloat x = desc.make(j / 1000.0);
    BigFloat y = desc.h(x);
    CHECK(std::abs(d(desc.h_inverse(y)) - j / 1000.0) < 1e-12);
    CHECK(prev < y);
    prev = y;
  }
  const auto& ys = desc.breakpoints_y();
  const auto& xs = desc.breakpoints_x();
  for (std::size_t j = 1; j < ys.size(); ++j) {
    CHECK(ys[j - 1] < ys[j]);
    CHECK(xs[j - 1] < xs[j]);
  }
}

TEST_CASE("F is a degree-one increasing lift") {
  const auto& desc = small().desc;
  double prev = -INFINITY;
  for (int j = 0; j <= 500; ++j) {
    double x = j / 500.0 - 0.5;
    double fx = d(desc.F_lift(desc.make(x)));
    CHECK(fx > prev);
    prev = fx;
    CHECK(d(desc.F_lift(desc.make(x + 1))) == doctest::Approx(fx + 1).epsilon(1e-14));
    double f = d(desc.F(desc.make(x)));
    CHECK(f >= 0);
    CHECK(f < 1);
  }
}

TEST_CASE("conjugacy residual vanishes") {
  const auto& desc = small().desc;
  for (double x : {0.0, 0.1, 0.37, 0.9}) {
    BigFloat xb = desc.make(x);
    BigFloat viaR = desc.h_inverse_lift(desc.make(0));
    BigFloat hx = desc.h_lift(xb);
    mpfr_add(hx.get(), hx.get(), desc.alpha().get(), MPFR_RNDN);
    viaR = desc.h_inverse_lift(hx);
    CHECK(viaR == desc.F_lift(xb));
  }
}

TEST_CASE("F^q returns close to the start for Fibonacci q") {
  const auto& desc = small().desc;
  BigFloat x = desc.make(0.3);
  BigFloat v = x;
  long n = 0, f0 = 1, f1 = 1;
  std::vector<double> drift;
  while (f1 <= 233) {
    for (; n < f1; ++n) v = desc.F_lift(v);
    // Nearest integer shift for q alpha is the previous Fibonacci number.
    double shift = d(v) - d(x) - static_cast<double>(f0);
    drift.push_back(std::abs(shift));
    long f2 = f0 + f1;
    f0 = f1;
    f1 = f2;
  }
  // |F^q x - x - p| is the mu-mass of an arc of length |q alpha - p|,
  // which at this depth can hold about two atoms.
  double max_mass = 0;
  for (const auto& a : small().mu.atoms()) max_mass = std::max(max_mass, a.mass.mid_double());
  CHECK(drift.back() <= 2 * max_mass + 1e-9);
  CHECK(drift.back() < drift.front());
}

TEST_CASE("rotation number of the built map") {
  RotationEstimate r = rotation_number_estimate(small().desc, 0.2, 2000);
  CHECK(r.within);
  CHECK(r.estimate == doctest::Approx(0.6180339887).epsilon(1e-3));
  RotationEstimate r2 = rotation_number_estimate(small().desc, 0.77, 2000);
  CHECK(std::abs(r.estimate - r2.estimate) <= 2 * r.bound);
}

TEST_CASE("pushforward of Lebesgue matches the atoms") {
  const auto& s = small();
  double max_mass = 0;
  for (const auto& a : s.mu.atoms()) max_mass = std::max(max_mass, a.mass.mid_double());
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> U(0, 1);
  for (int t = 0; t < 100; ++t) {
    double a = U(rng), b = U(rng);
    if (b < a) std::swap(a, b);
    double leb = d(s.desc.h_inverse(s.desc.make(b))) - d(s.desc.h_inverse(s.desc.make(a)));
    double atoms = 0;
    for (const auto& at : s.mu.atoms()) {
      double loc = at.location.mid_double();
      if (loc >= a && loc < b) atoms += at.mass.mid_double();
    }
    CHECK(std::abs(leb - atoms) <= 2 * max_mass + 1e-9);
  }
}

TEST_CASE("derivative of F matches exp(phi o h)") {
  const auto& s = small();
  DerivativeStudy st = derivative_study(s.desc, s.stack, 64, std::ldexp(1.0, -30));
  CHECK(st.max_gap < 0.05);
  CHECK(st.min_predicted >= std::exp(-3.0));
  CHECK(st.integral == doctest::Approx(1).epsilon(0.05));
  DerivativeSample one = F_derivative_check(s.desc, s.stack, 0.5, std::ldexp(1.0, -30));
  CHECK(one.predicted.certainly_positive());
}

TEST_CASE("fundamental domain images are disjoint and carry the block masses") {
  const auto& s = small();
  FundamentalDomainReport r = fundamental_domain_report(s.desc, s.mu, s.stack, 4, 24);
  CHECK(r.preimages_disjoint);
  CHECK(r.images_disjoint);
  CHECK(mpfr_sgn(r.min_image_gap.get()) > 0);
  CHECK(r.max_weight_ratio <= std::exp(3.0));

  FundamentalDomainReport r0 = fundamental_domain_report(s.desc, s.mu, s.stack, 0, 24);
  CHECK(r0.lebesgue_of_union == doctest::Approx(s.mu.block_mass(0).mid_double()).epsilon(1e-6));
  double prev = 0;
  for (long I = 0; I <= 8; ++I) {
    double sum = fundamental_domain_report(s.desc, s.mu, s.stack, I, 24).block_sum.mid_double();
    CHECK(sum >= prev);
    prev = sum;
  }
  CHECK(s.mu.coverage().lo().to_double() > 0.99);
}

TEST_CASE("budgets and preconditions") {
  const auto& s = small();
  try {
    assemble_mu(s.stack, 8, 4, 100);
    FAIL("budget ignored");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BudgetExceeded);
  }
  CHECK_THROWS_AS(assemble_mu(s.stack, 8, 6), Error);  // sequence ends at q_6
  CHECK_THROWS_AS(fundamental_domain_report(s.desc, s.mu, s.stack, 9, 24), Error);
}

TEST_CASE("reload from stored masses reproduces the descriptor") {
  const auto& s = small();
  std::vector<std::pair<long, std::uint32_t>> ids;
  std::vector<Interval> masses;
  for (const auto& a : s.mu.atoms()) {
    ids.emplace_back(a.block, a.cylinder);
    masses.push_back(a.mass);
  }
  WeightedAtomMeasure back = WeightedAtomMeasure::from_masses(s.stack, 8, 4, s.mu.normalizer(), ids, masses);
  ConjugacyDescriptor desc(back, Alpha::golden());
  REQUIRE(desc.pieces() == s.desc.pieces());
  for (std::size_t j = 0; j < desc.breakpoints_x().size(); ++j) {
    CHECK(desc.breakpoints_x()[j] == s.desc.breakpoints_x()[j]);
    CHECK(desc.breakpoints_y()[j] == s.desc.breakpoints_y()[j]);
  }
}
