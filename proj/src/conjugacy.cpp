#include "fundom/conjugacy.hpp"

#include "fundom/error.hpp"

#include <algorithm>
#include <cmath>

namespace fundom {

namespace {

BigFloat bf(Prec prec) { return BigFloat(prec); }

BigFloat add(const BigFloat& a, const BigFloat& b, Prec prec) {
  BigFloat r = bf(prec);
  mpfr_add(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}

BigFloat sub(const BigFloat& a, const BigFloat& b, Prec prec) {
  BigFloat r = bf(prec);
  mpfr_sub(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}

BigFloat mul(const BigFloat& a, const BigFloat& b, Prec prec) {
  BigFloat r = bf(prec);
  mpfr_mul(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}

BigFloat div(const BigFloat& a, const BigFloat& b, Prec prec) {
  BigFloat r = bf(prec);
  mpfr_div(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}

BigFloat floor_of(const BigFloat& a) {
  BigFloat r = bf(a.prec());
  mpfr_floor(r.get(), a.get());
  return r;
}

Prec position_prec_for(const mpq_class& len) {
  mpz_class inv;
  mpz_cdiv_q(inv.get_mpz_t(), len.get_den_mpz_t(), len.get_num_mpz_t());
  return static_cast<Prec>(mpz_sizeinbase(inv.get_mpz_t(), 2)) + 128;
}

Interval location_of(const mpq_class& left, const Interval& alpha, long i) {
  return CirclePoint(Interval::from_rational(left, alpha.prec()) + alpha.scaled(i)).rep();
}

}  // namespace

// --------------------------------------------------------- atom measure --

Interval WeightedAtomMeasure::total_mass() const {
  Interval sum = Interval::from_long(0, kDefaultPrec);
  for (const auto& b : block_mass_) sum += b;
  return sum;
}

Interval WeightedAtomMeasure::coverage() const {
  Interval one = Interval::from_long(1, all_level_tail_.prec());
  return one / (one + all_level_tail_);
}

void WeightedAtomMeasure::finish(const CocycleStack& stack) {
  (void)stack;
  block_mass_.assign(static_cast<std::size_t>(2 * radius_ + 1), Interval::from_long(0, kDefaultPrec));
  for (const auto& a : atoms_) block_mass_[static_cast<std::size_t>(a.block + radius_)] += a.mass;
  std::sort(atoms_.begin(), atoms_.end(),
            [](const Atom& a, const Atom& b) { return a.location.lo() < b.location.lo(); });
  block_tail_ = block_tail_bound(radius_);
  all_level_tail_ = all_level_tail_bound(radius_);
}

namespace {

struct Positions {
  Prec prec;
  mpq_class len;
  CantorCover cover;
  Interval alpha;
};

Positions positions_for(const CocycleStack& stack, std::size_t depth) {
  TailBound t = tail(stack.sequence(), depth);
  if (sgn(t.lo) <= 0)
    throw Error(ErrorCode::InvalidArgument, "digit sequence too short for depth " + std::to_string(depth));
  Prec prec = position_prec_for(t.lo);
  return Positions{prec, t.lo, CantorCover(stack.sequence(), depth), stack.alpha().interval(prec)};
}

}  // namespace

WeightedAtomMeasure assemble_mu(const CocycleStack& stack, long radius, std::size_t depth, std::size_t max_atoms) {
  if (radius < 0) throw Error(ErrorCode::InvalidArgument, "radius must be >= 0");
  if (depth > 24) throw Error(ErrorCode::BudgetExceeded, "depth above 24");
  const std::size_t count = static_cast<std::size_t>(2 * radius + 1) << depth;
  if (count > max_atoms)
    throw Error(ErrorCode::BudgetExceeded, "atom count " + std::to_string(count) + " exceeds budget");
  Positions pos = positions_for(stack, depth);

  WeightedAtomMeasure mu;
  mu.radius_ = radius;
  mu.depth_ = depth;
  mu.position_prec_ = pos.prec;
  mu.arc_length_ = pos.len;
  mu.atoms_.reserve(count);

  const Prec prec = stack.prec();
  std::vector<Interval> raw;
  raw.reserve(count);
  Interval z = Interval::from_long(0, prec);
  for (std::size_t k = 0; k < pos.cover.size(); ++k) {
    const mpq_class& left = pos.cover.left(k);
    std::vector<Interval> sums = birkhoff_range(stack, CirclePoint::from_rational(left, prec), radius);
    for (long i = -radius; i <= radius; ++i) {
      Interval u = exp(sums[static_cast<std::size_t>(i + radius)]).mul_2si(-static_cast<long>(depth));
      z += u;
      raw.push_back(u);
      Atom a;
      a.block = i;
      a.cylinder = static_cast<std::uint32_t>(k);
      a.location = location_of(left, pos.alpha, i);
      mu.atoms_.push_back(std::move(a));
    }
  }
  for (std::size_t j = 0; j < raw.size(); ++j) mu.atoms_[j].mass = raw[j] / z;
  mu.normalizer_ = z;
  mu.finish(stack);
  return mu;
}

WeightedAtomMeasure WeightedAtomMeasure::from_masses(const CocycleStack& stack, long radius, std::size_t depth,
                                                     const Interval& normalizer,
                                                     std::vector<std::pair<long, std::uint32_t>> ids,
                                                     std::vector<Interval> masses) {
  if (ids.size() != masses.size()) throw Error(ErrorCode::ParseError, "atom ids and masses differ in length");
  Positions pos = positions_for(stack, depth);
  WeightedAtomMeasure mu;
  mu.radius_ = radius;
  mu.depth_ = depth;
  mu.position_prec_ = pos.prec;
  mu.arc_length_ = pos.len;
  mu.normalizer_ = normalizer;
  for (std::size_t j = 0; j < ids.size(); ++j) {
    auto [i, k] = ids[j];
    if (i < -radius || i > radius || k >= pos.cover.size())
      throw Error(ErrorCode::ParseError, "atom index out of range");
    Atom a;
    a.block = i;
    a.cylinder = k;
    a.location = location_of(pos.cover.left(k), pos.alpha, i);
    a.mass = std::move(masses[j]);
    mu.atoms_.push_back(std::move(a));
  }
  mu.finish(stack);
  return mu;
}

// ----------------------------------------------------------- descriptor --

ConjugacyDescriptor::ConjugacyDescriptor(const WeightedAtomMeasure& mu, const Alpha& alpha, long gap_weight_log2,
                                         long tolerance_log2)
    : prec_(mu.position_prec()), alpha_(alpha.interval(prec_).mid()), tolerance_(1, prec_), arc_length_(prec_) {
  if (gap_weight_log2 >= 0) throw Error(ErrorCode::InvalidArgument, "gap weight must be below 1");
  mpfr_mul_2si(tolerance_.get(), tolerance_.get(), tolerance_log2, MPFR_RNDN);
  mpfr_set_q(arc_length_.get(), mu.arc_length().get_mpq_t(), MPFR_RNDN);
  const Prec p = prec_;
  BigFloat one(1, p);
  BigFloat eta(1, p);
  mpfr_mul_2si(eta.get(), eta.get(), gap_weight_log2, MPFR_RNDN);
  BigFloat atom_weight = sub(one, eta, p);

  struct Segment {
    BigFloat start, end, mass;
  };
  std::vector<Segment> segs;
  BigFloat total(0, p);
  for (const auto& a : mu.atoms()) {
    // Negative masses (only from a corrupted descriptor) are dropped here and
    // reported by the normalization check.
    BigFloat m = a.mass.with_prec(p).mid();
    if (mpfr_sgn(m.get()) < 0) mpfr_set_zero(m.get(), 1);
    total = add(total, m, p);
    BigFloat s = a.location.mid();
    if (s.prec() != p) {
      BigFloat t = bf(p);
      mpfr_set(t.get(), s.get(), MPFR_RNDN);
      s = std::move(t);
    }
    atom_left_.push_back(s);
    BigFloat e = add(s, arc_length_, p);
    if (one < e) {
      // Arc crosses 0: split the mass in proportion to length.
      BigFloat first = sub(one, s, p);
      BigFloat m1 = div(mul(m, first, p), arc_length_, p);
      segs.push_back({s, one, m1});
      segs.push_back({BigFloat(0, p), sub(e, one, p), sub(m, m1, p)});
    } else {
      segs.push_back({s, e, m});
    }
  }
  std::sort(segs.begin(), segs.end(), [](const Segment& a, const Segment& b) { return a.start < b.start; });
  for (std::size_t j = 1; j < segs.size(); ++j)
    if (segs[j].start < segs[j - 1].end)
      throw Error(ErrorCode::DisjointnessUndecided, "atom arcs overlap; increase depth");

  BigFloat cursor(0, p), x(0, p);
  ys_.push_back(cursor);
  xs_.push_back(x);
  for (const auto& s : segs) {
    if (cursor < s.start) {
      x = add(x, mul(eta, sub(s.start, cursor, p), p), p);
      ys_.push_back(s.start);
      xs_.push_back(x);
    }
    BigFloat w = add(div(mul(atom_weight, s.mass, p), total, p), mul(eta, sub(s.end, s.start, p), p), p);
    x = add(x, w, p);
    ys_.push_back(s.end);
    xs_.push_back(x);
    cursor = s.end;
  }
  if (cursor < one) {
    x = add(x, mul(eta, sub(one, cursor, p), p), p);
    ys_.push_back(one);
    xs_.push_back(x);
  }
  for (auto& v : xs_) v = div(v, x, p);
  xs_.back() = one;
  for (std::size_t j = 1; j < xs_.size(); ++j)
    if (!(xs_[j - 1] < xs_[j])) throw Error(ErrorCode::PrecisionExhausted, "descriptor breakpoints not increasing");
}

BigFloat ConjugacyDescriptor::make(double v) const {
  BigFloat r = bf(prec_);
  mpfr_set_d(r.get(), v, MPFR_RNDN);
  return r;
}

std::size_t ConjugacyDescriptor::piece_for_y(const BigFloat& y) const {
  auto it = std::upper_bound(ys_.begin(), ys_.end(), y);
  std::size_t i = it == ys_.begin() ? 0 : static_cast<std::size_t>(it - ys_.begin()) - 1;
  return std::min(i, pieces() - 1);
}

BigFloat ConjugacyDescriptor::h_inverse(const BigFloat& y) const {
  const Prec p = prec_;
  std::size_t i = piece_for_y(y);
  BigFloat slope = div(sub(xs_[i + 1], xs_[i], p), sub(ys_[i + 1], ys_[i], p), p);
  return add(xs_[i], mul(sub(y, ys_[i], p), slope, p), p);
}

BigFloat ConjugacyDescriptor::h_inverse_lift(const BigFloat& y) const {
  BigFloat n = floor_of(y);
  return add(n, h_inverse(sub(y, n, prec_)), prec_);
}

BigFloat ConjugacyDescriptor::h(const BigFloat& x) const {
  const Prec p = prec_;
  auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  std::size_t i = it == xs_.begin() ? 0 : static_cast<std::size_t>(it - xs_.begin()) - 1;
  i = std::min(i, pieces() - 1);
  BigFloat slope = div(sub(ys_[i + 1], ys_[i], p), sub(xs_[i + 1], xs_[i], p), p);
  BigFloat y = add(ys_[i], mul(sub(x, xs_[i], p), slope, p), p);
  BigFloat r = sub(h_inverse(y), x, p);
  mpfr_abs(r.get(), r.get(), MPFR_RNDN);
  if (tolerance_ < r) throw Error(ErrorCode::ToleranceNotMet, "quantile residual above tolerance");
  return y;
}

BigFloat ConjugacyDescriptor::h_lift(const BigFloat& x) const {
  BigFloat n = floor_of(x);
  return add(n, h(sub(x, n, prec_)), prec_);
}

BigFloat ConjugacyDescriptor::F_lift(const BigFloat& x) const {
  return h_inverse_lift(add(h_lift(x), alpha_, prec_));
}

BigFloat ConjugacyDescriptor::F(const BigFloat& x) const {
  BigFloat v = F_lift(x);
  return sub(v, floor_of(v), prec_);
}

std::pair<BigFloat, BigFloat> ConjugacyDescriptor::atom_image(std::size_t j) const {
  const BigFloat& s = atom_left_.at(j);
  return {h_inverse(s), h_inverse_lift(add(s, arc_length_, prec_))};
}

// ---------------------------------------------------------- diagnostics --

DerivativeSample F_derivative_check(const ConjugacyDescriptor& desc, const CocycleStack& stack, double x,
                                    double step) {
  const Prec p = desc.prec();
  BigFloat xb = desc.make(x), sb = desc.make(step);
  BigFloat diff = sub(desc.F_lift(add(xb, sb, p)), desc.F_lift(sub(xb, sb, p)), p);
  mpfr_div_d(diff.get(), diff.get(), 2 * step, MPFR_RNDN);

  BigFloat y = desc.h(xb);
  Interval yi = Interval(y, y).with_prec(stack.prec());
  DerivativeSample s;
  s.x = x;
  s.finite_difference = diff.to_double();
  s.predicted = exp(phi_truncated(stack, CirclePoint(yi)));
  s.gap = std::abs(s.finite_difference - s.predicted.mid_double());
  return s;
}

DerivativeStudy derivative_study(const ConjugacyDescriptor& desc, const CocycleStack& stack, std::size_t grid,
                                 double step) {
  if (grid == 0) throw Error(ErrorCode::InvalidArgument, "grid must be positive");
  DerivativeStudy st;
  st.min_predicted = INFINITY;
  double gap_sum = 0, integral = 0;
  for (std::size_t j = 0; j < grid; ++j) {
    double x = (static_cast<double>(j) + 0.5) / static_cast<double>(grid);
    DerivativeSample s = F_derivative_check(desc, stack, x, step);
    st.max_gap = std::max(st.max_gap, s.gap);
    gap_sum += s.gap;
    double pv = s.predicted.mid_double();
    integral += pv;
    st.min_predicted = std::min(st.min_predicted, pv);
    st.samples.push_back(std::move(s));
  }
  st.mean_gap = gap_sum / static_cast<double>(grid);
  st.integral = integral / static_cast<double>(grid);
  return st;
}

FundamentalDomainReport fundamental_domain_report(const ConjugacyDescriptor& desc, const WeightedAtomMeasure& mu,
                                                  const CocycleStack& stack, long images, std::size_t d_max) {
  if (images < 0 || images > mu.radius())
    throw Error(ErrorCode::InvalidArgument, "image range must lie within the measure radius");
  const Prec p = desc.prec();
  FundamentalDomainReport r;
  r.images = images;
  if (images == 0) {
    r.preimages_disjoint = true;
  } else try {
    TranslateSeparation sep = separate_translates(stack.sequence(), stack.alpha(), -images, images, d_max);
    r.preimage_depth = sep.depth;
    r.preimages_disjoint = sep.depth <= mu.depth();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DisjointnessUndecided) throw;
  }

  std::vector<std::pair<BigFloat, BigFloat>> xs;
  BigFloat one(1, p);
  double leb = 0;
  for (std::size_t j = 0; j < mu.atoms().size(); ++j) {
    long i = mu.atoms()[j].block;
    if (i < -images || i > images) continue;
    auto [a, b] = desc.atom_image(j);
    leb += sub(b, a, p).to_double();
    if (one < b) {
      xs.emplace_back(a, one);
      xs.emplace_back(BigFloat(0, p), sub(b, one, p));
    } else {
      xs.emplace_back(std::move(a), std::move(b));
    }
  }
  std::sort(xs.begin(), xs.end(), [](const auto& u, const auto& v) { return u.first < v.first; });
  r.images_disjoint = true;
  r.min_image_gap = one;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    BigFloat gap = j + 1 < xs.size() ? sub(xs[j + 1].first, xs[j].second, p)
                                     : sub(add(one, xs[0].first, p), xs[j].second, p);
    if (xs.size() == 1) break;
    if (mpfr_sgn(gap.get()) < 0) r.images_disjoint = false;
    if (gap < r.min_image_gap) r.min_image_gap = gap;
  }
  r.lebesgue_of_union = leb;

  r.block_sum = Interval::from_long(0, kDefaultPrec);
  for (long i = -images; i <= images; ++i) r.block_sum += mu.block_mass(i);
  r.coverage = mu.coverage();
  r.tail_all_level = mu.all_level_tail();
  r.tail_block = mu.block_tail();
  for (long i = -images; i < images; ++i) {
    double a = mu.block_mass(i).mid_double(), b = mu.block_mass(i + 1).mid_double();
    r.max_weight_ratio = std::max({r.max_weight_ratio, b / a, a / b});
  }
  return r;
}

RotationEstimate rotation_number_estimate(const ConjugacyDescriptor& desc, double x0, std::size_t iters) {
  if (iters == 0) throw Error(ErrorCode::InvalidArgument, "iteration count must be positive");
  const Prec p = desc.prec();
  BigFloat start = desc.make(x0);
  BigFloat v = start;
  for (std::size_t n = 0; n < iters; ++n) v = desc.F_lift(v);
  BigFloat est = sub(v, start, p);
  mpfr_div_ui(est.get(), est.get(), iters, MPFR_RNDN);
  RotationEstimate r;
  r.estimate = est.to_double();
  r.alpha = Interval(desc.alpha(), desc.alpha()).with_prec(kDefaultPrec);
  r.bound = 1.0 / static_cast<double>(iters);
  r.error = std::abs(sub(est, desc.alpha(), p).to_double());
  r.within = r.error <= r.bound;
  return r;
}

}  // namespace fundom
