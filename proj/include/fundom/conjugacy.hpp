#pragma once

// Finite approximation of the quasi-invariant measure
//   mu~ = sum_i (exp o phi^(i) o R^-i) R^i_* mu0,
// the conjugacy h with h_* Leb = mu, and the diffeomorphism F = h^-1 R h.
//
// mu0 is discretized by cylinders of depth d. Cylinder k of block i sits on
// the arc R^i [L_k, L_k + tail(d)] and carries exp(phi^(i)(L_k)) 2^-d, where
// L_k is the left end of the cylinder (a point of C). The descriptor spreads
// each such mass uniformly over its arc and gives the remaining circle a
// uniform density of total eta, so h^-1 is a strictly increasing
// piecewise-linear homeomorphism at every truncation.

#include "fundom/cocycle.hpp"
#include "fundom/numerics.hpp"

#include <cstdint>
#include <vector>

namespace fundom {

struct Atom {
  long block = 0;           // i
  std::uint32_t cylinder = 0;  // k
  Interval location;        // R^i L_k, representative in [0, 1)
  Interval mass;            // normalized by Z
};

class WeightedAtomMeasure {
 public:
  long radius() const { return radius_; }
  std::size_t depth() const { return depth_; }
  Prec position_prec() const { return position_prec_; }
  const std::vector<Atom>& atoms() const { return atoms_; }  // sorted by location
  const Interval& normalizer() const { return normalizer_; }
  const mpq_class& arc_length() const { return arc_length_; }

  // a_i = mass of block i (normalized by Z), i = -radius..radius.
  const Interval& block_mass(long i) const { return block_mass_.at(static_cast<std::size_t>(i + radius_)); }
  // Enclosure of sum of all normalized masses.
  Interval total_mass() const;
  // Bounds, relative to the unnormalized measure, on the mass carried by |i| > radius.
  const Interval& block_tail() const { return block_tail_; }
  const Interval& all_level_tail() const { return all_level_tail_; }
  // Lower bound on the fraction of the untruncated measure captured by
  // |i| <= radius: 1 / (1 + all_level_tail), since the i = 0 term is 1 on C.
  Interval coverage() const;

  // Rebuilds a measure from stored masses (descriptor reload); positions are
  // recomputed from (i, k), the digit sequence and alpha.
  static WeightedAtomMeasure from_masses(const CocycleStack& stack, long radius, std::size_t depth,
                                         const Interval& normalizer, std::vector<std::pair<long, std::uint32_t>> ids,
                                         std::vector<Interval> masses);

  friend WeightedAtomMeasure assemble_mu(const CocycleStack& stack, long radius, std::size_t depth,
                                         std::size_t max_atoms);

 private:
  void finish(const CocycleStack& stack);

  long radius_ = 0;
  std::size_t depth_ = 0;
  Prec position_prec_ = kDefaultPrec;
  mpq_class arc_length_;
  std::vector<Atom> atoms_;
  Interval normalizer_;
  std::vector<Interval> block_mass_;
  Interval block_tail_, all_level_tail_;
};

// (2 radius + 1) 2^depth atoms. Requires the digit sequence to reach index
// depth + 1 so that cylinder arcs have a positive certified length.
WeightedAtomMeasure assemble_mu(const CocycleStack& stack, long radius, std::size_t depth,
                                std::size_t max_atoms = std::size_t{1} << 20);

inline constexpr long kDefaultGapWeightLog2 = -30;  // eta = 2^-30
inline constexpr long kDefaultToleranceLog2 = -40;

class ConjugacyDescriptor {
 public:
  ConjugacyDescriptor(const WeightedAtomMeasure& mu, const Alpha& alpha, long gap_weight_log2 = kDefaultGapWeightLog2,
                      long tolerance_log2 = kDefaultToleranceLog2);

  Prec prec() const { return prec_; }
  const BigFloat& alpha() const { return alpha_; }
  std::size_t pieces() const { return ys_.size() - 1; }
  const std::vector<BigFloat>& breakpoints_y() const { return ys_; }
  const std::vector<BigFloat>& breakpoints_x() const { return xs_; }

  // h^-1 = mu[0, y] on [0, 1) and its lift (degree one).
  BigFloat h_inverse(const BigFloat& y) const;
  BigFloat h_inverse_lift(const BigFloat& y) const;
  // h = quantile of mu; throws ToleranceNotMet if the inverse misses by more
  // than the tolerance.
  BigFloat h(const BigFloat& x) const;
  BigFloat h_lift(const BigFloat& x) const;
  // Lift of F = h^-1 R h.
  BigFloat F_lift(const BigFloat& x) const;
  BigFloat F(const BigFloat& x) const;  // in [0, 1)

  // x-interval [h^-1(a), h^-1(a + len)] of the arc of atom j (index into mu.atoms()).
  std::pair<BigFloat, BigFloat> atom_image(std::size_t j) const;

  BigFloat make(double v) const;

 private:
  std::size_t piece_for_y(const BigFloat& y) const;

  Prec prec_;
  BigFloat alpha_;
  BigFloat tolerance_;
  BigFloat arc_length_;
  std::vector<BigFloat> ys_, xs_;     // breakpoints, ys_[0] = 0, ys_.back() = 1
  std::vector<BigFloat> atom_left_;   // arc start of atom j
};

struct DerivativeSample {
  double x = 0;
  double finite_difference = 0;
  Interval predicted;  // exp(phi(h(x)))
  double gap = 0;
};

// Symmetric finite difference of F against exp(phi_truncated(h(x))), the
// density ratio dR^-1_* mu / d mu evaluated at h(x).
DerivativeSample F_derivative_check(const ConjugacyDescriptor& desc, const CocycleStack& stack, double x,
                                    double step);

struct DerivativeStudy {
  std::vector<DerivativeSample> samples;
  double max_gap = 0;
  double mean_gap = 0;
  double integral = 0;  // midpoint rule for int_0^1 exp(phi(h(x))) dx
  double min_predicted = 0;
};

// Grid x_j = (j + 1/2) / grid, j < grid.
DerivativeStudy derivative_study(const ConjugacyDescriptor& desc, const CocycleStack& stack, std::size_t grid,
                                 double step);

struct FundamentalDomainReport {
  long images = 0;                  // |i| <= images
  bool preimages_disjoint = false;  // R^i cover(d) certified disjoint
  std::size_t preimage_depth = 0;
  bool images_disjoint = false;     // x-intervals of F^i C'_d pairwise disjoint
  BigFloat min_image_gap;
  Interval block_sum;               // sum_{|i| <= images} a_i
  double lebesgue_of_union = 0;     // Leb(union F^i C'_d) in the descriptor
  Interval coverage;                // lower bound vs the untruncated measure
  Interval tail_all_level, tail_block;
  double max_weight_ratio = 0;      // max over i of a_{i+1}/a_i and its inverse
};

FundamentalDomainReport fundamental_domain_report(const ConjugacyDescriptor& desc, const WeightedAtomMeasure& mu,
                                                  const CocycleStack& stack, long images, std::size_t d_max);

struct RotationEstimate {
  double estimate = 0;
  Interval alpha;
  double bound = 0;  // 1 / iters
  double error = 0;  // |estimate - alpha.mid|
  bool within = false;
};

RotationEstimate rotation_number_estimate(const ConjugacyDescriptor& desc, double x0, std::size_t iters);

}  // namespace fundom
