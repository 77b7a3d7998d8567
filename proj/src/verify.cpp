#include "fundom/error.hpp"
#include "fundom/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>

namespace fundom {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

struct Recorder {
  std::vector<CheckResult>& out;

  // Runs `body`, which fills `measured` and returns pass/fail. Errors from
  // undecidable comparisons become `undecided`, any other error `fail`.
  void run(const std::string& name, const std::function<bool(std::map<std::string, std::string>&)>& body) {
    CheckResult r;
    r.name = name;
    auto t0 = std::chrono::steady_clock::now();
    try {
      r.status = body(r.measured) ? CheckStatus::pass : CheckStatus::fail;
    } catch (const Error& e) {
      r.measured["exception"] = std::string(to_string(e.code())) + ": " + e.what();
      bool undecided = e.code() == ErrorCode::DisjointnessUndecided || e.code() == ErrorCode::PrecisionExhausted ||
                       e.code() == ErrorCode::NotCertifiable;
      r.status = undecided ? CheckStatus::undecided : CheckStatus::fail;
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(r));
  }
};

// Left ends of randomly chosen depth-d cylinders: exact points of C.
std::vector<mpq_class> sample_points(const Construction& c) {
  CantorCover cov(c.sequence, c.config.d);
  std::mt19937_64 rng(c.config.seed);
  std::vector<mpq_class> pts;
  for (std::size_t s = 0; s < c.config.samples; ++s) pts.push_back(cov.left(rng() % cov.size()));
  return pts;
}

// dist(x, (1/q)Z) for rational x, exact.
mpq_class grid_dist(const mpq_class& x, const mpz_class& q) {
  mpq_class t = x * q;
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), t.get_num_mpz_t(), t.get_den_mpz_t());
  mpq_class f = t - fl;
  mpq_class g = 1 - f;
  return (f < g ? f : g) / q;
}

// --------------------------------------------------------------- suites --

void suite_disjointness(const Construction& c, Recorder& rec) {
  rec.run("disjointness.translates", [&](auto& m) {
    DisjointnessReport r =
        verify_translate_disjointness(c.sequence, c.alpha, c.config.claim_range, c.config.d_max, c.config.ladder);
    bool ok = mpfr_sgn(r.min_gap.get()) > 0 && r.max_depth <= c.config.d_max;
    m["range"] = std::to_string(r.range);
    m["pairs"] = std::to_string(r.pairs.size());
    m["max_depth"] = std::to_string(r.max_depth);
    m["min_gap"] = num(r.min_gap.to_double(MPFR_RNDD));
    return ok;
  });

  ApproximationProfile profile(c.alpha);
  rec.run("disjointness.digit_conditions", [&](auto& m) {
    DigitConditionCheck chk = check_digit_conditions(c.sequence, profile);
    m["terms"] = std::to_string(c.sequence.last_index());
    m["q0_is_one"] = chk.q0_is_one ? "true" : "false";
    m["divisibility"] = chk.divisibility ? "true" : "false";
    m["ratio_third"] = chk.ratio_third ? "true" : "false";
    m["approximation"] = chk.approximation ? "true" : "false";
    if (!chk.all()) m["first_failure"] = std::to_string(chk.first_failure);
    return chk.all();
  });

  rec.run("disjointness.multiples_approximation", [&](auto& m) {
    // p(q) dist(m alpha, (1/q)Z) >= 1 for m = 1..8, m <= q <= 200.
    double worst = INFINITY;
    std::size_t checked = 0;
    for (long mm = 1; mm <= 8; ++mm) {
      for (long q = mm; q <= 200; ++q) {
        mpz_class p = profile.p(q);
        bool decided = false;
        for (Prec prec : c.config.ladder) {
          Interval v = dist_to_grid(c.alpha.interval(prec).scaled(mm), mpz_class(q)) * Interval::from_integer(p, prec);
          if (mpfr_cmp_ui(v.lo().get(), 1) >= 0) {
            worst = std::min(worst, v.lo().to_double(MPFR_RNDD));
            decided = true;
            break;
          }
          if (mpfr_cmp_ui(v.hi().get(), 1) < 0) {
            m["violation"] = "m=" + std::to_string(mm) + " q=" + std::to_string(q);
            return false;
          }
        }
        if (!decided) throw Error(ErrorCode::PrecisionExhausted, "undecided at q = " + std::to_string(q));
        ++checked;
      }
    }
    m["pairs"] = std::to_string(checked);
    m["min_product"] = num(worst);
    return true;
  });

  rec.run("disjointness.difference_set_approximation", [&](auto& m) {
    // p(q_i) dist(beta, (1/q_i)Z) <= 3/2^(i+1) for beta in C - C, digits truncated at q_N.
    std::mt19937_64 rng(c.config.seed + 1);
    const std::size_t N = c.sequence.last_index();
    const std::size_t top = std::min<std::size_t>(4, N - 1);
    double worst_ratio = 0;
    for (int s = 0; s < 20; ++s) {
      std::vector<int> digits(N);
      for (auto& e : digits) e = static_cast<int>(rng() % 3) - 1;
      mpq_class beta = partial_sum(c.sequence, digits);
      for (std::size_t i = 1; i <= top; ++i) {
        mpq_class lhs = profile.p(c.sequence.q[i]) * grid_dist(beta, c.sequence.q[i]);
        mpq_class bound(3, 1);
        bound /= mpz_class(1) << static_cast<unsigned long>(i + 1);
        if (lhs > bound) {
          m["violation"] = "sample " + std::to_string(s) + " i=" + std::to_string(i);
          return false;
        }
        worst_ratio = std::max(worst_ratio, mpq_class(lhs / bound).get_d());
      }
    }
    m["codes"] = "20";
    m["levels"] = std::to_string(top);
    m["max_ratio_to_bound"] = num(worst_ratio);
    return true;
  });
}

void suite_lemma(const Construction& c, Recorder& rec, const std::vector<mpq_class>& pts) {
  const CocycleStack& st = c.stack;
  const Prec prec = st.prec();
  rec.run("lemma.equality", [&](auto& m) {
    double max_err = 0, max_width = 0;
    bool ok = true;
    std::size_t evals = 0;
    for (const auto& x0 : pts) {
      CirclePoint x = CirclePoint::from_rational(x0, prec);
      for (const auto& lv : st.levels()) {
        const long half = lv.translate_count();
        const mpq_class a = lv.amplitude();
        for (int dir : {1, -1}) {
          Interval sum = Interval::from_long(0, prec);
          for (long i = 1; i <= half; ++i) {
            if (dir > 0) sum += bump_value(lv, st.alpha_interval(), st.rotate(x, i - 1));
            else sum -= bump_value(lv, st.alpha_interval(), st.rotate(x, -i));
            mpq_class expect = -a * i;
            ++evals;
            ok = ok && sum.contains(expect) && sum.width() <= 1e-9;
            max_width = std::max(max_width, sum.width());
            max_err = std::max(max_err, std::abs(sum.mid_double() - expect.get_d()));
          }
        }
      }
    }
    m["samples"] = std::to_string(pts.size());
    m["evaluations"] = std::to_string(evals);
    m["max_abs_error"] = num(max_err);
    m["max_width"] = num(max_width);
    return ok;
  });

  rec.run("lemma.decay", [&](auto& m) {
    // Levels above n_max contribute -|i|(3/4)^m <= 0 on C when |i| <= 2^m,
    // so only the interval width enters the slack.
    const long top = std::min<long>(3, static_cast<long>(st.n_max()) - 1);
    const long radius = (1L << (top + 1)) - 1;
    double worst_margin = -INFINITY, worst_slack_ratio = 0;
    bool ok = true;
    for (const auto& x0 : pts) {
      auto sums = birkhoff_range(st, CirclePoint::from_rational(x0, prec), radius);
      for (long n = 0; n <= top; ++n) {
        double bound = -0.75 * std::pow(1.5, static_cast<double>(n));
        for (long ai = 1L << n; ai < (1L << (n + 1)); ++ai) {
          for (long i : {ai, -ai}) {
            const Interval& v = sums[static_cast<std::size_t>(i + radius)];
            double slack = v.width();
            double hi = v.hi().to_double(MPFR_RNDU);
            ok = ok && hi <= bound + slack && slack < 0.1 * std::abs(bound);
            worst_margin = std::max(worst_margin, hi - bound);
            worst_slack_ratio = std::max(worst_slack_ratio, slack / std::abs(bound));
          }
        }
      }
    }
    m["levels"] = std::to_string(top + 1);
    m["max_value_minus_bound"] = num(worst_margin);
    m["max_slack_over_bound"] = num(worst_slack_ratio);
    return ok;
  });
}

void suite_summability(const Construction& c, Recorder& rec, const std::vector<mpq_class>& pts) {
  rec.run("summability.bound", [&](auto& m) {
    Interval M = bound_M();
    double worst = 0;
    bool ok = true;
    for (const auto& x0 : pts) {
      auto sums = birkhoff_range(c.stack, CirclePoint::from_rational(x0, c.stack.prec()), c.config.I_max);
      Interval s = Interval::from_long(0, c.stack.prec());
      for (const auto& v : sums) s += exp(v);
      ok = ok && s.hi() <= M.hi();
      worst = std::max(worst, s.hi().to_double(MPFR_RNDU));
    }
    m["radius"] = std::to_string(c.config.I_max);
    m["M_lo"] = num(M.lo().to_double(MPFR_RNDD));
    m["M_hi"] = num(M.hi().to_double(MPFR_RNDU));
    m["max_sum"] = num(worst);
    return ok;
  });

  rec.run("summability.tail", [&](auto& m) {
    Interval block = block_tail_bound(c.config.I_max);
    Interval all = all_level_tail_bound(c.config.I_max);
    m["block_tail"] = num(block.hi().to_double(MPFR_RNDU));
    m["all_level_tail"] = num(all.hi().to_double(MPFR_RNDU));
    return all.hi() <= block.hi();
  });
}

void suite_conjugacy(const Construction& c, Recorder& rec) {
  const auto& desc = c.descriptor;
  const auto& mu = c.measure;
  const double eps = std::ldexp(1.0, static_cast<int>(c.config.tolerance_log2));

  rec.run("conjugacy.normalization", [&](auto& m) {
    bool positive = std::all_of(mu.atoms().begin(), mu.atoms().end(),
                                [](const Atom& a) { return a.mass.certainly_positive(); });
    Interval total = mu.total_mass();
    double dev = std::max(std::abs(total.lo().to_double(MPFR_RNDD) - 1), std::abs(total.hi().to_double(MPFR_RNDU) - 1));
    m["atoms"] = std::to_string(mu.atoms().size());
    m["all_positive"] = positive ? "true" : "false";
    m["total_deviation"] = num(dev);
    return positive && dev <= eps;
  });

  rec.run("conjugacy.monotone", [&](auto& m) {
    const auto& ys = desc.breakpoints_y();
    const auto& xs = desc.breakpoints_x();
    bool inc = true;
    for (std::size_t j = 1; j < ys.size(); ++j) inc = inc && ys[j - 1] < ys[j] && xs[j - 1] < xs[j];
    bool zero = mpfr_zero_p(desc.h(desc.make(0)).get());
    double max_x = 0;
    for (int j = 0; j < 1000; ++j) {
      BigFloat x = desc.make(j / 1000.0);
      BigFloat back = desc.h_inverse(desc.h(x));
      mpfr_sub(back.get(), back.get(), x.get(), MPFR_RNDN);
      max_x = std::max(max_x, std::abs(back.to_double()));
    }
    m["pieces"] = std::to_string(desc.pieces());
    m["strictly_increasing"] = inc ? "true" : "false";
    m["h_of_zero_is_zero"] = zero ? "true" : "false";
    m["max_roundtrip_residual"] = num(max_x);
    return inc && zero && max_x <= eps;
  });

  rec.run("conjugacy.pushforward", [&](auto& m) {
    double max_mass = 0;
    for (const auto& a : mu.atoms()) max_mass = std::max(max_mass, a.mass.hi().to_double(MPFR_RNDU));
    const double resolution = 2 * max_mass + std::ldexp(1.0, static_cast<int>(c.config.gap_weight_log2));
    std::mt19937_64 rng(c.config.seed + 2);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst = 0;
    for (int s = 0; s < 100; ++s) {
      double a = U(rng), b = U(rng);
      if (b < a) std::swap(a, b);
      BigFloat ha = desc.h_inverse(desc.make(a)), hb = desc.h_inverse(desc.make(b));
      mpfr_sub(hb.get(), hb.get(), ha.get(), MPFR_RNDN);
      double atoms = 0;
      for (const auto& at : mu.atoms()) {
        double loc = at.location.mid_double();
        if (loc >= a && loc < b) atoms += at.mass.mid_double();
      }
      worst = std::max(worst, std::abs(hb.to_double() - atoms));
    }
    m["arcs"] = "100";
    m["max_difference"] = num(worst);
    m["resolution"] = num(resolution);
    return worst <= resolution;
  });
}

void suite_derivative(const Construction& c, Recorder& rec) {
  std::vector<DerivativeStudy> stages;
  std::vector<std::size_t> depths;
  rec.run("derivative.refinement", [&](auto& m) {
    for (int s = 0; s < 3; ++s) {
      std::size_t depth = c.config.d >= static_cast<std::size_t>(2 - s) ? c.config.d - (2 - s) : 0;
      double step = std::ldexp(1.0, static_cast<int>(c.config.step_log2) - s);
      if (depth == c.config.d) {
        stages.push_back(derivative_study(c.descriptor, c.stack, c.config.grid, step));
      } else {
        WeightedAtomMeasure mu = assemble_mu(c.stack, c.config.I_max, depth, c.config.max_atoms);
        ConjugacyDescriptor desc(mu, c.alpha, c.config.gap_weight_log2, c.config.tolerance_log2);
        stages.push_back(derivative_study(desc, c.stack, c.config.grid, step));
      }
      depths.push_back(depth);
      m["stage" + std::to_string(s) + "_depth"] = std::to_string(depth);
      m["stage" + std::to_string(s) + "_step"] = num(step);
      m["stage" + std::to_string(s) + "_max_gap"] = num(stages.back().max_gap);
      m["stage" + std::to_string(s) + "_mean_gap"] = num(stages.back().mean_gap);
    }
    bool monotone = stages[1].max_gap <= stages[0].max_gap && stages[2].max_gap <= stages[1].max_gap;
    return monotone && stages[2].max_gap < 0.05;
  });
  rec.run("derivative.positivity", [&](auto& m) {
    if (stages.size() != 3) throw Error(ErrorCode::InvalidArgument, "refinement stages unavailable");
    double floor_bound = std::exp(-3.0);
    m["min_predicted"] = num(stages[2].min_predicted);
    m["floor"] = num(floor_bound);
    return stages[2].min_predicted >= floor_bound;
  });
  rec.run("derivative.integral", [&](auto& m) {
    if (stages.size() != 3) throw Error(ErrorCode::InvalidArgument, "refinement stages unavailable");
    m["integral"] = num(stages[2].integral);
    m["grid"] = std::to_string(c.config.grid);
    return std::abs(stages[2].integral - 1) <= 0.05;
  });
}

void suite_fundamental_domain(const Construction& c, Recorder& rec) {
  rec.run("fundamental-domain.images", [&](auto& m) {
    FundamentalDomainReport r = fundamental_domain_report(c.descriptor, c.measure, c.stack, c.config.images, c.config.d_max);
    m["images"] = std::to_string(r.images);
    m["preimages_disjoint"] = r.preimages_disjoint ? "true" : "false";
    m["preimage_depth"] = std::to_string(r.preimage_depth);
    m["images_disjoint"] = r.images_disjoint ? "true" : "false";
    m["min_image_gap"] = num(r.min_image_gap.to_double());
    return r.preimages_disjoint && r.images_disjoint && mpfr_sgn(r.min_image_gap.get()) > 0;
  });
  rec.run("fundamental-domain.mass", [&](auto& m) {
    FundamentalDomainReport r = fundamental_domain_report(c.descriptor, c.measure, c.stack, c.config.I_max, c.config.d_max);
    double prev = 0;
    bool nondecreasing = true;
    Interval partial = Interval::from_long(0, kDefaultPrec);
    for (long i = 0; i <= c.config.I_max; ++i) {
      partial += c.measure.block_mass(i);
      if (i) partial += c.measure.block_mass(-i);
      double v = partial.mid_double();
      nondecreasing = nondecreasing && v >= prev;
      prev = v;
    }
    m["radius"] = std::to_string(c.config.I_max);
    m["block_sum"] = num(r.block_sum.mid_double());
    m["lebesgue_of_union"] = num(r.lebesgue_of_union);
    m["coverage_lower"] = num(r.coverage.lo().to_double(MPFR_RNDD));
    m["tail_all_level"] = num(r.tail_all_level.hi().to_double(MPFR_RNDU));
    m["tail_block"] = num(r.tail_block.hi().to_double(MPFR_RNDU));
    return nondecreasing && mpfr_cmp_d(r.coverage.lo().get(), 0.99) >= 0 && r.tail_all_level.hi() <= r.tail_block.hi();
  });
  rec.run("fundamental-domain.weight_ratio", [&](auto& m) {
    FundamentalDomainReport r = fundamental_domain_report(c.descriptor, c.measure, c.stack, c.config.I_max, c.config.d_max);
    double D = std::exp(3.0);
    m["max_ratio"] = num(r.max_weight_ratio);
    m["D"] = num(D);
    return r.max_weight_ratio <= D;
  });
}

void suite_rotation(const Construction& c, Recorder& rec) {
  Interval alpha = c.alpha.interval(kDefaultPrec);
  auto err_to_alpha = [&](double est) {
    double lo = alpha.lo().to_double(MPFR_RNDD), hi = alpha.hi().to_double(MPFR_RNDU);
    return est < lo ? lo - est : (est > hi ? est - hi : 0.0);
  };
  double e1 = 0, e2 = 0;
  rec.run("rotation-number.estimate", [&](auto& m) {
    RotationEstimate r = rotation_number_estimate(c.descriptor, 0.1, c.config.rotation_iters);
    e1 = r.estimate;
    double err = err_to_alpha(r.estimate);
    m["iterations"] = std::to_string(c.config.rotation_iters);
    m["estimate"] = num(r.estimate);
    m["error"] = num(err);
    m["bound"] = num(r.bound);
    return err <= r.bound + alpha.width();
  });
  rec.run("rotation-number.start_invariance", [&](auto& m) {
    RotationEstimate r = rotation_number_estimate(c.descriptor, 0.6, c.config.rotation_iters);
    e2 = r.estimate;
    m["estimate_x0_0.6"] = num(e2);
    m["difference"] = num(std::abs(e1 - e2));
    return std::abs(e1 - e2) <= 2 * r.bound && err_to_alpha(e2) <= r.bound + alpha.width();
  });
}

}  // namespace

std::string_view to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::undecided: return "undecided";
  }
  return "fail";
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"conjugacy",       "derivative",         "disjointness",
                                              "fundamental-domain", "lemma", "rotation-number",
                                              "summability"};
  return names;
}

VerificationReport run_verification(const Construction& c, const std::vector<std::string>& suites) {
  for (const auto& s : suites)
    if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end())
      throw Error(ErrorCode::InvalidArgument, "unknown suite '" + s + "'");
  auto want = [&](const char* s) { return suites.empty() || std::find(suites.begin(), suites.end(), s) != suites.end(); };

  VerificationReport report;
  Recorder rec{report.checks};
  std::vector<mpq_class> pts;
  if (want("lemma") || want("summability")) pts = sample_points(c);
  if (want("disjointness")) suite_disjointness(c, rec);
  if (want("lemma")) suite_lemma(c, rec, pts);
  if (want("summability")) suite_summability(c, rec, pts);
  if (want("conjugacy")) suite_conjugacy(c, rec);
  if (want("derivative")) suite_derivative(c, rec);
  if (want("fundamental-domain")) suite_fundamental_domain(c, rec);
  if (want("rotation-number")) suite_rotation(c, rec);
  std::sort(report.checks.begin(), report.checks.end(),
            [](const CheckResult& a, const CheckResult& b) { return a.name < b.name; });
  return report;
}

int VerificationReport::exit_code() const {
  bool undecided = false, failed = false;
  for (const auto& c : checks) {
    undecided = undecided || c.status == CheckStatus::undecided;
    failed = failed || c.status == CheckStatus::fail;
  }
  return failed ? 1 : (undecided ? 3 : 0);
}

std::string VerificationReport::to_json() const {
  nlohmann::json j;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json e;
    e["name"] = c.name;
    e["status"] = std::string(to_string(c.status));
    e["measured"] = c.measured;
    e["seconds"] = std::round(c.seconds * 1000) / 1000;
    arr.push_back(e);
  }
  j["checks"] = arr;
  j["exit_code"] = exit_code();
  return j.dump(2) + "\n";
}

}  // namespace fundom
