#include "fundom/diophantine.hpp"

#include "fundom/error.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <sstream>

namespace fundom {

namespace {

constexpr long kMaxBits = 1L << 18;

mpz_class floor_q(const mpq_class& x) {
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return f;
}

mpz_class ceil_q(const mpq_class& x) {
  mpz_class c;
  mpz_cdiv_q(c.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return c;
}

long bitlen(const mpz_class& z) { return static_cast<long>(mpz_sizeinbase(z.get_mpz_t(), 2)); }

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

// Exact value of a decimal literal such as "-0.125e-3".
mpq_class parse_decimal(const std::string& raw) {
  std::string s = trim(raw);
  if (s.empty()) throw Error(ErrorCode::ParseError, "empty decimal");
  std::size_t i = 0;
  bool neg = false;
  if (s[i] == '+' || s[i] == '-') neg = s[i++] == '-';
  std::string digits;
  long frac_digits = 0;
  bool seen_dot = false, seen_digit = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits += c;
      seen_digit = true;
      if (seen_dot) ++frac_digits;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else {
      break;
    }
  }
  long exponent = 0;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    std::size_t used = 0;
    try {
      exponent = std::stol(s.substr(i + 1), &used);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "bad exponent in decimal: " + raw);
    }
    i += 1 + used;
  }
  if (!seen_digit || i != s.size()) throw Error(ErrorCode::ParseError, "malformed decimal: " + raw);
  mpq_class v{mpz_class(digits, 10)};
  long scale = exponent - frac_digits;
  mpz_class ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
  if (scale < 0) v /= ten_pow; else v *= ten_pow;
  v.canonicalize();
  return neg ? mpq_class(-v) : v;
}

std::vector<long> parse_quotient_list(const std::string& s) {
  std::vector<long> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(item, &used);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "bad partial quotient: " + item);
    }
    if (used != item.size() || v < 1) throw Error(ErrorCode::ParseError, "partial quotients must be positive integers");
    out.push_back(v);
  }
  return out;
}

}  // namespace

std::vector<mpz_class> rational_quotients(mpq_class x) {
  std::vector<mpz_class> out;
  while (true) {
    mpz_class a = floor_q(x);
    out.push_back(a);
    x -= a;
    if (x == 0) break;
    x = 1 / x;
  }
  return out;
}

// ----------------------------------------------------------------- Alpha --

Alpha Alpha::golden() {
  Alpha a;
  a.kind_ = Kind::golden;
  a.spec_ = "golden";
  return a;
}

Alpha Alpha::periodic(std::vector<long> prefix, std::vector<long> period) {
  if (period.empty()) throw Error(ErrorCode::InvalidArgument, "periodic continued fraction needs a non-empty period");
  for (long v : prefix)
    if (v < 1) throw Error(ErrorCode::InvalidArgument, "partial quotients must be positive");
  for (long v : period)
    if (v < 1) throw Error(ErrorCode::InvalidArgument, "partial quotients must be positive");
  Alpha a;
  a.kind_ = Kind::periodic;
  std::ostringstream os;
  os << "cf:";
  for (std::size_t i = 0; i < prefix.size(); ++i) os << (i ? "," : "") << prefix[i];
  if (!prefix.empty()) os << ";";
  for (std::size_t i = 0; i < period.size(); ++i) os << (i ? "," : "") << period[i];
  a.spec_ = os.str();
  a.prefix_ = std::move(prefix);
  a.period_ = std::move(period);
  return a;
}

Alpha Alpha::parse(const std::string& raw) {
  std::string spec = trim(raw);
  if (spec == "golden") return golden();
  if (spec.rfind("cf:", 0) == 0) {
    std::string body = spec.substr(3);
    auto semi = body.find(';');
    if (semi == std::string::npos) return periodic({}, parse_quotient_list(body));
    return periodic(parse_quotient_list(body.substr(0, semi)), parse_quotient_list(body.substr(semi + 1)));
  }
  if (spec.find('/') != std::string::npos)
    throw Error(ErrorCode::RationalInput, "alpha '" + spec + "' is a rational number");

  std::string centre_str = spec, err_str;
  for (const char* sep : {"+-", "\xC2\xB1"}) {
    auto pos = spec.find(sep);
    if (pos != std::string::npos) {
      centre_str = spec.substr(0, pos);
      err_str = spec.substr(pos + std::char_traits<char>::length(sep));
      break;
    }
  }
  mpq_class centre = parse_decimal(centre_str);
  if (err_str.empty()) throw Error(ErrorCode::RationalInput, "alpha '" + spec + "' is a rational number");
  mpq_class err = abs(parse_decimal(err_str));
  if (err == 0) throw Error(ErrorCode::RationalInput, "alpha '" + spec + "' is a rational number");

  mpq_class lo = centre - err, hi = centre + err;
  mpz_class shift = floor_q(lo);
  if (floor_q(hi) != shift || lo == shift)
    throw Error(ErrorCode::NotCertifiable, "decimal enclosure of alpha contains an integer");
  lo -= shift;
  hi -= shift;

  Alpha a;
  a.kind_ = Kind::decimal;
  a.spec_ = spec;
  a.dec_lo_ = lo;
  a.dec_hi_ = hi;
  // Quotients are certified where both endpoint expansions agree and neither
  // has terminated: the set of reals sharing a prefix is an interval.
  auto ql = rational_quotients(lo), qh = rational_quotients(hi);
  a.dec_quotients_ = std::make_shared<std::vector<long>>();
  for (std::size_t j = 1; j + 1 < ql.size() && j + 1 < qh.size(); ++j) {
    if (ql[j] != qh[j] || !ql[j].fits_slong_p()) break;
    a.dec_quotients_->push_back(ql[j].get_si());
  }
  return a;
}

long Alpha::quotient(std::size_t k) const {
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "partial quotients are indexed from 1");
  switch (kind_) {
    case Kind::golden: return 1;
    case Kind::periodic:
      if (k <= prefix_.size()) return prefix_[k - 1];
      return period_[(k - 1 - prefix_.size()) % period_.size()];
    case Kind::decimal:
      if (k > dec_quotients_->size())
        throw Error(ErrorCode::NotCertifiable,
                    "decimal enclosure of alpha certifies only " + std::to_string(dec_quotients_->size()) +
                        " partial quotients, " + std::to_string(k) + " requested");
      return (*dec_quotients_)[k - 1];
  }
  return 0;
}

std::pair<mpq_class, mpq_class> Alpha::bounds(long bits) const {
  mpz_class target;
  mpz_ui_pow_ui(target.get_mpz_t(), 2, static_cast<unsigned long>(std::max(bits, 1L)));
  if (kind_ == Kind::decimal) {
    if ((dec_hi_ - dec_lo_) * target > 1)
      throw Error(ErrorCode::NotCertifiable,
                  "decimal enclosure of alpha is too wide for " + std::to_string(bits) + " bits");
    return {dec_lo_, dec_hi_};
  }
  // Consecutive convergents bracket alpha and differ by 1/(q_k q_{k+1}).
  mpz_class p_prev = 1, p = 0, q_prev = 0, q = 1;
  for (std::size_t k = 1;; ++k) {
    mpz_class a = quotient(k);
    mpz_class p_next = a * p + p_prev, q_next = a * q + q_prev;
    p_prev = p; p = p_next;
    q_prev = q; q = q_next;
    if (k >= 2 && q * q_prev >= target) break;
  }
  mpq_class x(p, q), y(p_prev, q_prev);
  x.canonicalize();
  y.canonicalize();
  return x < y ? std::pair{x, y} : std::pair{y, x};
}

std::pair<mpq_class, mpq_class> Alpha::best_bounds(long bits) const {
  if (kind_ == Kind::decimal) return {dec_lo_, dec_hi_};
  return bounds(bits);
}

Interval Alpha::interval(Prec prec) const {
  if (kind_ == Kind::decimal) return Interval::hull(dec_lo_, dec_hi_, prec);
  auto [lo, hi] = bounds(prec + 4);
  return Interval::hull(lo, hi, prec);
}

Real Alpha::real() const {
  Alpha self = *this;
  return Real([self](Prec p) { return self.interval(p); });
}

ContinuedFraction expand_alpha(const Alpha& alpha, std::size_t k) {
  ContinuedFraction cf;
  mpz_class p_prev = 1, p = 0, q_prev = 0, q = 1;
  for (std::size_t j = 1; j <= k; ++j) {
    long a = alpha.quotient(j);
    cf.quotients.push_back(a);
    mpz_class p_next = a * p + p_prev, q_next = a * q + q_prev;
    p_prev = p; p = p_next;
    q_prev = q; q = q_next;
    cf.convergents.push_back({p, q});
  }
  return cf;
}

// ---------------------------------------------------- ApproximationProfile --

namespace {

// min over 1 <= n <= q of ||n beta|| for beta in [lo, hi] (inside (0,1)),
// returned as exact rational bounds; nullopt if the enclosure is too wide.
std::optional<std::pair<mpq_class, mpq_class>> min_multiple_distance(const mpq_class& lo, const mpq_class& hi,
                                                                     const mpz_class& q) {
  mpz_class s_prev = 0, s = 1, r_prev = 1, r = 0;
  mpq_class xl = 1 / lo, xh = 1 / hi;
  while (true) {
    mpz_class al = floor_q(xl), ah = floor_q(xh);
    if (al != ah) return std::nullopt;
    mpz_class s_next = al * s + s_prev;
    if (s_next > q) break;
    mpz_class r_next = al * r + r_prev;
    s_prev = s; s = s_next;
    r_prev = r; r = r_next;
    xl -= al;
    xh -= al;
    if (xl == 0 || xh == 0) return std::nullopt;
    xl = 1 / xl;
    xh = 1 / xh;
  }
  mpq_class dl = s * lo - r, dh = s * hi - r;
  if (sgn(dl) != sgn(dh) || sgn(dl) == 0) return std::nullopt;
  dl = abs(dl);
  dh = abs(dh);
  return dl < dh ? std::pair{dl, dh} : std::pair{dh, dl};
}

std::optional<mpz_class> certified_ceiling(const mpz_class& q, const mpq_class& d_lo, const mpq_class& d_hi) {
  mpq_class v_lo = mpq_class(q) / d_hi, v_hi = mpq_class(q) / d_lo;
  mpz_class c_lo = ceil_q(v_lo), c_hi = ceil_q(v_hi);
  if (c_lo != c_hi) return std::nullopt;
  return c_lo;
}

}  // namespace

mpz_class ApproximationProfile::p(const mpz_class& q) const {
  if (q < 1) throw Error(ErrorCode::InvalidArgument, "p(q) needs q >= 1");
  {
    std::lock_guard lock(mu_);
    if (auto it = table_.find(q); it != table_.end()) return it->second;
  }
  for (long bits = 3 * bitlen(q) + 64; bits <= kMaxBits; bits *= 2) {
    if (!alpha_.refinable() && bits > 3 * bitlen(q) + 64)
      throw Error(ErrorCode::NotCertifiable, "decimal enclosure of alpha too wide to tabulate p(" + q.get_str() + ")");
    auto [al, ah] = alpha_.best_bounds(bits);
    mpq_class bl = q * al, bh = q * ah;
    mpz_class shift = floor_q(bl);
    if (floor_q(bh) != shift) continue;
    bl -= shift;
    bh -= shift;
    if (bl == 0) continue;
    auto d = min_multiple_distance(bl, bh, q);
    if (!d) continue;
    auto value = certified_ceiling(q, d->first, d->second);
    if (!value) continue;
    std::lock_guard lock(mu_);
    return table_.emplace(q, *value).first->second;
  }
  throw Error(ErrorCode::PrecisionExhausted, "could not separate a multiple of alpha from the grid (1/" +
                                                 q.get_str() + ")Z; is alpha rational?");
}

mpz_class ApproximationProfile::p_n(const mpz_class& n, const mpz_class& q) const {
  if (q < 1 || n < 1) throw Error(ErrorCode::InvalidArgument, "p_n(q) needs n, q >= 1");
  mpz_class nq = n * q;
  for (long bits = 2 * bitlen(nq) + 64; bits <= kMaxBits; bits *= 2) {
    if (!alpha_.refinable() && bits > 2 * bitlen(nq) + 64)
      throw Error(ErrorCode::NotCertifiable, "decimal enclosure of alpha too wide to evaluate p_n(q)");
    auto [al, ah] = alpha_.best_bounds(bits);
    mpq_class tl = nq * al, th = nq * ah;
    mpz_class shift = floor_q(tl);
    if (floor_q(th) != shift) continue;
    tl -= shift;
    th -= shift;
    const mpq_class half(1, 2);
    if ((tl < half) != (th < half) || tl == 0) continue;
    mpq_class dl = tl < half ? tl : mpq_class(1 - th);
    mpq_class dh = tl < half ? th : mpq_class(1 - tl);
    if (auto value = certified_ceiling(q, dl, dh)) return *value;
  }
  throw Error(ErrorCode::PrecisionExhausted, "could not separate n*alpha from the grid");
}

std::map<mpz_class, mpz_class> ApproximationProfile::table() const {
  std::lock_guard lock(mu_);
  return table_;
}

Prec precision_for_grid(const mpz_class& q, const mpz_class& pq) {
  return std::max<Prec>(kDefaultPrec, bitlen(q) + bitlen(pq) + 96);
}

CpWitness estimate_c_p(const Real& x, const ApproximationProfile& profile, std::span<const mpz_class> qs) {
  if (qs.empty()) throw Error(ErrorCode::InvalidArgument, "estimate_c_p needs a non-empty window");
  CpWitness out;
  bool first = true;
  for (const auto& q : qs) {
    mpz_class pq = profile.p(q);
    Interval d = dist_to_grid(x.at(precision_for_grid(q, pq)), q);
    Interval v = Interval::from_integer(pq, d.prec()) * d;
    if (first || v.mid() < out.value.mid()) out.argmin = q;
    out.value = first ? v : min(out.value, v);
    first = false;
  }
  out.q_first = *std::min_element(qs.begin(), qs.end());
  out.q_last = *std::max_element(qs.begin(), qs.end());
  out.count = qs.size();
  return out;
}

CpWitness estimate_c_p(const Real& x, const ApproximationProfile& profile, const mpz_class& q_first,
                       const mpz_class& q_last) {
  if (q_last < 2 || q_first < 1 || q_first > q_last)
    throw Error(ErrorCode::InvalidArgument, "estimate_c_p needs 1 <= q_first <= q_last, q_last >= 2");
  if (q_last - q_first > 1000000) throw Error(ErrorCode::BudgetExceeded, "estimate_c_p window too large");
  std::vector<mpz_class> qs;
  for (mpz_class q = q_first; q <= q_last; ++q) qs.push_back(q);
  return estimate_c_p(x, profile, qs);
}

}  // namespace fundom
