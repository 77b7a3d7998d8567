#include "fundom/error.hpp"
#include "fundom/harness.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace fundom {

namespace {

void row(std::ostream& out, double x, double value, double width) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.3e\n", x, value, width);
  out << buf;
}

}  // namespace

bool is_export_kind(const std::string& what) {
  return what == "phi" || what == "F" || what == "derivative" || what == "cdf";
}

void export_csv(const Construction& c, const std::string& what, std::size_t samples, std::ostream& out) {
  if (!is_export_kind(what)) throw Error(ErrorCode::InvalidArgument, "unknown export kind '" + what + "'");
  if (samples < 2) throw Error(ErrorCode::InvalidArgument, "samples must be >= 2");
  const auto& desc = c.descriptor;
  const double tol = std::ldexp(1.0, static_cast<int>(c.config.tolerance_log2));
  out << "x,value,width\n";
  for (std::size_t j = 0; j <= samples; ++j) {
    // x = j / samples, computed exactly as a rational.
    mpq_class xq(static_cast<long>(j), static_cast<long>(samples));
    xq.canonicalize();
    const double x = xq.get_d();
    if (what == "phi") {
      Interval v = phi_truncated(c.stack, CirclePoint::from_rational(xq, c.stack.prec()));
      row(out, x, v.mid_double(), v.width());
    } else if (what == "F") {
      BigFloat xb = desc.make(x);
      row(out, x, desc.F_lift(xb).to_double(), tol);
    } else if (what == "cdf") {
      BigFloat xb = desc.make(x);
      BigFloat v = j == samples ? BigFloat(1, desc.prec()) : desc.h_inverse(xb);
      row(out, x, v.to_double(), 0.0);
    } else {
      BigFloat xb = desc.make(x);
      BigFloat y = j == samples ? BigFloat(0, desc.prec()) : desc.h(xb);
      Interval v = exp(phi_truncated(c.stack, CirclePoint(Interval(y, y).with_prec(c.stack.prec()))));
      row(out, x, v.mid_double(), v.width());
    }
  }
}

}  // namespace fundom
