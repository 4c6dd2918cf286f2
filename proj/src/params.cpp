#include "kerrkit/params.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "kerrkit/errors.hpp"

namespace kerrkit {

void validate(const KerrParams& p) {
  if (!std::isfinite(p.M) || !std::isfinite(p.a) || p.M <= 0.0) {
    throw InvalidParams("Kerr parameters need a finite mass M > 0");
  }
  if (std::abs(p.a) >= p.M) {
    std::ostringstream os;
    os << "only sub-extremal Kerr is supported, got |a| = " << std::abs(p.a)
       << " >= M = " << p.M;
    throw InvalidParams(os.str());
  }
}

HorizonConstants horizon_quantities(const KerrParams& p) {
  validate(p);
  HorizonConstants h;
  const double M = p.M, a = p.a;
  const double root = std::sqrt((M - a) * (M + a));
  h.r_plus = M + root;
  // M - root loses digits for small a; a^2/r+ is the same number.
  h.r_minus = a * a / h.r_plus;
  const double rp2 = h.r_plus * h.r_plus + a * a;
  const double rm2 = h.r_minus * h.r_minus + a * a;
  const double gap = h.r_plus - h.r_minus;
  h.kappa_plus = gap / (2.0 * rp2);
  if (a == 0.0) {
    h.kappa_minus = -std::numeric_limits<double>::infinity();
    h.half_inv_kappa_minus = 0.0;
  } else {
    h.kappa_minus = -gap / (2.0 * rm2);
    h.half_inv_kappa_minus = -rm2 / gap;
  }
  h.Omega_H = a / rp2;
  h.T_H = h.kappa_plus / (2.0 * std::numbers::pi);
  h.C1 = std::exp(-h.kappa_plus * h.r_plus / 2.0) * std::pow(gap, M / (2.0 * h.r_plus));
  h.C = -h.kappa_plus * rp2 * std::exp(h.kappa_plus * h.r_plus) *
        std::pow(gap, -M / h.r_plus);
  return h;
}

Kerr::Kerr(const KerrParams& params) : p(params), h(horizon_quantities(params)) {}

}  // namespace kerrkit
