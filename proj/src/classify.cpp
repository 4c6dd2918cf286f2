#include "kerrkit/classify.hpp"

#include <cmath>

#include "kerrkit/errors.hpp"
#include "kerrkit/roots.hpp"

namespace kerrkit {

const char* endpoint_name(EndpointKind k) {
  switch (k) {
    case EndpointKind::Horizon: return "Horizon";
    case EndpointKind::Infinity: return "Infinity";
    case EndpointKind::DoubleRootAsymptote: return "DoubleRootAsymptote";
    case EndpointKind::SphericalOrbit: return "SphericalOrbit";
    case EndpointKind::CrossingSphere: return "CrossingSphere";
    case EndpointKind::Undetermined: return "Undetermined";
  }
  return "?";
}

bool same_endpoint(const Endpoint& x, const Endpoint& y, double rel_tol) {
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case EndpointKind::Horizon:
    case EndpointKind::CrossingSphere:
      return x.inner == y.inner;
    case EndpointKind::DoubleRootAsymptote:
    case EndpointKind::SphericalOrbit:
      return std::abs(x.r - y.r) <= rel_tol * std::max(1.0, std::abs(x.r));
    default:
      return true;
  }
}

bool same_type(const GeodesicType& x, const GeodesicType& y) {
  return x.block == y.block && same_endpoint(x.start, y.start) && same_endpoint(x.end, y.end);
}

namespace {

std::string symbol(const Endpoint& e) {
  switch (e.kind) {
    case EndpointKind::Horizon: return e.inner ? "r-" : "r+";
    case EndpointKind::Infinity: return "inf";
    case EndpointKind::DoubleRootAsymptote:
    case EndpointKind::SphericalOrbit: return "r0";
    case EndpointKind::CrossingSphere: return e.inner ? "S(r-)" : "S(r+)";
    default: return "?";
  }
}

bool finite_affine(const Endpoint& e) {
  return e.kind == EndpointKind::Horizon || e.kind == EndpointKind::CrossingSphere;
}

}  // namespace

std::string GeodesicType::label() const {
  if (start.kind == EndpointKind::SphericalOrbit) return "[r0]";
  return std::string(finite_affine(start) ? "[" : "]") + symbol(start) + "->" + symbol(end) +
         (finite_affine(end) ? "]" : "[");
}

namespace {

struct Side {
  Endpoint e;
  bool turn = false;  // a simple root: the path reflects there
};

Endpoint horizon_end(int sign, bool inner, double r) {
  Endpoint e;
  e.r = r;
  e.inner = inner;
  e.kind = sign > 0 ? EndpointKind::Horizon : sign == 0 ? EndpointKind::CrossingSphere
                                                        : EndpointKind::Undetermined;
  return e;
}

}  // namespace

GeodesicType classify(const Kerr& k, const FirstIntegrals& I, const GeodesicState& start) {
  const double r_s = start.point.x(1);
  GeodesicType out;
  const RootAnalysis ra = radial_roots(k, I);
  if (ra.identically_zero) throw DomainError("classify: R vanishes identically (trivial integrals)");
  if (ra.near_degenerate) {
    out.ambiguous = true;
    out.reason = "R has a near-tangency at r = " + std::to_string(ra.near_degenerate_r);
  }
  const RadialQuartic q = radial_quartic(k, I);
  if (q(r_s) < -1e-10 * q.scale(r_s)) throw ForbiddenRegion("classify: R < 0 at the start");
  const double rp = k.r_plus(), rm = k.r_minus();
  const double eps = 1e-9 * std::max(1.0, r_s);

  if (start.point.chart == Chart::BL_II) {
    out.block = Region::II;
    for (const auto& rt : ra.roots)
      if (rt.r > rm + eps && rt.r < rp - eps) {
        out.ambiguous = true;
        out.reason = "root of R inside (r-, r+)";
      }
    const Endpoint top = horizon_end(ra.sign_at_rplus, false, rp);
    const Endpoint bottom = horizon_end(ra.sign_at_rminus, true, rm);
    out.start = start.sign_r < 0 ? top : bottom;
    out.end = start.sign_r < 0 ? bottom : top;
    return out;
  }
  if (start.point.chart != Chart::BL_I) throw DomainError("classify: start must be a BL_I or BL_II point");
  out.block = Region::I;

  for (const auto& rt : ra.roots) {
    if (rt.multiplicity >= 2 && std::abs(rt.r - r_s) <= 1e-7 * std::max(1.0, rt.r) &&
        std::abs(q(r_s)) <= kDoubleRootTol * q.scale(r_s)) {
      out.start = out.end = Endpoint{EndpointKind::SphericalOrbit, rt.r, false};
      return out;
    }
  }

  Side lower, upper;
  lower.e = horizon_end(ra.sign_at_rplus, false, rp);
  const double r_far = 1e6 * std::max(k.M(), r_s);
  upper.e.kind = q(r_far) > 0 ? EndpointKind::Infinity : EndpointKind::Undetermined;
  bool have_lower = false, have_upper = false;
  for (const auto& rt : ra.roots) {
    if (rt.r <= rp + 1e-12 * rp) continue;
    Side sd;
    sd.turn = rt.multiplicity % 2 == 1;
    sd.e = Endpoint{rt.multiplicity >= 2 ? EndpointKind::DoubleRootAsymptote : EndpointKind::Undetermined,
                    rt.r, false};
    if (rt.multiplicity >= 3) {
      out.ambiguous = true;
      out.reason = "root of multiplicity >= 3";
    }
    bool below;
    if (std::abs(rt.r - r_s) <= eps) {
      // Starting on a simple root: the allowed side decides which end it is.
      below = q.derivative(r_s) > 0;
    } else {
      below = rt.r < r_s;
    }
    if (below) {
      lower = sd;  // roots ascend, so the last one below wins
      have_lower = true;
    } else if (!have_upper) {
      upper = sd;
      have_upper = true;
    }
  }
  (void)have_lower;

  auto far_end = [&](const Side& first, const Side& other) {
    if (!first.turn) return first.e;
    if (other.turn) {
      out.ambiguous = true;
      out.reason = "bounded radial oscillation";
      return Endpoint{};
    }
    return other.e;
  };
  if (start.sign_r > 0) {
    out.end = far_end(upper, lower);
    out.start = far_end(lower, upper);
  } else {
    out.end = far_end(lower, upper);
    out.start = far_end(upper, lower);
  }
  if (out.start.kind == EndpointKind::Undetermined || out.end.kind == EndpointKind::Undetermined) {
    out.ambiguous = true;
    if (out.reason.empty()) out.reason = "endpoint not determined by the root structure";
  }
  return out;
}

namespace {

Endpoint endpoint_from_path(const Kerr& k, const GeodesicPath& p) {
  Endpoint e;
  e.r = p.end_radius;
  switch (p.termination) {
    case EventKind::Escape:
      e.kind = EndpointKind::Infinity;
      break;
    case EventKind::HorizonCrossing: {
      e.inner = std::abs(p.end_radius - k.r_minus()) < std::abs(p.end_radius - k.r_plus());
      const RadialQuartic q = radial_quartic(k, p.integrals);
      const double rh = e.inner ? k.r_minus() : k.r_plus();
      e.kind = std::abs(q(rh)) <= kDoubleRootTol * q.scale(rh) ? EndpointKind::CrossingSphere
                                                                : EndpointKind::Horizon;
      break;
    }
    case EventKind::DoubleRootApproach:
      e.kind = EndpointKind::DoubleRootAsymptote;
      break;
    default:
      e.kind = p.spherical ? EndpointKind::SphericalOrbit : EndpointKind::Undetermined;
      if (p.spherical) e.r = p.samples.empty() ? 0.0 : p.samples.front().x(1);
      break;
  }
  return e;
}

}  // namespace

GeodesicType classify_by_integration(const Kerr& k, const FirstIntegrals& I,
                                     const GeodesicState& start, const IntegrateConfig& cfg) {
  IntegrateConfig c = cfg;
  c.horizon_tail = false;
  c.continue_through_horizon = false;
  // Beyond the largest root of R an outgoing path can no longer turn, so
  // escape is decided there; the budget only has to cover the approach.
  double r_far = std::max(20.0 * k.M(), 1.5 * start.point.x(1));
  for (const auto& rt : radial_roots(k, I).roots) r_far = std::max(r_far, 1.5 * rt.r);
  c.r_max = r_far / k.M();
  c.max_affine = std::max(c.max_affine, 1e7 * k.M());
  const GeodesicPath fwd = integrate(k, start, I, c);
  const GeodesicPath bwd = integrate(k, reversed_state(start), reversed_integrals(I), c);
  GeodesicType out;
  out.block = start.point.chart == Chart::BL_II ? Region::II : Region::I;
  out.end = endpoint_from_path(k, fwd);
  out.start = endpoint_from_path(k, bwd);
  if (fwd.spherical) out.start = out.end;
  if (out.start.kind == EndpointKind::Undetermined || out.end.kind == EndpointKind::Undetermined) {
    out.ambiguous = true;
    out.reason = "integration budget exhausted";
  }
  return out;
}

}  // namespace kerrkit
