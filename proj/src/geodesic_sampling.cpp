#include "kerrkit/geodesic_sampling.hpp"

#include <cmath>

#include "kerrkit/errors.hpp"
#include "kerrkit/functions.hpp"
#include "kerrkit/tetrad.hpp"

namespace kerrkit {

SampledGeodesic sample_null_geodesic(const Kerr& k, Region block, const std::vector<double>& u,
                                     double r_max) {
  SampledGeodesic out;
  const SpacetimePoint p = sample_bl_point(k, block, {u[0], u[1], u[2], u[3]}, r_max);
  out.state.point = p;
  if (block == Region::I) {
    const NullTetrad tet = null_tetrad(k, p, TetradKind::FoliationAdapted);
    Eigen::Vector4d u0 = tet.frame.col(0);
    if (u0(0) < 0) u0 = -u0;
    const double c = 2 * u[4] - 1, sn = std::sqrt(std::max(0.0, 1 - c * c));
    const double b = 2 * M_PI * u[5];
    const Eigen::Vector4d v = u0 + c * tet.frame.col(1) + sn * std::cos(b) * tet.frame.col(2) +
                              sn * std::sin(b) * tet.frame.col(3);
    out.integrals = integrals_from_velocity(k, p, v, 1e-9);
    out.state.sign_r = v(1) >= 0 ? 1 : -1;
    out.state.sign_theta = v(2) >= 0 ? 1 : -1;
    out.family = "celestial-sphere";
    return out;
  }
  if (block != Region::II) throw DomainError("sample_null_geodesic: block must be I or II");
  const double a = k.a(), th = p.x(2), s = std::sin(th);
  FirstIntegrals I;
  I.E = 2 * u[4] - 1;
  I.L = 6 * (u[5] - 0.5) * k.M();
  const double D = I.L - a * I.E * s * s;
  const double K = D * D / (s * s) + 10 * k.M() * k.M() * u[1] * u[2];
  I.Q = K - (I.L - a * I.E) * (I.L - a * I.E);
  out.integrals = I;
  out.state.sign_r = -1;
  out.state.sign_theta = u[3] < 0.5 ? 1 : -1;
  out.family = "interior-integrals";
  return out;
}

SampledGeodesic sample_zero_energy_geodesic(const Kerr& k, const std::vector<double>& u) {
  const double a = k.a(), M = k.M();
  if (a == 0.0) throw DomainError("zero-energy geodesics in M_I need a != 0");
  SampledGeodesic out;
  const double th = 0.35 + (M_PI - 0.7) * u[0];
  const double c = std::cos(th), s = std::sin(th);
  const double r_ergo = M + std::sqrt(M * M - a * a * c * c);
  const double rp = k.r_plus();
  const double r = rp + (r_ergo - rp) * (0.05 + 0.9 * u[1]);
  out.state.point = SpacetimePoint(Chart::BL_I, 0.0, r, th, 1.0);
  FirstIntegrals I;
  I.E = 0;
  // Future direction needs a L < 0 (rho^2 tdot = -2 M r a L / Delta).
  I.L = -(a > 0 ? 1 : -1) * M * (0.2 + 2 * u[2]);
  const double Klo = I.L * I.L / (s * s), Khi = a * a * I.L * I.L / Delta(k, r);
  const double K = Klo + (Khi - Klo) * (0.05 + 0.9 * u[3]);
  I.Q = K - I.L * I.L;
  out.integrals = I;
  out.state.sign_r = u[4] < 0.5 ? 1 : -1;
  out.state.sign_theta = u[5] < 0.5 ? 1 : -1;
  out.family = "zero-energy";
  return out;
}

}  // namespace kerrkit
