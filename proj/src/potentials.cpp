#include <cmath>

#include "kerrkit/errors.hpp"
#include "kerrkit/functions.hpp"
#include "kerrkit/geodesics.hpp"
#include "kerrkit/metric.hpp"

namespace kerrkit {

double carter_K(const Kerr& k, const FirstIntegrals& I) {
  const double d = I.L - k.a() * I.E;
  return I.Q + d * d;
}

std::optional<double> reduced_xi(const FirstIntegrals& I) {
  if (I.E == 0.0) return std::nullopt;
  return I.L / I.E;
}

std::optional<double> reduced_eta(const FirstIntegrals& I) {
  if (I.E == 0.0) return std::nullopt;
  return I.Q / (I.E * I.E);
}

bool admissible(const Kerr& k, const FirstIntegrals& I, double tol) {
  const double K = carter_K(k, I);
  const double scale = I.Q * I.Q + I.L * I.L + I.E * I.E * k.M() * k.M();
  if (K < -tol * std::max(scale, 1e-300)) return false;
  if (I.E == 0.0 || I.Q >= 0.0) return true;
  // Q < 0 needs a latitude band where Theta >= 0: eta^2 <= a^2 and
  // |xi| <= |a| - sqrt(|eta|).
  const double xi = I.L / I.E, eta = I.Q / (I.E * I.E), a = std::abs(k.a());
  return eta * eta <= a * a * (1 + tol) && std::abs(xi) <= a - std::sqrt(-eta) + tol;
}

double RadialQuartic::scale(double r) const {
  const double ar = std::abs(r);
  return std::abs(c4) * ar * ar * ar * ar + std::abs(c3) * ar * ar * ar +
         std::abs(c2) * ar * ar + std::abs(c1) * ar + std::abs(c0);
}

RadialQuartic radial_quartic(const Kerr& k, const FirstIntegrals& I) {
  const double a = k.a(), M = k.M(), E = I.E, L = I.L, Q = I.Q;
  RadialQuartic q;
  q.c4 = E * E;
  // Zero out pure rounding residue so E = 0 or K = 0 drop to their true degree.
  auto clean = [](double v, double terms) { return std::abs(v) <= 8e-16 * terms ? 0.0 : v; };
  q.c2 = clean(a * a * E * E - L * L - Q, a * a * E * E + L * L + std::abs(Q));
  const double d2 = (a * E - L) * (a * E - L);
  q.c1 = 2 * M * clean(d2 + Q, d2 + std::abs(Q));
  q.c0 = -a * a * Q;
  return q;
}

double potential_P(const Kerr& k, const FirstIntegrals& I, double r) {
  return (r * r + k.a() * k.a()) * I.E - k.a() * I.L;
}

double potential_D(const Kerr& k, const FirstIntegrals& I, double theta) {
  const double s = std::sin(theta);
  return I.L - k.a() * I.E * s * s;
}

double potential_R(const Kerr& k, const FirstIntegrals& I, double r) {
  const double P = potential_P(k, I, r);
  return P * P - Delta(k, r) * carter_K(k, I);
}

double potential_R_prime(const Kerr& k, const FirstIntegrals& I, double r) {
  return 4 * I.E * r * potential_P(k, I, r) - (2 * r - 2 * k.M()) * carter_K(k, I);
}

double potential_Theta(const Kerr& k, const FirstIntegrals& I, double theta) {
  const double s = std::sin(theta), c = std::cos(theta);
  const double a = k.a(), E = I.E, L = I.L;
  // Q + a^2 E^2 cos^2 - L^2 cot^2 keeps the L = 0 case finite on the axis.
  if (L == 0.0) return I.Q + a * a * E * E * c * c;
  if (std::abs(s) <= kAxisSinTol) throw AxisError("Theta(theta) with L != 0 on the axis");
  return I.Q + a * a * E * E * c * c - L * L * c * c / (s * s);
}

double potential_Theta_prime(const Kerr& k, const FirstIntegrals& I, double theta) {
  const double s = std::sin(theta), c = std::cos(theta);
  const double a = k.a(), E = I.E, L = I.L;
  double d = -2 * a * a * E * E * c * s;
  if (L != 0.0) {
    if (std::abs(s) <= kAxisSinTol) throw AxisError("Theta'(theta) with L != 0 on the axis");
    d += 2 * L * L * c / (s * s * s);
  }
  return d;
}

Potentials potentials(const Kerr& k, const FirstIntegrals& I, double r, double theta) {
  const double s = std::sin(theta);
  if (std::abs(s) <= kAxisSinTol) throw AxisError("potentials evaluated on the axis");
  const double D = Delta(k, r);
  if (std::abs(D) <= 1e-14 * k.M() * k.M())
    throw HorizonError("potentials: T is singular at Delta = 0");
  Potentials out;
  out.P = potential_P(k, I, r);
  out.D = potential_D(k, I, theta);
  out.R = out.P * out.P - D * carter_K(k, I);
  out.R_expanded = radial_quartic(k, I)(r);
  out.Theta = carter_K(k, I) - out.D * out.D / (s * s);
  out.T = k.a() * out.D + (r * r + k.a() * k.a()) * out.P / D;
  return out;
}

double relative_null_norm(const Eigen::Matrix4d& g, const Eigen::Vector4d& v) {
  double sum = 0, mag = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const double t = g(i, j) * v(i) * v(j);
      sum += t;
      mag += std::abs(t);
    }
  return mag == 0.0 ? 0.0 : std::abs(sum) / mag;
}

FirstIntegrals integrals_from_velocity(const Kerr& k, const SpacetimePoint& p,
                                       const Eigen::Vector4d& v, double tol) {
  if (!(is_boyer_lindquist(p.chart) || p.chart == Chart::KerrStar ||
        p.chart == Chart::StarKerr))
    throw DomainError("integrals_from_velocity needs a Boyer-Lindquist or Kerr-star point");
  const double r = p.x(1), theta = p.x(2);
  const double s = std::sin(theta);
  if (std::abs(s) <= kAxisSinTol) throw AxisError("integrals_from_velocity on the axis");
  const Eigen::Matrix4d g = covariant_metric(k, p);
  const double nn = relative_null_norm(g, v);
  if (nn > tol) throw NonNullVelocity("velocity is not null (relative norm " + std::to_string(nn) + ")");
  const Eigen::Vector4d gv = g * v;
  FirstIntegrals I;
  I.E = -gv(0);
  I.L = gv(3);
  const double rr = rho2(k, r, theta);
  const double D = I.L - k.a() * I.E * s * s;
  const double K = rr * rr * v(2) * v(2) + D * D / (s * s);
  const double d = I.L - k.a() * I.E;
  I.Q = K - d * d;
  return I;
}

Eigen::Vector4d velocity_from_integrals(const Kerr& k, const SpacetimePoint& p,
                                        const FirstIntegrals& I, int sign_r,
                                        int sign_theta, double tol) {
  if (!is_boyer_lindquist(p.chart))
    throw DomainError("velocity_from_integrals needs a Boyer-Lindquist point");
  const double r = p.x(1), theta = p.x(2);
  const Potentials pot = potentials(k, I, r, theta);
  const double K = carter_K(k, I);
  const double s = std::sin(theta);
  const double Dl = Delta(k, r);
  const double R_scale = pot.P * pot.P + std::abs(Dl) * K;
  const double T_scale = K + pot.D * pot.D / (s * s);
  double R = pot.R, Th = pot.Theta;
  if (R < 0) {
    if (R < -tol * std::max(R_scale, 1e-300)) throw ForbiddenRegion("R(r) < 0");
    R = 0;
  }
  if (Th < 0) {
    if (Th < -tol * std::max(T_scale, 1e-300)) throw ForbiddenRegion("Theta(theta) < 0");
    Th = 0;
  }
  const double rr = rho2(k, r, theta);
  Eigen::Vector4d v;
  v(0) = pot.T / rr;
  v(1) = (sign_r >= 0 ? 1 : -1) * std::sqrt(R) / rr;
  v(2) = (sign_theta >= 0 ? 1 : -1) * std::sqrt(Th) / rr;
  v(3) = (pot.D / (s * s) + k.a() * pot.P / Dl) / rr;
  return v;
}

}  // namespace kerrkit
