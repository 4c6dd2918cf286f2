#pragma once

#include <optional>

#include <Eigen/Core>

#include "kerrkit/charts.hpp"
#include "kerrkit/params.hpp"

namespace kerrkit {

struct FirstIntegrals {
  double E = 0;
  double L = 0;
  double Q = 0;
};

// K = Q + (L - aE)^2
double carter_K(const Kerr& k, const FirstIntegrals& I);
// xi = L/E and eta = Q/E^2, defined for E != 0.
std::optional<double> reduced_xi(const FirstIntegrals& I);
std::optional<double> reduced_eta(const FirstIntegrals& I);

// K >= 0 and, for E != 0, the reduced constraints on (xi, eta).
bool admissible(const Kerr& k, const FirstIntegrals& I, double tol = 1e-12);

// Coefficients of R(r) = c4 r^4 + c3 r^3 + c2 r^2 + c1 r + c0 (c3 = 0).
struct RadialQuartic {
  double c4 = 0, c3 = 0, c2 = 0, c1 = 0, c0 = 0;
  double operator()(double r) const { return (((c4 * r + c3) * r + c2) * r + c1) * r + c0; }
  double derivative(double r) const { return ((4 * c4 * r + 3 * c3) * r + 2 * c2) * r + c1; }
  double second_derivative(double r) const { return (12 * c4 * r + 6 * c3) * r + 2 * c2; }
  // Sum of absolute term magnitudes, the natural size of R near r.
  double scale(double r) const;
};

RadialQuartic radial_quartic(const Kerr& k, const FirstIntegrals& I);

double potential_P(const Kerr& k, const FirstIntegrals& I, double r);
double potential_D(const Kerr& k, const FirstIntegrals& I, double theta);
// R = P^2 - Delta K
double potential_R(const Kerr& k, const FirstIntegrals& I, double r);
double potential_R_prime(const Kerr& k, const FirstIntegrals& I, double r);
// Theta = K - D^2 / sin^2
double potential_Theta(const Kerr& k, const FirstIntegrals& I, double theta);
double potential_Theta_prime(const Kerr& k, const FirstIntegrals& I, double theta);

struct Potentials {
  double P = 0, D = 0;
  double R = 0;           // P^2 - Delta K
  double R_expanded = 0;  // the same from the quartic coefficients
  double Theta = 0;
  double T = 0;  // rho^2 dt/ds = a D + (r^2+a^2) P / Delta
};

// Throws AxisError near the axis and HorizonError at Delta = 0 (T is singular there).
Potentials potentials(const Kerr& k, const FirstIntegrals& I, double r, double theta);

// E = -d_t.g.v, L = d_phi.g.v, K from the angular form rho^4 thdot^2 + D^2/sin^2.
// Accepts Boyer-Lindquist and (star-)Kerr-star points, whose first and last
// coordinate fields are the Killing fields. Throws NonNullVelocity when
// |g(v,v)| exceeds tol relative to the size of its terms.
FirstIntegrals integrals_from_velocity(const Kerr& k, const SpacetimePoint& p,
                                       const Eigen::Vector4d& v, double tol = 1e-10);

// (tdot, rdot, thetadot, phidot) in Boyer-Lindquist coordinates. Small
// negative potentials (above -tol times their scale) are clamped to zero;
// anything below throws ForbiddenRegion.
Eigen::Vector4d velocity_from_integrals(const Kerr& k, const SpacetimePoint& p,
                                        const FirstIntegrals& I, int sign_r,
                                        int sign_theta, double tol = 1e-12);

// |g(v,v)| divided by the sum of the magnitudes of its terms.
double relative_null_norm(const Eigen::Matrix4d& g, const Eigen::Vector4d& v);

}  // namespace kerrkit
