#pragma once

#include <utility>
#include <vector>

#include "kerrkit/geodesics.hpp"
#include "kerrkit/params.hpp"

namespace kerrkit {

struct CriticalLocus {
  double r0 = 0;
  double xi = 0;
  double eta = 0;

  FirstIntegrals integrals() const { return {1.0, xi, eta}; }
};

// (xi, eta) for which R(E=1, L=xi, Q=eta) has a double zero at r0.
// Throws DomainError for a = 0, r0 = M or r0 < r-.
CriticalLocus critical_locus(const Kerr& k, double r0);

// The equatorial (eta = 0) photon orbits, prograde first. The admissible part
// of the locus outside the horizon is the closed interval between them.
std::pair<double, double> equatorial_photon_radii(const Kerr& k);

// 4 M a^2 - r (r - 3M)^2; eta has its sign.
double locus_discriminant(const Kerr& k, double r);

// rho^2 dt/ds for E = 1, L = xi: (sigma^2 - 2 a M r xi) / Delta.
double orbit_T(const Kerr& k, double xi, double r, double theta);

struct OrbitReport {
  CriticalLocus locus;
  double min_abs_T = 0;
  double theta_min_T = 0;
  double max_norm_vH = 0;
  double theta_max_vH = 0;
  double max_norm_vI = 0;
  double theta_max_vI = 0;
  bool timelike_everywhere = false;
};

// Extrema over theta in [0, pi] on a 721-point grid refined by golden section.
// Throws DomainError for r0 <= r+.
OrbitReport orbit_checks(const Kerr& k, double r0);

// g(v, v) for v_I = d_t and v_H = d_t + Omega_H d_phi in Boyer-Lindquist.
double norm_vI(const Kerr& k, double r, double theta);
double norm_vH(const Kerr& k, double r, double theta);

struct LocusSweepRow {
  double a = 0;
  OrbitReport report;
};

// n_r0 radii spread over the admissible locus (endpoints included).
std::vector<LocusSweepRow> locus_sweep(double M, double a, int n_r0);

// max |r0 - 3M| / a over the rows, in units of M.
double fitted_locus_constant(const std::vector<LocusSweepRow>& rows, double M);

// Largest a (bisection on [lo, hi], M = 1) up to which every sampled point of
// the locus has both Killing fields timelike. Returns hi if nothing fails.
double timelike_threshold(double lo, double hi, double tol, int n_r0);

// Largest a (M = 1) for which the small-r branch of r (r - 3)^2 <= 4 a^2 stays
// below r-, so that the double zeros on [r-, inf) form a single band around 3.
double locus_separation_threshold(double tol);

}  // namespace kerrkit
