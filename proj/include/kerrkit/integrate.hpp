#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "kerrkit/charts.hpp"
#include "kerrkit/geodesics.hpp"
#include "kerrkit/geometry_checks.hpp"
#include "kerrkit/params.hpp"

namespace kerrkit {

struct GeodesicState {
  SpacetimePoint point;  // BL_I or BL_II
  int sign_r = 1;
  int sign_theta = 1;
  double affine = 0;
};

enum class EventKind {
  HorizonCrossing,
  Escape,
  TurningPointR,
  TurningPointTheta,
  DoubleRootApproach,
  AxisApproach,
  Incomplete,
};

const char* event_name(EventKind k);

struct PathEvent {
  EventKind kind = EventKind::Incomplete;
  double affine = 0;
  double r = 0;
  double theta = 0;
  std::map<std::string, double> data;
};

struct PathSample {
  double affine = 0;
  Region block = Region::I;
  Eigen::Vector4d x;  // Boyer-Lindquist (t, r, theta, phi) of the block
  Eigen::Vector4d v;  // Boyer-Lindquist velocity; t and phi entries are NaN at Delta = 0
  double tstar = 0, phistar = 0;  // Kerr-star
  // Kerr-star / star-Kerr times; each becomes NaN once the path has crossed
  // the horizon where it diverges.
  double star_t = 0, star_phi = 0;
  double p_r = 0, p_theta = 0;  // rho^2 rdot, rho^2 thetadot
  // Relative drifts; NaN where the Boyer-Lindquist recovery is not evaluated.
  double E_drift = 0, L_drift = 0, K_drift = 0, null_drift = 0;
  double radial_residual = 0;  // |p_r^2 - R| / (1 + |R|)
};

// Continuation of a horizon-bound path in l = ln|r - r_h| past the standoff.
// The equations in l are regular at l = -infinity, so the coordinate times
// can be followed to arbitrarily large values.
struct TailSample {
  double log_distance = 0;
  double theta = 0;
  double tstar = 0, phistar = 0;
  double star_t = 0, star_phi = 0;
  double t_bl = 0;  // Boyer-Lindquist time of the block the path is in
};

struct HorizonTail {
  double r_h = 0;
  Region block = Region::I;
  bool tstar_regular = true;  // false when the star-Kerr time is the finite one
  std::vector<TailSample> samples;
};

struct IntegrateConfig {
  double rtol = 1e-12;
  double atol = 1e-13;
  double max_affine = 1e3;
  double r_max = 1e3;              // escape radius, in units of M
  double horizon_standoff = 1e-8;  // in units of M
  double double_root_delta = 1e-5; // in units of M
  bool continue_through_horizon = false;
  bool horizon_tail = true;
  double tail_span = 3000;         // extent of the tail in ln|r - r_h|
  double tail_step = 0.5;
  long max_steps = 5'000'000;
  bool store_samples = true;
};

struct GeodesicPath {
  FirstIntegrals integrals;
  std::vector<PathSample> samples;
  std::vector<PathEvent> events;
  std::optional<HorizonTail> tail;
  bool spherical = false;  // started on a double root of R; r held fixed
  EventKind termination = EventKind::Incomplete;
  double end_radius = 0;   // horizon or double-root radius at termination
  long steps = 0;
  double max_E_drift = 0, max_L_drift = 0, max_K_drift = 0, max_null_drift = 0;
  double max_radial_residual = 0;
};

// Dormand-Prince 5(4) on the regular system in affine parameter
//   r' = p_r/rho^2, p_r' = R'(r)/(2 rho^2), theta' = p_theta/rho^2,
//   p_theta' = Theta'(theta)/(2 rho^2),
// with Kerr-star and star-Kerr times carried as quadratures. Radial and polar
// turning points are smooth sign changes of p_r and p_theta.
GeodesicPath integrate(const Kerr& k, const GeodesicState& initial, const FirstIntegrals& I,
                       const IntegrateConfig& cfg = {});

// The same null geodesic traversed backwards: integrals (-E, -L, Q), both
// signs flipped.
GeodesicState reversed_state(const GeodesicState& s);
FirstIntegrals reversed_integrals(const FirstIntegrals& I);

}  // namespace kerrkit
