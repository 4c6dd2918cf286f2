#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "kerrkit/charts.hpp"
#include "kerrkit/geometry_checks.hpp"
#include "kerrkit/integrate.hpp"
#include "kerrkit/params.hpp"

namespace kerrkit {

// Radial profiles behind the Cauchy-surface families.
class RadialProfiles {
 public:
  explicit RadialProfiles(const Kerr& k);

  const Kerr& kerr() const { return k_; }

  // (r^2+a^2)^2/Delta^2 - (a^2+M^2)/Delta, positive on (r+, inf).
  double f(double r) const;
  // y' = f^(1/2) with y - x -> 0 at r+; defined for r > r+.
  double y(double r) const;
  double y_prime(double r) const;
  // y on (r+, 3M], frozen at y(3M) beyond.
  double x_tilde(double r) const;
  double x_tilde_prime(double r) const;
  double x_tilde_n(double r, double n) const;  // max(-n, x_tilde)
  double x_tilde_n_prime(double r, double n) const;
  double x_n(double r, double n) const;  // min(r - 2M ln(r/M), n)
  double x_n_prime(double r, double n) const;

  // Quintic smoothstep: 1 below r- + eps, 0 above (r+ + r-)/2.
  double chi(double r) const;
  // v' = 1 + chi/(r - r-), v(r+) = r+.
  double v(double r) const;
  double v_prime(double r) const;
  // v at r = r- + e^ell, for points too close to r- to carry r itself.
  double v_log(double ell) const;

  // Solution of x(r) - r = -T on (r+, 2 r+); throws RootBracketError when the
  // bracket fails (T too small).
  double r_T(double T) const;
  // ln(r_T - r+), which keeps its precision for large T.
  double log_r_T_gap(double T) const;

  // Radii where the piecewise profiles switch branch.
  std::vector<double> x_n_kinks(double n) const;
  std::vector<double> x_tilde_n_kinks(double n) const;

  double mollifier_eps() const { return eps_; }

 private:
  Kerr k_;
  double eps_ = 0, mid_ = 0, J_ = 0, y3_ = 0;
};

// Fitted c in r_T - r+ ~ A e^{-cT} (least squares in log over the given T).
double fit_r_T_rate(const RadialProfiles& prof, const std::vector<double>& Ts);

struct SigmaT {
  double T = 0;
};
struct SigmaBar {
  double T = -5;
  double n = 10;
};
struct SigmaTilde {
  double T = -5;
  double n = 5;
};
struct ZT {
  double T = 12;
};
struct SigmaM {};

using SurfaceSpec = std::variant<SigmaT, SigmaBar, SigmaTilde, ZT, SigmaM>;

std::string surface_name(const SurfaceSpec& s);
// Block where u is defined: "M_I", "M_I+II" or "M".
std::string surface_block(const SurfaceSpec& s);
// Chart u is written in: BL_I, KerrStar or KBL.
Chart surface_chart(const SurfaceSpec& s);
// Regions the spec's block is made of.
std::vector<Region> surface_regions(const SurfaceSpec& s);

// u at the point (level set {u = 0}). The point is mapped to the spec's chart;
// DomainError when it lies outside the spec's block.
double surface_value(const RadialProfiles& prof, const SurfaceSpec& s, const SpacetimePoint& p);

// du . g^-1 du in the spec's chart; negative means grad u is timelike.
// DomainError within 1e-9 M of a branch switch of the profile.
double surface_gradient_norm(const RadialProfiles& prof, const SurfaceSpec& s,
                             const SpacetimePoint& p);

struct BoundCheck {
  double value = 0;  // -du.g^-1.du (or du.g^-1.du for the upper bound of Z)
  double bound = 0;
  double scale = 0;  // magnitude of the terms summed in du.g^-1.du
  bool upper = false;
  double margin() const { return upper ? bound - value : value - bound; }
  bool holds(double tol) const { return margin() >= -tol * std::max(1.0, scale); }
};

// The explicit bounds of the gradient computations: SigmaBar
// (2Mr(r^2+a^2) + (2Mr - a^2) Delta)/(Delta rho^2), SigmaTilde M^2/rho^2,
// and Z(T) for r < r_T the upper bound (-r^2 - 2Mr)/rho^2. Empty for the others.
std::optional<BoundCheck> gradient_bound(const RadialProfiles& prof, const SurfaceSpec& s,
                                         const SpacetimePoint& p);

// Quasi-random point of the spec's block in its chart, kept 1e-9 M away from
// the profile kinks and 1e-2 from the axis. Radii are spread logarithmically
// towards the horizons. SigmaM is a single surface, and U - V is not a time
// function off it when a != 0, so its points are drawn on {U = V}.
SpacetimePoint sample_surface_point(const RadialProfiles& prof, const SurfaceSpec& s,
                                    const std::vector<double>& u);

struct GradientSurvey {
  std::string name;
  double a = 0;
  int samples = 0;
  int timelike = 0;
  double worst_norm = -1e300;  // largest du.g^-1.du seen
  int bound_samples = 0;
  int bound_violations = 0;
  double worst_bound_margin = 1e300;  // relative to BoundCheck::scale
};

GradientSurvey gradient_survey(const RadialProfiles& prof, const SurfaceSpec& s, int n,
                               std::uint64_t seed, double bound_tol = 1e-10);

// A point of a geodesic in the coordinates the surfaces need. Points on a
// horizon tail carry ln|r - r_h| so the divergent profiles stay accurate.
struct TracePoint {
  Region block = Region::I;
  double r = 0, theta = 0;
  double t = 0;       // Boyer-Lindquist time of the block
  double tstar = 0;   // Kerr-star time
  double star_t = 0;  // star-Kerr time; NaN where the path dropped it at a horizon
  double ell_plus = std::numeric_limits<double>::quiet_NaN();
  double ell_minus = std::numeric_limits<double>::quiet_NaN();
};

// Both halves of an inextendible geodesic through a point.
struct MaximalPath {
  GeodesicPath backward;
  GeodesicPath forward;
};

MaximalPath integrate_maximal(const Kerr& k, const GeodesicState& s, const FirstIntegrals& I,
                              const IntegrateConfig& cfg);

// Points in order of increasing affine parameter, tails included.
std::vector<TracePoint> path_trace(const Kerr& k, const MaximalPath& p);

// u along a trace; +-inf where it overflows.
double trace_value(const RadialProfiles& prof, const SurfaceSpec& s, const TracePoint& q);

// Divergence surrogate: |u| beyond this counts as +-infinity.
constexpr double kDivergenceThreshold = 1e3;

struct CrossingReport {
  double sup_u = 0, inf_u = 0;
  bool sup_diverges = false, inf_diverges = false;
  int sign_changes = 0;
  bool enters_both = false;
  bool budget_limited = false;  // an end was cut off by the affine budget
  bool crosses_once() const { return sign_changes == 1 && enters_both; }
  // Not judged: the path ran out of budget before showing both sides.
  bool flagged_incomplete() const { return !crosses_once() && budget_limited; }
};

CrossingReport crossing_stats(const std::vector<double>& u, bool budget_limited);
CrossingReport crossing_report(const RadialProfiles& prof, const SurfaceSpec& s,
                               const MaximalPath& path);

// The null generator U = 0, V = s of the future horizon in KBL coordinates.
std::vector<SpacetimePoint> rest_photon(double theta, double phi, double s0, double s1, int n);

// Integration settings for paths checked against the spec (continues into
// M_II for the families defined there).
IntegrateConfig crossing_config(const SurfaceSpec& s);

struct CrossingSurvey {
  std::string name;
  double a = 0;
  int paths = 0;
  int crossed_once = 0;
  int flagged_incomplete = 0;
  int failures = 0;  // neither crossing once nor budget-limited
  std::vector<std::pair<std::string, int>> types;  // classification label counts
  double pass_fraction() const { return paths ? double(crossed_once) / paths : 0.0; }
};

// Future-directed null geodesics from M_I, from M_II where the spec reaches
// it, and zero-energy ergoregion paths for a != 0. Each source is drawn until
// every geodesic type it produced has per_type paths (or max_draws is spent);
// draws of a type already at quota are skipped.
CrossingSurvey crossing_survey(const RadialProfiles& prof, const SurfaceSpec& s, int per_type,
                               std::uint64_t seed, int max_draws = 2000);

}  // namespace kerrkit
