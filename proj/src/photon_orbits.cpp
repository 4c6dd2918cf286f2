#include "kerrkit/photon_orbits.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "kerrkit/errors.hpp"
#include "kerrkit/functions.hpp"

namespace kerrkit {

namespace {

// Root of f on [lo, hi] with f(lo), f(hi) of opposite signs, to machine precision.
double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Extremum of f on [0, pi]: grid scan, then golden section on the bracketing cell.
std::pair<double, double> maximize_theta(const std::function<double(double)>& f) {
  constexpr int n = 721;
  const double h = std::numbers::pi / (n - 1);
  int best = 0;
  double fbest = f(0.0);
  for (int i = 1; i < n; ++i) {
    const double v = f(i * h);
    if (v > fbest) {
      fbest = v;
      best = i;
    }
  }
  double lo = std::max(0.0, (best - 1) * h), hi = std::min(std::numbers::pi, (best + 1) * h);
  const double g = (std::sqrt(5.0) - 1) / 2;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < 100 && hi - lo > 1e-13; ++i) {
    if (f1 > f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    }
  }
  const double xm = 0.5 * (lo + hi);
  const double fm = f(xm);
  if (fm > fbest) return {xm, fm};
  return {best * h, fbest};
}

}  // namespace

double locus_discriminant(const Kerr& k, double r) {
  const double M = k.M(), a = k.a();
  return 4 * M * a * a - r * (r - 3 * M) * (r - 3 * M);
}

CriticalLocus critical_locus(const Kerr& k, double r0) {
  const double M = k.M(), a = k.a();
  if (a == 0.0) throw DomainError("critical locus is singular at a = 0; use radial_roots");
  if (std::abs(r0 - M) <= 1e-12 * M) throw DomainError("critical locus has a pole at r0 = M");
  if (r0 < k.r_minus()) throw DomainError("critical locus requested below r-");
  const double D = Delta(k, r0);
  CriticalLocus c;
  c.r0 = r0;
  c.xi = (M * (r0 * r0 - a * a) - r0 * D) / (a * (r0 - M));
  c.eta = r0 * r0 * r0 * locus_discriminant(k, r0) / (a * a * (r0 - M) * (r0 - M));
  return c;
}

std::pair<double, double> equatorial_photon_radii(const Kerr& k) {
  const double M = k.M();
  if (k.a() == 0.0) return {3 * M, 3 * M};
  auto f = [&](double r) { return locus_discriminant(k, r); };
  return {bisect(f, M, 3 * M), bisect(f, 3 * M, 4 * M)};
}

double orbit_T(const Kerr& k, double xi, double r, double theta) {
  return (sigma2(k, r, theta) - 2 * k.a() * k.M() * r * xi) / Delta(k, r);
}

double norm_vI(const Kerr& k, double r, double theta) {
  return bl_metric_cov(k, r, theta)(0, 0);
}

double norm_vH(const Kerr& k, double r, double theta) {
  const Eigen::Matrix4d g = bl_metric_cov(k, r, theta);
  const double W = k.h.Omega_H;
  return g(0, 0) + 2 * W * g(0, 3) + W * W * g(3, 3);
}

OrbitReport orbit_checks(const Kerr& k, double r0) {
  if (r0 <= k.r_plus()) throw DomainError("orbit checks need r0 > r+");
  OrbitReport rep;
  rep.locus = critical_locus(k, r0);
  const double xi = rep.locus.xi;
  auto [tT, negT] = maximize_theta([&](double th) { return -std::abs(orbit_T(k, xi, r0, th)); });
  rep.theta_min_T = tT;
  rep.min_abs_T = -negT;
  std::tie(rep.theta_max_vH, rep.max_norm_vH) =
      maximize_theta([&](double th) { return norm_vH(k, r0, th); });
  std::tie(rep.theta_max_vI, rep.max_norm_vI) =
      maximize_theta([&](double th) { return norm_vI(k, r0, th); });
  rep.timelike_everywhere = rep.max_norm_vH < 0 && rep.max_norm_vI < 0;
  return rep;
}

std::vector<LocusSweepRow> locus_sweep(double M, double a, int n_r0) {
  const Kerr k(M, a);
  auto [lo, hi] = equatorial_photon_radii(k);
  std::vector<LocusSweepRow> rows;
  const int n = std::max(n_r0, 2);
  for (int i = 0; i < n; ++i) {
    // Chebyshev spacing concentrates points at the equatorial ends.
    const double u = 0.5 - 0.5 * std::cos(std::numbers::pi * i / (n - 1));
    const double r0 = lo + (hi - lo) * u;
    rows.push_back({a, orbit_checks(k, r0)});
  }
  return rows;
}

double fitted_locus_constant(const std::vector<LocusSweepRow>& rows, double M) {
  double C = 0;
  for (const auto& row : rows)
    C = std::max(C, std::abs(row.report.locus.r0 - 3 * M) / (row.a / M) / M);
  return C;
}

double timelike_threshold(double lo, double hi, double tol, int n_r0) {
  auto ok = [&](double a) {
    for (const auto& row : locus_sweep(1.0, a, n_r0))
      if (!row.report.timelike_everywhere) return false;
    return true;
  };
  if (ok(hi)) return hi;
  if (!ok(lo)) return lo;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

double locus_separation_threshold(double tol) {
  auto separated = [](double a) {
    const Kerr k(1.0, a);
    const double r_small = bisect([&](double r) { return -locus_discriminant(k, r); }, 0.0, 1.0);
    return r_small < k.r_minus();
  };
  double lo = 1e-3, hi = 1.0 - 1e-12;
  if (separated(hi)) return hi;
  if (!separated(lo)) return lo;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (separated(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace kerrkit
