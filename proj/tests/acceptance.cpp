// Acceptance run: one line per criterion, exit status 0 iff all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "kerrkit/causal.hpp"
#include "kerrkit/classify.hpp"
#include "kerrkit/errors.hpp"
#include "kerrkit/geodesic_sampling.hpp"
#include "kerrkit/geometry_checks.hpp"
#include "kerrkit/killing.hpp"
#include "kerrkit/metric.hpp"
#include "kerrkit/photon_orbits.hpp"
#include "kerrkit/roots.hpp"
#include "kerrkit/sampling.hpp"
#include "kerrkit/tetrad.hpp"
#include "kerrkit/thermal.hpp"

using namespace kerrkit;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [FAILED]");
  }
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string sci(double x) { return fmt("%.2e", x); }

// Hand-expanded quartic, independent of the library's potentials.
double quartic_R(double a, double L, double Q, double r) {
  return r * r * r * r + (a * a - L * L - Q) * r * r + ((a - L) * (a - L) + Q) * 2 * r - a * a * Q;
}
double quartic_R_prime(double a, double L, double Q, double r) {
  return 4 * r * r * r + 2 * (a * a - L * L - Q) * r + ((a - L) * (a - L) + Q) * 2;
}

Outcome geometry_isometries() {
  Outcome o;
  double worst_iso = 0;
  std::string worst_pair;
  for (double a : {0.0, 0.3, 0.8}) {
    const Kerr k(1, a);
    for (const auto& pair : overlapping_chart_pairs()) {
      const auto rep = isometry_check(k, pair, 1000, 7);
      if (rep.max_residual > worst_iso || std::isnan(rep.max_residual)) {
        worst_iso = rep.max_residual;
        worst_pair = std::string(chart_name(pair.from)) + "->" + chart_name(pair.to);
      }
    }
  }
  o.require(worst_iso < 1e-6, std::to_string(overlapping_chart_pairs().size()) +
                                  " pairs x 1000 points x 3 spins, worst isometry residual " + sci(worst_iso) +
                                  " (" + worst_pair + ") < 1e-6");
  // det g = -rho^4 sin^2 theta, relative
  double worst_det = 0;
  for (double a : {0.0, 0.3, 0.8}) {
    const Kerr k(1, a);
    Halton h(4, 13);
    for (int i = 0; i < 1000; ++i) {
      const auto u = h.next();
      for (Region reg : {Region::I, Region::II, Region::IPrime, Region::IIPrime}) {
        const auto bl = sample_bl_point(k, reg, u);
        std::vector<SpacetimePoint> pts{bl};
        if (reg == Region::I || reg == Region::II) pts.push_back(chart_map(k, bl, Chart::KerrStar));
        for (const auto& p : pts) {
          const double r = p.x[1], th = p.x[2];
          const double rr = r * r + a * a * std::cos(th) * std::cos(th);
          const double exact = -rr * rr * std::sin(th) * std::sin(th);
          worst_det = std::max(worst_det, std::abs(metric(k, p).det / exact - 1));
        }
      }
      // Kerr-star on the future horizon itself
      const SpacetimePoint hp(Chart::KerrStar, u[0], k.r_plus(), 0.05 + 3.0 * u[2], 2 * pi * u[3]);
      const double th = hp.x[2], rr = k.r_plus() * k.r_plus() + a * a * std::cos(th) * std::cos(th);
      worst_det = std::max(worst_det, std::abs(metric(k, hp).det / (-rr * rr * std::sin(th) * std::sin(th)) - 1));
    }
  }
  o.require(worst_det < 1e-10, "det g = -rho^4 sin^2 in BL and Kerr-star, worst relative " + sci(worst_det) + " < 1e-10");
  return o;
}

Outcome horizon_constants() {
  Outcome o;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(0, 1);
  double worst = 0, worst_T = 0;
  for (int i = 0; i < 20; ++i) {
    const double M = 0.2 + 5 * U(rng), a = M * (0.01 + 0.98 * U(rng));
    const auto h = horizon_quantities({M, a});
    const double rp = M + std::sqrt((M - a) * (M + a)), rm = a * a / rp;
    worst = std::max(worst, std::abs(h.kappa_plus / h.kappa_minus + rm / rp) / (rm / rp));
    worst_T = std::max(worst_T, std::abs(h.T_H - h.kappa_plus / (2 * pi)) / h.T_H);
  }
  o.require(worst < 1e-12, "kappa+/kappa- = -r-/r+ on 20 sampled (M,a), worst relative " + sci(worst) + " < 1e-12");
  o.require(worst_T < 1e-15, "T_H = kappa+/2pi, worst relative " + sci(worst_T));
  double worst_s = 0;
  for (double M : {0.5, 1.0, 3.0}) worst_s = std::max(worst_s, std::abs(horizon_quantities({M, 0}).kappa_plus * 4 * M - 1));
  o.require(worst_s < 1e-15, "a = 0 gives kappa+ = 1/(4M), worst relative " + sci(worst_s));
  return o;
}

Outcome tetrads() {
  Outcome o;
  double worst[4] = {0, 0, 0, 0};
  int count[4] = {0, 0, 0, 0};
  for (double a : {0.0, 0.5, 0.9}) {
    const Kerr k(1, a);
    Halton h(4, 19);
    const int n = a == 0.0 ? 334 : 333;
    for (int i = 0; i < n; ++i) {
      const auto u = h.next();
      const auto bl = sample_bl_point(k, Region::I, u);
      const Eigen::Matrix4d g = covariant_metric(k, bl);
      for (TetradKind kind : {TetradKind::Basic, TetradKind::FoliationAdapted}) {
        const auto t = null_tetrad(k, bl, kind);
        worst[int(kind)] = std::max({worst[int(kind)], tetrad_defect(g, t), frame_defect(g, t)});
        ++count[int(kind)];
      }
      const Region reg = Region(i % 4);
      const auto q = chart_map(k, sample_bl_point(k, reg, u, 12.0), Chart::KBL);
      const auto tk = null_tetrad(k, q, TetradKind::KBL);
      const Eigen::Matrix4d gk = covariant_metric(k, q);
      worst[2] = std::max({worst[2], tetrad_defect(gk, tk), frame_defect(gk, tk)});
      ++count[2];
      const auto c = chart_map(k, bl, Chart::ConformalKerrStar);
      const auto tc = null_tetrad(k, c, TetradKind::Conformal);
      worst[3] = std::max(worst[3], tetrad_defect(covariant_metric(k, c), tc));
      ++count[3];
    }
  }
  const char* names[4] = {"basic", "foliation-adapted", "KBL", "conformal"};
  for (int j = 0; j < 4; ++j)
    o.require(count[j] >= 1000 && worst[j] < 1e-10,
              std::string(names[j]) + " " + std::to_string(count[j]) + " points, worst " + sci(worst[j]) + " < 1e-10");
  double worst_l = 0;
  for (double a : {0.0, 0.5, 0.9})
    for (double th : {0.3, 1.2, 2.7}) {
      const auto t = null_tetrad(Kerr(1, a), {Chart::ConformalKerrStar, 0.0, 1e-6, th, 0.4}, TetradKind::Conformal);
      worst_l = std::max(worst_l, (t.l - Eigen::Vector4d(std::sqrt(2.0), 0, 0, 0)).cwiseAbs().maxCoeff());
    }
  o.require(worst_l < 1e-4, "conformal l at w = 1e-6 equals sqrt2 d_t*, worst " + sci(worst_l) + " < 1e-4");
  return o;
}

Outcome conservation() {
  Outcome o;
  Halton h(6, 23);
  double worst_drift = 0, worst_res = 0;
  int n = 0;
  for (int i = 0; i < 200; ++i) {
    const auto u = h.next();
    // strata: spin band x block
    const double a = 0.9 * (double(i % 4) + u[0]) / 4;
    const Kerr k(1, a);
    SampledGeodesic g;
    if (i % 5 == 4 && a > 0.01) g = sample_zero_energy_geodesic(k, u);
    else g = sample_null_geodesic(k, i % 5 == 3 ? Region::II : Region::I, u);
    IntegrateConfig cfg;
    cfg.max_affine = 1e3;
    const GeodesicPath p = integrate(k, g.state, g.integrals, cfg);
    worst_drift = std::max({worst_drift, p.max_E_drift, p.max_L_drift, p.max_K_drift, p.max_null_drift});
    worst_res = std::max(worst_res, p.max_radial_residual);
    ++n;
  }
  o.require(n == 200 && worst_drift < 1e-8, std::to_string(n) + " paths, worst drift of E, L, K, null norm " + sci(worst_drift) + " < 1e-8");
  o.require(worst_res < 1e-8, "worst radial-equation residual " + sci(worst_res) + " < 1e-8");
  return o;
}

// E = 0 null geodesic in M_II: Theta = K - L^2/sin^2 >= 0 fixes K >= L^2/sin^2.
SampledGeodesic zero_energy_interior(const Kerr& k, const std::vector<double>& u) {
  SampledGeodesic g;
  const double rp = k.r_plus(), rm = k.r_minus();
  const double r = rm + (rp - rm) * (0.02 + 0.96 * u[1]);
  const double th = 0.2 + (pi - 0.4) * u[2];
  const double L = (u[3] < 0.5 ? -1 : 1) * (0.1 + 3 * u[4]);
  const double K = L * L / (std::sin(th) * std::sin(th)) * (1 + 2 * u[5]);
  g.integrals = {0.0, L, K - L * L};
  g.state.point = SpacetimePoint(Chart::BL_II, 0, r, th, 0);
  g.state.sign_r = -1;
  g.state.sign_theta = u[0] < 0.5 ? 1 : -1;
  return g;
}

Outcome classification() {
  Outcome o;
  struct Table {
    const char* name;
    bool zero_energy;
    double a_min, a_max;
    std::function<SampledGeodesic(const Kerr&, const std::vector<double>&)> draw;
  };
  const std::vector<Table> tables{
      {"M_I E=0", true, 0.05, 0.9, [](const Kerr& k, const auto& u) { return sample_zero_energy_geodesic(k, u); }},
      {"M_I E!=0", false, 0.0, 0.9, [](const Kerr& k, const auto& u) { return sample_null_geodesic(k, Region::I, u); }},
      {"M_II E=0", true, 0.0, 0.9, [](const Kerr& k, const auto& u) { return zero_energy_interior(k, u); }},
      {"M_II E!=0", false, 0.0, 0.9, [](const Kerr& k, const auto& u) { return sample_null_geodesic(k, Region::II, u); }},
  };
  for (std::size_t t = 0; t < tables.size(); ++t) {
    const Table& tab = tables[t];
    Halton h(6, 31 + t);
    int samples = 0, flagged = 0, disagree = 0;
    std::string first;
    while (samples < 200) {
      const auto u = h.next();
      const Kerr k(1, tab.a_min + (tab.a_max - tab.a_min) * u[0]);
      const SampledGeodesic g = tab.draw(k, u);
      if ((g.integrals.E == 0) != tab.zero_energy) continue;
      ++samples;
    const GeodesicType a = classify(k, g.integrals, g.state);
      const GeodesicType b = classify_by_integration(k, g.integrals, g.state);
      if (a.ambiguous || b.ambiguous) {
        ++flagged;
        continue;
      }
      if (!same_type(a, b)) {
        ++disagree;
        if (first.empty()) first = a.label() + " vs " + b.label();
      }
    }
    o.require(disagree == 0, std::string(tab.name) + ": " + std::to_string(samples) + " samples, " +
                                 std::to_string(disagree) + " disagreements, " + std::to_string(flagged) + " flagged" +
                                 (first.empty() ? "" : " (first: " + first + ")"));
  }
  return o;
}

Outcome photon_locus() {
  Outcome o;
  double worst_R = 0, worst_Rp = 0;
  std::vector<double> C;
  for (double a : {0.01, 0.05, 0.1, 0.2}) {
    const auto rows = locus_sweep(1, a, 1001);
    double c = 0;
    for (const auto& row : rows) {
      const auto& l = row.report.locus;
      worst_R = std::max(worst_R, std::abs(quartic_R(a, l.xi, l.eta, l.r0)));
      worst_Rp = std::max(worst_Rp, std::abs(quartic_R_prime(a, l.xi, l.eta, l.r0)));
      c = std::max(c, std::abs(l.r0 - 3) / a);
    }
    C.push_back(c);
  }
  o.require(worst_R < 1e-9 && worst_Rp < 1e-9,
            "a in {0.01,0.05,0.1,0.2}, 1001 radii each: max |R(r0)| " + sci(worst_R) + ", |R'(r0)| " + sci(worst_Rp) + " < 1e-9");
  // r (r - 3)^2 = 4 a^2 near r = 3 gives |r0 - 3| ~ 2a/sqrt3.
  const double C0 = 2 / std::sqrt(3.0);
  bool linear = true;
  const double as[4] = {0.01, 0.05, 0.1, 0.2};
  for (int i = 0; i < 4; ++i) linear = linear && C[i] >= C0 - 1e-9 && C[i] - C0 < 0.3 * as[i];
  for (int i = 1; i < 4; ++i) linear = linear && C[i - 1] <= C[i];
  o.require(linear, "max|r0 - 3|/a = " + fmt("%.6f", C[0]) + " at a = 0.01 -> 2/sqrt3 = " + fmt("%.6f", C0) + ", monotone in a");
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0, 1);
  int tested = 0, inside = 0;
  while (tested < 10000) {
    const Kerr k(1, 0.99 * U(rng));
    const FirstIntegrals I{U(rng) < 0.1 ? 0.0 : 2 * U(rng) - 1, 12 * (U(rng) - 0.5), 40 * U(rng) - 5};
    if (!admissible(k, I)) continue;
    ++tested;
    const auto ra = radial_roots(k, I);
    if (ra.identically_zero) continue;
    for (const auto& root : ra.roots)
      if (root.multiplicity >= 2 && root.r > k.r_minus() && root.r < k.r_plus()) ++inside;
  }
  o.require(inside == 0, std::to_string(tested) + " admissible integrals, " + std::to_string(inside) + " double zeros in (r-, r+)");
  return o;
}

Outcome timelike_at_orbits() {
  Outcome o;
  double minT = 1e300, maxH = -1e300, maxI = -1e300;
  for (const auto& row : locus_sweep(1, 0.1, 201)) {
    minT = std::min(minT, row.report.min_abs_T);
    maxH = std::max(maxH, row.report.max_norm_vH);
    maxI = std::max(maxI, row.report.max_norm_vI);
  }
  o.require(minT > 0, "a = 0.1, 201 orbits: min |T| = " + fmt("%.4f", minT) + " > 0");
  o.require(maxH < 0 && maxI < 0, "max g(v_H,v_H) = " + fmt("%.4f", maxH) + ", max g(v_I,v_I) = " + fmt("%.4f", maxI) + " < 0");
  double worst = 0;
  const Kerr s(1, 0);
  for (double th : {0.0, 0.4, pi / 2, 2.9, pi}) {
    worst = std::max(worst, std::abs(norm_vI(s, 3, th) + 1.0 / 3));
    if (th > 0 && th < pi)
      worst = std::max(worst, std::abs(killing_norm(s, KillingField::V_I, {Chart::BL_I, 0, 3, th, 0}) + 1.0 / 3));
  }
  o.require(worst < 1e-12, "a = 0: g(v_I,v_I)(r=3) = -1/3 within " + sci(worst) + " < 1e-12");
  return o;
}

const std::vector<SurfaceSpec>& catalog() {
  static const std::vector<SurfaceSpec> c{SigmaT{3}, SigmaBar{}, SigmaTilde{}, ZT{}, SigmaM{}};
  return c;
}

Outcome cauchy_gradients() {
  Outcome o;
  int surveys = 0, bad = 0, bound_samples = 0, violations = 0;
  double worst = -1e300, worst_margin = 1e300;
  std::string first;
  for (double a : {0.0, 0.1, 0.3, 0.5}) {
    const RadialProfiles prof{Kerr(1, a)};
    for (const auto& s : catalog()) {
      const GradientSurvey g = gradient_survey(prof, s, 10000, 17, 1e-10);
      ++surveys;
      worst = std::max(worst, g.worst_norm);
      bound_samples += g.bound_samples;
      violations += g.bound_violations;
      if (g.bound_samples) worst_margin = std::min(worst_margin, g.worst_bound_margin);
      if (g.samples != 10000 || g.timelike != g.samples) {
        ++bad;
        if (first.empty()) first = g.name + " a=" + fmt("%.1f", a);
      }
    }
  }
  o.require(bad == 0, std::to_string(surveys) + " surveys x 10^4 points, all gradients timelike (largest du.du = " + sci(worst) + ")" +
                          (first.empty() ? "" : ", first failure " + first));
  // SigmaTilde below r = 3 on a radial grid: -|du|^2 >= 1/rho^2.
  double tilde_margin = 1e300;
  for (double a : {0.0, 0.1, 0.3, 0.5}) {
    const RadialProfiles prof{Kerr(1, a)};
    const SigmaTilde st{};
    const auto kinks = prof.x_tilde_n_kinks(st.n);
    for (int i = 1; i < 400; ++i) {
      const double r = kinks[0] + (3 - kinks[0]) * i / 400;
      for (double th : {0.1, 0.7, pi / 2, 2.9}) {
        const double rr = r * r + a * a * std::cos(th) * std::cos(th);
        tilde_margin = std::min(tilde_margin, -surface_gradient_norm(prof, st, {Chart::BL_I, 0, r, th, 0}) - 1 / rr);
      }
    }
  }
  o.require(violations == 0 && bound_samples > 0 && tilde_margin >= -1e-10,
            "explicit bounds on " + std::to_string(bound_samples) + " points: " + std::to_string(violations) +
                " violations at slack 1e-10 (worst relative margin " + sci(worst_margin) + "; 1/rho^2 grid margin " + sci(tilde_margin) + ")");
  return o;
}

Outcome crossings() {
  Outcome o;
  int surveys = 0, paths = 0, once = 0, flagged = 0, failures = 0;
  double worst_fraction = 1;
  std::string worst_name;
  for (double a : {0.0, 0.1, 0.3, 0.5}) {
    const RadialProfiles prof{Kerr(1, a)};
    for (const auto& s : catalog()) {
      const CrossingSurvey c = crossing_survey(prof, s, 20, 3);
      ++surveys;
      paths += c.paths;
      once += c.crossed_once;
      flagged += c.flagged_incomplete;
      failures += c.failures;
      if (c.pass_fraction() < worst_fraction) {
        worst_fraction = c.pass_fraction();
        worst_name = c.name + " a=" + fmt("%.1f", a);
      }
      if (c.crossed_once + c.flagged_incomplete != c.paths) ++failures;
    }
  }
  o.require(worst_fraction >= 0.95, std::to_string(surveys) + " level sets, " + std::to_string(paths) +
                                        " paths; lowest single-crossing fraction " + fmt("%.4f", worst_fraction) +
                                        (worst_name.empty() ? "" : " (" + worst_name + ")") + " >= 0.95");
  o.require(failures == 0, std::to_string(once) + " crossed once, " + std::to_string(flagged) +
                               " flagged incomplete, " + std::to_string(failures) + " other");
  return o;
}

Outcome thermal_identity() {
  Outcome o;
  for (const auto& tf : {log_gaussian(0, 1), gaussian(4, 0.15), bump(2, 1)}) {
    std::vector<double> res;
    for (int N : {1 << 12, 1 << 13, 1 << 14}) {
      ProjectorGrids g;
      g.N = N;
      g.resolution_tol = std::numeric_limits<double>::infinity();
      res.push_back(compare_projectors(tf, g).residual);
    }
    o.require(res[2] < 1e-4 && res[1] < res[0] && res[2] < res[1],
              tf.name + " residual " + sci(res[0]) + " -> " + sci(res[1]) + " -> " + sci(res[2]));
  }
  for (double kappa : {1.0, 0.25, 2.0}) {
    const int N = 1 << 14;
    const SampledFunction f = sample(LineGrid{60 / kappa, N}, [](double u) { return std::complex<double>(std::exp(-u * u / 0.16)); });
    UnruhOptions opt;
    opt.U = LineGrid{40, N};
    const double r = unruh_identity_residual(kappa, f, opt);
    o.require(r < 1e-4, "beta = 2pi/kappa at kappa = " + fmt("%g", kappa) + ": residual " + sci(r) + " < 1e-4");
  }
  double worst = 0;
  for (double beta : {0.5, 2 * pi, 8 * pi})
    for (int i = -2000; i <= 2000; ++i) {
      const double lambda = i * 0.01;
      worst = std::max(worst, std::abs(fermi_factor(beta, 1, lambda) + fermi_factor(beta, -1, lambda) - 1));
    }
  o.require(worst <= 1e-15, "chi+ + chi- = 1 within " + sci(worst) + " <= 1e-15");
  return o;
}

}  // namespace

int main() {
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"geometry isometries", geometry_isometries},
      {"horizon constants", horizon_constants},
      {"null tetrads", tetrads},
      {"geodesic conservation", conservation},
      {"classification oracle equivalence", classification},
      {"photon locus", photon_locus},
      {"timelike Killing fields at the orbits", timelike_at_orbits},
      {"Cauchy catalog gradients and bounds", cauchy_gradients},
      {"crossing property", crossings},
      {"thermal identity", thermal_identity},
  };
  int failed = 0, i = 0;
  for (const auto& c : criteria) {
    ++i;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d %s  %s: %s (%.1f s)\n", i, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs);
    failed += !o.pass;
  }
  std::printf("%d of %d criteria pass\n", i - failed, i);
  return failed ? 1 : 0;
}
