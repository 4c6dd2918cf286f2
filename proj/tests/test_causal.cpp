#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/LU>

#include "doctest.h"
#include "kerrkit/causal.hpp"
#include "kerrkit/errors.hpp"
#include "kerrkit/geodesics.hpp"
#include "kerrkit/metric.hpp"

using namespace kerrkit;

namespace {

struct Horizons {
  double rp, rm, kp, km;
};

Horizons horizons(double M, double a) {
  const double s = std::sqrt(M * M - a * a);
  Horizons h{M + s, M - s, 0, 0};
  h.kp = (h.rp - h.rm) / (2 * (h.rp * h.rp + a * a));
  h.km = (h.rm - h.rp) / (2 * (h.rm * h.rm + a * a));
  return h;
}

double delta(double M, double a, double r) { return r * r - 2 * M * r + a * a; }

double f_oracle(double M, double a, double r) {
  const double D = delta(M, a, r), q = r * r + a * a;
  return q * q / (D * D) - (a * a + M * M) / D;
}

// dx/dr = (r^2+a^2)/Delta, integrated in closed form.
double x_oracle(double M, double a, double r) {
  const Horizons h = horizons(M, a);
  double x = r + std::log(std::abs(r - h.rp)) / (2 * h.kp);
  if (a != 0) x += std::log(std::abs(r - h.rm)) / (2 * h.km);
  return x;
}

// Boyer-Lindquist inverse metric written out.
Eigen::Matrix4d bl_inverse(double M, double a, double r, double th) {
  const double s = std::sin(th), c = std::cos(th);
  const double D = delta(M, a, r), rho2 = r * r + a * a * c * c;
  const double q = r * r + a * a, Sig2 = q * q - a * a * D * s * s;
  Eigen::Matrix4d g = Eigen::Matrix4d::Zero();
  g(0, 0) = -Sig2 / (D * rho2);
  g(0, 3) = g(3, 0) = -2 * M * a * r / (D * rho2);
  g(1, 1) = D / rho2;
  g(2, 2) = 1 / rho2;
  g(3, 3) = (D - a * a * s * s) / (D * rho2 * s * s);
  return g;
}

double smoothstep_chi(double r, const Horizons& h) {
  const double eps = 0.1 * (h.rp - h.rm), lo = h.rm + eps, hi = 0.5 * (h.rp + h.rm);
  const double s = std::clamp((r - lo) / (hi - lo), 0.0, 1.0);
  return 1 - s * s * s * (10 - 15 * s + 6 * s * s);
}

const TailSample& tail_end(const GeodesicPath& p) { return p.tail->samples.back(); }

// dt*/d ln|r - r_h| over the last stretch of a horizon tail.
double tail_slope(const GeodesicPath& p) {
  const auto& s = p.tail->samples;
  const auto& b = s.back();
  const auto& m = s[s.size() / 2];
  return (b.tstar - m.tstar) / (b.log_distance - m.log_distance);
}

}  // namespace

TEST_CASE("radial profiles") {
  for (double a : {0.0, 0.1, 0.3, 0.5}) {
    CAPTURE(a);
    const Kerr k(1, a);
    const RadialProfiles prof(k);
    const Horizons h = horizons(1, a);

    SUBCASE("f is positive outside r+ and y' = f^(1/2)") {
      for (double d : {1e-6, 1e-3, 0.1, 1.0, 5.0, 50.0}) {
        const double r = h.rp + d;
        CHECK(prof.f(r) > 0);
        CHECK(prof.f(r) == doctest::Approx(f_oracle(1, a, r)).epsilon(1e-12));
        const double e = 1e-4 * d;
        const double dy = (prof.y(r + e) - prof.y(r - e)) / (2 * e);
        CHECK(dy == doctest::Approx(std::sqrt(f_oracle(1, a, r))).epsilon(1e-6));
      }
    }
    SUBCASE("y matches x at the horizon") {
      const double r = h.rp + 1e-6;
      CHECK(std::abs(prof.y(r) - x_oracle(1, a, r)) < 1e-6);
      // and the gap keeps shrinking
      CHECK(std::abs(prof.y(h.rp + 1e-9) - x_oracle(1, a, h.rp + 1e-9)) <
            std::abs(prof.y(h.rp + 1e-3) - x_oracle(1, a, h.rp + 1e-3)));
    }
    SUBCASE("v is r outside r+ and falls without bound towards r-") {
      for (double r : {h.rp, h.rp + 1e-9, 2.5, 10.0, 1e3}) CHECK(prof.v(r) == r);
      if (a != 0) {
        double prev = prof.v(h.rm + 1e-2);
        for (int e = 3; e <= 14; ++e) {
          const double v = prof.v(h.rm + std::pow(10.0, -e));
          CHECK(v < prev);
          prev = v;
        }
        CHECK(prof.v_log(-700) < -600);
        // same r- as the library: v' ~ 1/(r - r-) magnifies any rounding in it
        const double rm = prof.kerr().r_minus(), r = rm + 1e-7;
        CHECK(prof.v_log(std::log(r - rm)) == doctest::Approx(prof.v(r)).epsilon(1e-12));
      }
    }
    SUBCASE("v' = 1 + chi/(r - r-) with the quintic mollifier") {
      const int n = 40;
      for (int i = 1; i < n; ++i) {
        const double r = h.rm + (h.rp - h.rm) * i / n;
        const double chi = smoothstep_chi(r, h);
        CHECK(prof.chi(r) == doctest::Approx(chi).epsilon(1e-12));
        const double e = 1e-5 * (h.rp - h.rm);
        const double dv = (prof.v(r + e) - prof.v(r - e)) / (2 * e);
        CHECK(dv == doctest::Approx(1 + chi / (r - h.rm)).epsilon(1e-6));
      }
    }
    SUBCASE("r_T solves x(r) - r = -T") {
      for (double T : {10.0, 12.0, 20.0}) {
        const double rT = prof.r_T(T);
        CHECK(rT > h.rp);
        CHECK(rT < 2 * h.rp);
        if (rT - h.rp > 1e-10)
          CHECK(x_oracle(1, a, rT) - rT == doctest::Approx(-T).epsilon(1e-9));
      }
      CHECK_THROWS_AS(prof.r_T(-50), RootBracketError);
    }
  }
}

TEST_CASE("r_T approaches r+ exponentially") {
  const double a = 0.3;
  const Kerr k(1, a);
  const RadialProfiles prof(k);
  const Horizons h = horizons(1, a);
  // r_T - r+ = e^{-2 kappa+ T} (r_T - r-)^{r-/r+}; iterate from r_T - r- = r+ - r-
  auto gap = [&](double T) {
    double d = 0;
    for (int i = 0; i < 50; ++i) d = std::exp(-2 * h.kp * T) * std::pow(h.rp - h.rm + d, h.rm / h.rp);
    return d;
  };
  for (double T : {10.0, 20.0, 40.0, 200.0})
    CHECK(std::exp(prof.log_r_T_gap(T)) == doctest::Approx(gap(T)).epsilon(1e-9));

  const double c = fit_r_T_rate(prof, {20, 25, 30, 35, 40});
  CHECK(c > 0);
  CHECK(c == doctest::Approx(2 * h.kp).epsilon(1e-6));
  // (r_T - r+) e^{cT} stays at the prefactor (r+ - r-)^{r-/r+}, which exceeds 1
  const double pref = std::pow(h.rp - h.rm, h.rm / h.rp);
  CHECK(pref > 1);
  for (double T : {20.0, 30.0, 40.0, 80.0})
    CHECK(prof.log_r_T_gap(T) + c * T == doctest::Approx(std::log(pref)).epsilon(1e-4));
}

TEST_CASE("gradient norms against written-out inverse metrics") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0, 1);
  for (double a : {0.0, 0.3}) {
    CAPTURE(a);
    const Kerr k(1, a);
    const RadialProfiles prof(k);
    const Horizons h = horizons(1, a);
    for (int i = 0; i < 200; ++i) {
      const double r = h.rp + std::exp(std::log(1e-4) + U(rng) * std::log(1e6));
      const double th = 0.05 + (std::numbers::pi - 0.1) * U(rng);
      const SpacetimePoint p(Chart::BL_I, 0.3, r, th, 1.0);
      const Eigen::Matrix4d gi = bl_inverse(1, a, r, th);
      CHECK(surface_gradient_norm(prof, SigmaT{0}, p) == doctest::Approx(gi(0, 0)).epsilon(1e-10));
      CHECK(gi(0, 0) < 0);

      const SigmaBar sb{-5, 10};
      bool near_kink = false;
      for (double kr : prof.x_n_kinks(sb.n)) near_kink |= std::abs(r - kr) < 1e-6;
      if (!near_kink) {
        const double xp = r - 2 * std::log(r) < sb.n ? 1 - 2 / r : 0.0;
        Eigen::Vector4d du(1, xp, 0, 0);
        CHECK(surface_gradient_norm(prof, sb, p) == doctest::Approx(du.dot(gi * du)).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("explicit lower bounds") {
  SUBCASE("SigmaTilde inside r = 3: -|du|^2 >= 1/rho^2") {
    for (double a : {0.0, 0.1, 0.3, 0.5}) {
      CAPTURE(a);
      const Kerr k(1, a);
      const RadialProfiles prof(k);
      const SigmaTilde st{-5, 5};
      const auto kinks = prof.x_tilde_n_kinks(st.n);
      REQUIRE(kinks.size() == 2);
      const int n = 400;
      for (int i = 1; i < n; ++i) {
        const double r = kinks[0] + (3 - kinks[0]) * i / n;
        for (double th : {0.1, 0.7, std::numbers::pi / 2, 2.9}) {
          const double rho2 = r * r + a * a * std::cos(th) * std::cos(th);
          const double nrm = surface_gradient_norm(prof, st, SpacetimePoint(Chart::BL_I, 0, r, th, 0));
          CHECK(-nrm >= 1 / rho2 - 1e-10);
        }
      }
    }
  }
  SUBCASE("bound checks hold on the sampled catalog") {
    for (double a : {0.0, 0.1, 0.3, 0.5}) {
      CAPTURE(a);
      const RadialProfiles prof{Kerr(1, a)};
      for (SurfaceSpec s : {SurfaceSpec{SigmaBar{}}, SurfaceSpec{SigmaTilde{}}, SurfaceSpec{ZT{}}}) {
        const GradientSurvey g = gradient_survey(prof, s, 2000, 5);
        CAPTURE(g.name);
        CHECK(g.bound_samples > 0);
        CHECK(g.bound_violations == 0);
      }
    }
  }
}

TEST_CASE("kinks are refused") {
  const RadialProfiles prof{Kerr(1, 0.3)};
  const SigmaBar sb{-5, 10};
  const auto kinks = prof.x_n_kinks(sb.n);
  REQUIRE(!kinks.empty());
  for (double kr : kinks) {
    CHECK_THROWS_AS(surface_gradient_norm(prof, sb, SpacetimePoint(Chart::BL_I, 0, kr + 1e-10, 1.0, 0)), DomainError);
    CHECK_NOTHROW(surface_gradient_norm(prof, sb, SpacetimePoint(Chart::BL_I, 0, kr + 1e-6, 1.0, 0)));
  }
  CHECK_THROWS_AS(surface_gradient_norm(prof, SigmaTilde{}, SpacetimePoint(Chart::BL_I, 0, 3.0, 1.0, 0)), DomainError);
  CHECK_THROWS_AS(surface_value(prof, SigmaT{}, SpacetimePoint(Chart::BL_II, 0, 1.0, 1.0, 0)), DomainError);
}

TEST_CASE("U - V at the crossing sphere") {
  for (double a : {0.0, 0.1, 0.3, 0.5}) {
    const RadialProfiles prof{Kerr(1, a)};
    for (double th : {0.05, 0.5, 1.2, std::numbers::pi / 2, 2.5, 3.09}) {
      const SpacetimePoint p(Chart::KBL, 0, 0, th, 0.4);
      CHECK(surface_value(prof, SigmaM{}, p) == 0.0);
      CHECK(surface_gradient_norm(prof, SigmaM{}, p) < 0);
    }
  }
}

TEST_CASE("timelike gradients across the catalog") {
  for (double a : {0.0, 0.1, 0.3, 0.5}) {
    const RadialProfiles prof{Kerr(1, a)};
    for (SurfaceSpec s : {SurfaceSpec{SigmaT{}}, SurfaceSpec{SigmaBar{}}, SurfaceSpec{SigmaTilde{}},
                          SurfaceSpec{ZT{}}, SurfaceSpec{SigmaM{}}}) {
      const GradientSurvey g = gradient_survey(prof, s, 10000, 17);
      CAPTURE(a);
      CAPTURE(g.name);
      CHECK(g.samples == 10000);
      CHECK(g.timelike == g.samples);
      CHECK(g.worst_norm < 0);
    }
  }
}

TEST_CASE("crossing examples") {
  SUBCASE("escaping path meets t = T once") {
    for (double a : {0.0, 0.3}) {
      const Kerr k(1, a);
      const RadialProfiles prof(k);
      GeodesicState st;
      st.point = SpacetimePoint(Chart::BL_I, 0, 5, 1.2, 0);
      st.sign_r = 1;
      const FirstIntegrals I{1, 0.5, 2};
      const SurfaceSpec s = SigmaT{3};
      const MaximalPath p = integrate_maximal(k, st, I, crossing_config(s));
      CHECK(p.forward.termination == EventKind::Escape);
      const CrossingReport r = crossing_report(prof, s, p);
      CHECK(r.sign_changes == 1);
      CHECK(r.enters_both);
      CHECK(r.crosses_once());
    }
  }
  SUBCASE("Z(T) grows without bound towards r-") {
    const Kerr k(1, 0.3);
    const RadialProfiles prof(k);
    const Horizons h = horizons(1, 0.3);
    GeodesicState st;
    st.point = SpacetimePoint(Chart::BL_II, 0, 0.5 * (h.rp + h.rm), 1.0, 0);
    st.sign_r = -1;
    const SurfaceSpec s = ZT{12};
    const MaximalPath p = integrate_maximal(k, st, FirstIntegrals{1, 0.2, 1}, crossing_config(s));
    const CrossingReport r = crossing_report(prof, s, p);
    CHECK(r.sup_u > kDivergenceThreshold);
    CHECK(r.sup_diverges);
    CHECK(r.crosses_once());
  }
  SUBCASE("rest photon on the horizon") {
    const double a = 0.3;
    const Kerr k(1, a);
    const RadialProfiles prof(k);
    const auto pts = rest_photon(1.1, 0.2, -2, 2, 41);
    std::vector<double> u;
    for (const auto& p : pts) u.push_back(surface_value(prof, SigmaM{}, p));
    const CrossingReport r = crossing_stats(u, false);
    CHECK(r.sign_changes == 1);
    CHECK(r.enters_both);
    // V(s) = s and U = 0 solve the geodesic equation: Gamma^mu_VV = 0 on U = 0.
    for (double s : {-1.5, -0.2, 0.7}) {
      const double th = 1.1, e = 1e-4;
      auto g = [&](double U, double V, double t) {
        return covariant_metric(k, SpacetimePoint(Chart::KBL, U, V, t, 0.2));
      };
      const Eigen::Matrix4d g0 = g(0, s, th);
      CHECK(std::abs(g0(1, 1)) < 1e-14);
      const Eigen::Matrix4d gi = g0.inverse();
      Eigen::Matrix4d dU = (g(e, s, th) - g(-e, s, th)) / (2 * e);
      Eigen::Matrix4d dV = (g(0, s + e, th) - g(0, s - e, th)) / (2 * e);
      Eigen::Matrix4d dT = (g(0, s, th + e) - g(0, s, th - e)) / (2 * e);
      Eigen::Vector4d lower;
      for (int al = 0; al < 4; ++al) {
        const double dal_gVV = al == 0 ? dU(1, 1) : al == 1 ? dV(1, 1) : al == 2 ? dT(1, 1) : 0.0;
        lower(al) = dV(al, 1) - 0.5 * dal_gVV;
      }
      const Eigen::Vector4d Gamma = gi * lower;
      CHECK(Gamma.cwiseAbs().maxCoeff() < 1e-7);
    }
  }
}

TEST_CASE("t* at the ends of interior paths") {
  const double a = 0.3;
  const Kerr k(1, a);
  const Horizons h = horizons(1, a);
  const IntegrateConfig cfg;
  auto run = [&](const FirstIntegrals& I) {
    GeodesicState st;
    st.point = SpacetimePoint(Chart::BL_II, 0, 0.5 * (h.rp + h.rm), std::numbers::pi / 2, 0);
    st.sign_r = -1;
    return integrate_maximal(k, st, I, cfg);
  };
  auto converged = [](const GeodesicPath& p) {
    const auto& s = p.tail->samples;
    return std::abs(s.back().tstar - s[s.size() / 2].tstar) < 1e-8 * (1 + std::abs(s.back().tstar));
  };

  SUBCASE("entering from M_I and leaving into the III side: finite") {
    const MaximalPath p = run({1, 0, 1});
    REQUIRE(potential_P(k, {1, 0, 1}, h.rp) > 0);
    REQUIRE(potential_P(k, {1, 0, 1}, h.rm) > 0);
    CHECK(converged(p.backward));
    CHECK(converged(p.forward));
    CHECK(std::abs(tail_end(p.backward).tstar) < 10);
    CHECK(std::abs(tail_end(p.forward).tstar) < 10);
  }
  SUBCASE("entering from M_I' and leaving into the III' side: divergent") {
    const MaximalPath p = run({-1, 0, 1});
    CHECK(tail_end(p.backward).tstar < -kDivergenceThreshold);
    CHECK(tail_slope(p.backward) == doctest::Approx(1 / h.kp).epsilon(1e-4));
    CHECK(tail_end(p.forward).tstar > 100);
    CHECK(tail_slope(p.forward) == doctest::Approx(1 / h.km).epsilon(1e-4));
  }
  SUBCASE("through the crossing sphere S(r+)") {
    const FirstIntegrals I{1, (h.rp * h.rp + a * a) / a, 1};
    REQUIRE(std::abs(potential_P(k, I, h.rp)) < 1e-14);
    const MaximalPath p = run(I);
    CHECK(tail_end(p.backward).tstar < -kDivergenceThreshold);
    CHECK(tail_slope(p.backward) == doctest::Approx(1 / (2 * h.kp)).epsilon(1e-4));
  }
  SUBCASE("through the crossing sphere S(r-)") {
    const FirstIntegrals I{1, (h.rm * h.rm + a * a) / a, 1};
    const MaximalPath p = run(I);
    CHECK(converged(p.backward));
    CHECK(tail_end(p.forward).tstar > 30);
    CHECK(tail_slope(p.forward) == doctest::Approx(1 / (2 * h.km)).epsilon(1e-4));
  }
}

TEST_CASE("crossing surveys") {
  for (double a : {0.0, 0.1, 0.3, 0.5}) {
    const RadialProfiles prof{Kerr(1, a)};
    for (SurfaceSpec s : {SurfaceSpec{SigmaT{3}}, SurfaceSpec{SigmaBar{}}, SurfaceSpec{SigmaTilde{}},
                          SurfaceSpec{ZT{}}, SurfaceSpec{SigmaM{}}}) {
      const CrossingSurvey c = crossing_survey(prof, s, 20, 3);
      CAPTURE(a);
      CAPTURE(c.name);
      CHECK(c.paths >= 80);
      CHECK(c.pass_fraction() >= 0.95);
      CHECK(c.failures == 0);
      CHECK(c.crossed_once + c.flagged_incomplete == c.paths);
      for (const auto& [label, n] : c.types) {
        CAPTURE(label);
        CHECK(n >= 20);
      }
    }
  }
}
