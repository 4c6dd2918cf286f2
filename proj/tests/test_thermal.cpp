#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>

#include "doctest.h"
#include "kerrkit/errors.hpp"
#include "kerrkit/params.hpp"
#include "kerrkit/thermal.hpp"

using namespace kerrkit;
using cd = std::complex<double>;
constexpr double pi = std::numbers::pi;

namespace {

cd simpson_step(const std::function<cd(double)>& f, double a, double b, cd fa, cd fm, cd fb, cd whole,
                double tol, int depth) {
  const double m = 0.5 * (a + b);
  const cd flm = f(0.5 * (a + m)), frm = f(0.5 * (m + b));
  const cd left = (m - a) / 6 * (fa + 4.0 * flm + fm);
  const cd right = (b - m) / 6 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

cd adaptive_simpson(const std::function<cd(double)>& f, double a, double b, double tol) {
  // split first so that narrow features are not stepped over
  cd s = 0;
  const int pieces = 64;
  for (int i = 0; i < pieces; ++i) {
    const double lo = a + (b - a) * i / pieces, hi = a + (b - a) * (i + 1) / pieces;
    const cd fa = f(lo), fb = f(hi), fm = f(0.5 * (lo + hi));
    s += simpson_step(f, lo, hi, fa, fm, fb, (hi - lo) / 6 * (fa + 4.0 * fm + fb), tol / pieces, 40);
  }
  return s;
}

// Dawson's integral e^{-z^2} int_0^z e^{t^2} dt, written so the integrand stays below 1.
double dawson(double z) {
  const auto g = [z](double t) { return cd(std::exp(-(z - t) * (z + t))); };
  return adaptive_simpson(g, 0, z, 1e-15).real();
}

double fermi_oracle(double beta, int sign, double lambda) {
  return double(1.0L / (1.0L + std::exp(-(long double)sign * beta * lambda)));
}

double window_rel(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b, double h, double norm) {
  return std::sqrt((a - b).squaredNorm() * h) / norm;
}

}  // namespace

TEST_CASE("Fermi factors") {
  for (double beta : {2 * pi, 8 * pi, pi}) {
    CHECK(fermi_factor(beta, 1, 0.0) == 0.5);
    CHECK(fermi_factor(beta, -1, 0.0) == 0.5);
    for (int i = 0; i <= 2000; ++i) {
      const double lambda = -100 + 0.1 * i;
      const double p = fermi_factor(beta, 1, lambda), m = fermi_factor(beta, -1, lambda);
      CHECK(std::abs(p + m - 1) <= 1e-15);
      CHECK(p == doctest::Approx(fermi_oracle(beta, 1, lambda)).epsilon(1e-14));
      CHECK(std::isfinite(p));
    }
  }
  CHECK(fermi_factor(1.0, -1, 30.0) < 1e-13);
  CHECK(fermi_factor(1.0, 1, 1e6) == 1.0);
  CHECK(fermi_factor(1.0, 1, -1e6) == 0.0);
  CHECK_THROWS_AS(fermi_factor(0.0, 1, 1.0), InvalidParams);
  CHECK_THROWS_AS(fermi_factor(1.0, 2, 1.0), InvalidParams);
}

TEST_CASE("inverse temperature from the horizon") {
  for (double a : {0.0, 0.3, 0.7, 0.95}) {
    const HorizonConstants h = horizon_quantities({1, a});
    const ThermalParams t = ThermalParams::from_horizon(h);
    CHECK(t.beta == doctest::Approx(1 / h.T_H).epsilon(1e-14));
    CHECK(t.beta == doctest::Approx(2 * pi / h.kappa_plus).epsilon(1e-14));
  }
  for (double k : {0.25, 1.0, 2.0, 3.7}) CHECK(ThermalParams::from_kappa(k).beta * k == doctest::Approx(2 * pi).epsilon(1e-15));
  CHECK(ThermalParams::from_horizon(horizon_quantities({1, 0})).kappa == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("Mellin transform") {
  // du = 32 pi/N puts sigma on multiples of 1/16
  const int n = 1 << 14;
  const HalfLineGrid grid = HalfLineGrid::symmetric(16 * pi, n);
  const SampledFunction f = sample(grid, [](double x) { return cd(std::sqrt(x) * std::exp(-x)); });
  const SampledFunction m = mellin(f);
  const auto& line = std::get<LineGrid>(m.grid);

  SUBCASE("against the defining integral") {
    for (int s : {0, 1, 2}) {
      const int idx = n / 2 + 16 * s;
      REQUIRE(line.point(idx) == doctest::Approx(s).epsilon(1e-14));
      // x^{-1/2 - i s} f(x) dx with x = e^u
      const auto integrand = [s](double u) {
        const double x = std::exp(u);
        return std::exp(u - x) * std::polar(1.0, -s * u);
      };
      const cd direct = adaptive_simpson(integrand, -50, 5, 1e-14) / std::sqrt(2 * pi);
      CAPTURE(s);
      CHECK(std::abs(m.values[idx] - direct) < 1e-10 * std::abs(direct));
      // |Gamma(1 + i s)|^2 = pi s/sinh(pi s)
      const double gamma_abs = s == 0 ? 1.0 : std::sqrt(pi * s / std::sinh(pi * s));
      CHECK(std::abs(m.values[idx]) * std::sqrt(2 * pi) == doctest::Approx(gamma_abs).epsilon(1e-10));
    }
  }
  SUBCASE("unitary with its inverse") {
    for (const TestFunction& t : {log_gaussian(0, 1), log_gaussian(1, 0.3), bump(2, 1)}) {
      const SampledFunction g = sample(HalfLineGrid::symmetric(60, n), [&](double x) { return cd(t(x)); });
      const SampledFunction mg = mellin(g);
      CAPTURE(t.name);
      CHECK(mg.norm() == doctest::Approx(g.norm()).epsilon(1e-12));
      const SampledFunction back = inverse_mellin(mg, std::get<HalfLineGrid>(g.grid));
      CHECK(SampledFunction{g.grid, back.values - g.values}.norm() <= 1e-8 * g.norm());
    }
    CHECK(m.norm() == doctest::Approx(f.norm()).epsilon(1e-12));
  }
  SUBCASE("refuses functions it cannot represent") {
    const SampledFunction slow = sample(HalfLineGrid::symmetric(10, 1024), [](double x) { return cd(1 / (1 + x)); });
    CHECK_THROWS_AS(mellin(slow), DecayError);
    const SampledFunction sharp = sample(HalfLineGrid::symmetric(60, 1024), [](double x) { return cd(gaussian(4, 0.01)(x)); });
    CHECK_THROWS_AS(mellin(sharp), ResolutionError);
    CHECK_THROWS_AS(sample(LineGrid{1, 1000}, [](double) { return cd(0); }), InvalidParams);
    CHECK_THROWS_AS(inverse_mellin(m, HalfLineGrid::symmetric(60, n)), InvalidParams);
  }
}

TEST_CASE("both projector routes against the Hilbert transform of a Gaussian") {
  // On the line 1_{R+}(D) f = f/2 + (i/2) H f, and H of e^{-(x-c)^2} is
  // (2/sqrt(pi)) D(x - c). With c = 8 the zero extension costs e^{-64}.
  const double c = 8;
  const auto f = [c](double x) { return cd(x > 0 ? std::exp(-(x - c) * (x - c)) : 0.0); };
  const auto exact = [c](double x, int sign) {
    return 0.5 * std::exp(-(x - c) * (x - c)) + cd(0, sign / std::sqrt(pi)) * dawson(x - c);
  };
  const LineGrid line{40, 1 << 12};
  for (int sign : {1, -1}) {
    for (int pad : {2, 4}) {
      const SampledFunction p = projector_fourier(sample(line, f), sign, pad);
      double worst = 0;
      for (int j = line.N / 2 + 1; j < line.N; j += 7) worst = std::max(worst, std::abs(p.values[j] - exact(line.point(j), sign)));
      CAPTURE(sign);
      CAPTURE(pad);
      CHECK(worst < 1e-11);
    }
    const HalfLineGrid half = HalfLineGrid::symmetric(60, 1 << 13);
    const SampledFunction q = projector_mellin(sample(half, f), sign);
    double worst = 0;
    for (int j = 0; j < half.N; j += 5) {
      const double x = half.point(j);
      if (x > 0.5 && x < 40) worst = std::max(worst, std::abs(q.values[j] - exact(x, sign)));
    }
    CHECK(worst < 1e-11);
  }
}

TEST_CASE("half-line projectors: identity, positivity, kernel") {
  const LineGrid line{40, 1 << 12};
  const HalfLineGrid half = HalfLineGrid::symmetric(60, 1 << 13);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0, 1);

  SUBCASE("P+ + P- = 1 by either route") {
    for (const TestFunction& t : {log_gaussian(0, 1), gaussian(4, 0.5), bump(2, 1)}) {
      const SampledFunction fl = sample(line, [&](double x) { return cd(x > 0 ? t(x) : 0.0); });
      const SampledFunction fh = sample(half, [&](double x) { return cd(t(x)); });
      const Eigen::VectorXcd sf = projector_fourier(fl, 1).values + projector_fourier(fl, -1).values;
      const Eigen::VectorXcd sm = projector_mellin(fh, 1).values + projector_mellin(fh, -1).values;
      CAPTURE(t.name);
      CHECK((sf - fl.values).norm() <= 1e-10 * fl.values.norm());
      CHECK(SampledFunction{half, sm - fh.values}.norm() <= 1e-10 * fh.norm());
    }
  }
  SUBCASE("<f, P+ f> is nonnegative for complex f") {
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<std::tuple<double, double, cd>> terms;
      for (int k = 0; k < 3; ++k)
        terms.emplace_back(0.5 + 6 * U(rng), 0.2 + U(rng), std::polar(1.0, 2 * pi * U(rng)));
      const auto f = [&](double x) {
        cd s = 0;
        if (x <= 0) return s;
        for (const auto& [c, w, z] : terms) s += z * std::exp(-(x - c) * (x - c) / (w * w));
        return s;
      };
      const SampledFunction fl = sample(line, f), fh = sample(half, f);
      const cd qf = fl.values.dot(projector_fourier(fl, 1).values) * line.spacing();
      Eigen::VectorXcd w = projector_mellin(fh, 1).values;
      const Eigen::VectorXd x = fh.points();
      for (int j = 0; j < half.N; ++j) w[j] *= x[j];
      const cd qm = fh.values.dot(w) * half.log_spacing();
      CHECK(qf.real() >= -1e-8 * fl.norm() * fl.norm());
      CHECK(qm.real() >= -1e-8 * fh.norm() * fh.norm());
      // the compression is not a projector: <f, (P+ - P+^2) f> = ||chi+ chi-|^{1/2} M f||^2 > 0
      const SampledFunction p = projector_mellin(fh, 1);
      Eigen::VectorXcd d = p.values - projector_mellin(p, 1, 1e300).values;
      for (int j = 0; j < half.N; ++j) d[j] *= x[j];
      CHECK(fh.values.dot(d).real() * half.log_spacing() > 1e-3 * fh.norm() * fh.norm());
    }
  }
  SUBCASE("line projectors are idempotent and complementary") {
    const SampledFunction f = sample(line, [](double x) { return cd(std::exp(-x * x), std::sin(x) * std::exp(-0.5 * x * x)); });
    for (int sign : {1, -1}) {
      const SampledFunction p = line_projector(f, sign);
      CHECK((line_projector(p, sign).values - p.values).norm() <= 1e-6 * f.values.norm());
      CHECK(line_projector(p, -sign).values.norm() <= 1e-12 * f.values.norm());
    }
    CHECK((line_projector(f, 1).values + line_projector(f, -1).values - f.values).norm() <= 1e-12 * f.values.norm());
  }
  SUBCASE("kernel against the regularised boundary value") {
    const int j = line.N / 2 + line.N / 4;  // x_j = X/2
    const double h = line.spacing(), delta = 2 * h;
    for (int sign : {1, -1}) {
      const Eigen::VectorXcd K = fourier_kernel(line, j, delta, sign);
      int checked = 0;
      double worst = 0;
      for (int i = line.N / 2 + 1; i < line.N; ++i) {
        if (std::abs(i - j) < 4 || std::abs(i - j) * h > 10) continue;
        const cd ref = analytic_kernel(line.point(i), line.point(j), delta, sign);
        worst = std::max(worst, std::abs(K[i] - ref) / std::abs(ref));
        ++checked;
      }
      CAPTURE(sign);
      CHECK(checked > 500);
      CHECK(worst < 0.05);
    }
  }
  SUBCASE("aliasing guard") {
    const SampledFunction fl = sample(line, [](double x) { return cd(x > 0 ? log_gaussian(0, 1)(x) : 0.0); });
    const Eigen::VectorXcd p4 = projector_fourier(fl, 1, 4).values, p8 = projector_fourier(fl, 1, 8).values;
    CHECK(window_rel(p4, p8, line.spacing(), fl.norm()) < 1e-6);
    CHECK_THROWS_AS(projector_fourier(fl, 1, 1), InvalidParams);
  }
}

TEST_CASE("the two routes agree on the half-line and converge") {
  for (const TestFunction& t : {log_gaussian(0, 1), gaussian(4, 0.15), bump(2, 1)}) {
    double prev = 1e300;
    for (int n : {1 << 11, 1 << 12, 1 << 13, 1 << 14}) {
      ProjectorGrids g;
      g.N = n;
      // the coarse grids are meant to under-resolve f
      g.resolution_tol = std::numeric_limits<double>::infinity();
      const ProjectorComparison c = compare_projectors(t, g, 1);
      CAPTURE(t.name);
      CAPTURE(n);
      CHECK(c.residual < prev);
      CHECK(c.aliasing < 1e-6);
      prev = c.residual;
    }
    CHECK(prev < 1e-4);
    CHECK(compare_projectors(t, {}, -1).residual < 1e-4);
  }
}

TEST_CASE("exponential coordinates: chi_infinity(D_U) = chi_beta(D_u) with beta = 2 pi/kappa") {
  for (double kappa : {1.0, 0.25, 2.0}) {
    const LineGrid ug{60 / kappa, 1 << 13};
    const SampledFunction f = sample(ug, [](double u) { return cd(std::exp(-u * u / 0.16)); });
    UnruhOptions o;
    o.U = LineGrid{40, 1 << 13};
    CAPTURE(kappa);
    CHECK(unruh_identity_residual(kappa, f, o) < 1e-4);
    UnruhOptions minus = o;
    minus.sign = -1;
    minus.fermi_sign = 1;
    CHECK(unruh_identity_residual(kappa, f, minus) < 1e-4);
    // the sign flip is essential, and so is the temperature
    UnruhOptions same = o;
    same.fermi_sign = 1;
    CHECK(unruh_identity_residual(kappa, f, same) > 0.5);
    if (kappa != 1.0) {
      UnruhOptions hot = o;
      hot.beta = 2 * pi;
      CHECK(unruh_identity_residual(kappa, f, hot) > 1e-2);
    }
  }
}

TEST_CASE("the change of variables U = e^{-kappa u} is unitary with the (kappa U)^{-1/2} factor") {
  for (double kappa : {0.25, 1.0, 2.0}) {
    const double L = 30;
    const LineGrid ug{L, 1 << 12};
    const auto f = [](double u) { return cd(std::exp(-u * u), 0.3 * u * std::exp(-u * u / 2)); };
    const SampledFunction fu = sample(ug, f);
    // the log grid in U matching the u grid point for point (reversed)
    const HalfLineGrid hg{std::exp(-kappa * L), std::exp(kappa * L), ug.N};
    const SampledFunction FU = sample(hg, [&](double U) { return f(-std::log(U) / kappa) / std::sqrt(kappa * U); });
    CAPTURE(kappa);
    CHECK(FU.norm() == doctest::Approx(fu.norm()).epsilon(1e-10));
  }
}
