#pragma once

#include <complex>
#include <functional>
#include <string>
#include <variant>

#include <Eigen/Core>

#include "kerrkit/params.hpp"

namespace kerrkit {

// Periodic uniform grid x_j = -X + j h, h = 2X/N.
struct LineGrid {
  double X = 40;
  int N = 1 << 14;
  double spacing() const { return 2 * X / N; }
  double point(int j) const { return -X + spacing() * j; }
};

// Log-uniform grid x_j = x_min e^{j du}, du = ln(x_max/x_min)/N (x_max excluded).
struct HalfLineGrid {
  double x_min = 0, x_max = 0;
  int N = 1 << 14;
  static HalfLineGrid symmetric(double L, int N) { return {std::exp(-L), std::exp(L), N}; }
  double log_min() const { return std::log(x_min); }
  double log_spacing() const { return std::log(x_max / x_min) / N; }
  double point(int j) const { return std::exp(log_min() + log_spacing() * j); }
};

using Grid1D = std::variant<LineGrid, HalfLineGrid>;

struct SampledFunction {
  Grid1D grid;
  Eigen::VectorXcd values;

  bool on_line() const { return std::holds_alternative<LineGrid>(grid); }
  int size() const { return int(values.size()); }
  Eigen::VectorXd points() const;
  // Discrete L^2(dx) norm: weights h on a line, x_j du on a half-line.
  double norm() const;
};

// N must be a power of two; grids must be increasing.
void validate(const Grid1D& g);

SampledFunction sample(const Grid1D& g, const std::function<std::complex<double>(double)>& f);

// Named real test functions for the projector and Unruh checks.
struct TestFunction {
  std::string name;
  std::function<double(double)> f;
  double operator()(double x) const { return f(x); }
};

TestFunction log_gaussian(double center = 0, double width = 1);  // e^{-((ln x - c)/w)^2}
TestFunction gaussian(double center, double width);              // e^{-((x - c)/w)^2}
TestFunction bump(double center, double half_width);             // e^{-1/(1-s^2)}, |s| < 1
// By name ("log-gaussian", "gaussian", "bump"); SchemaError otherwise.
TestFunction make_test_function(const std::string& name, double p1, double p2);

struct ThermalParams {
  double kappa = 1;
  double beta = 2 * 3.14159265358979323846;

  static ThermalParams from_kappa(double kappa);
  // kappa_+ of the black hole and beta = 1/T_H.
  static ThermalParams from_horizon(const HorizonConstants& h);
};

// (1 + e^{-+ beta lambda})^-1 for sign = +-1.
double fermi_factor(double beta, int sign, double lambda);

// (Mf)(sigma) = (2 pi)^-1/2 int x^{-1/2 - i sigma} f(x) dx, by FFT in u = ln x.
// The result lives on the dual line grid, |sigma| < pi/du. DecayError when
// e^{u/2} f(e^u) is above 1e-8 of its maximum at the grid ends,
// ResolutionError when the spectrum over the top eighth of the band exceeds
// resolution_tol of its maximum (pass infinity to skip the check).
SampledFunction mellin(const SampledFunction& f, double resolution_tol = 1e-4);
// Inverse onto the half-line grid g was computed from.
SampledFunction inverse_mellin(const SampledFunction& g, const HalfLineGrid& target);

// chi^+-_{2 pi}(A) on a half-line sample: multiplier on the Mellin side.
SampledFunction projector_mellin(const SampledFunction& f, int sign, double resolution_tol = 1e-4);

// 1_{R+-}(D_x) restricted to the half-line: f on a LineGrid, values at x <= 0
// ignored (zero extension). The FFT runs on a buffer padded `pad` times, and
// the periodic images of the 1/x tail are removed in closed form. The result
// is zero for x <= 0.
SampledFunction projector_fourier(const SampledFunction& f, int sign, int pad = 4);

// The default projector on the half-line (Mellin route).
SampledFunction halfline_projector(const SampledFunction& f, int sign);

// 1_{[0,inf)}(D_x) (sign +1) or 1_{(-inf,0)}(D_x) (sign -1) on the periodic
// line grid itself, without restriction. The two add up to the identity and
// each is idempotent.
SampledFunction line_projector(const SampledFunction& f, int sign);

// The Fourier-route kernel K(x, x_j) at all grid points x: the operator
// applied to the Poisson kernel of width delta centred on x_j, which
// regularises (x - y +- i0)^-1 to (x - y +- i delta)^-1. It depends on x - x_j
// only, so it is also row j of the kernel read backwards.
Eigen::VectorXcd fourier_kernel(const LineGrid& g, int j, double delta, int sign, int pad = 4);
// i sign/(2 pi) (x - y + i sign delta)^-1
std::complex<double> analytic_kernel(double x, double y, double delta, int sign);

struct ProjectorGrids {
  int N = 1 << 14;
  double X = 80;  // line window (0, X]
  double L = 60;  // half-line grid over [e^-L, e^L]
  int pad = 4;
  double resolution_tol = 1e-4;  // passed to the Mellin route
};

struct ProjectorComparison {
  std::string function;
  int N = 0;
  int sign = 1;
  double residual = 0;  // ||P_Fourier f - P_Mellin f|| / ||f|| on (0, X]
  double aliasing = 0;  // Fourier route, pad vs 2 pad, relative to ||f||
  Eigen::VectorXd x;    // window points
  Eigen::VectorXcd fourier, mellin;
};

// Both routes on the same function, compared on the line window. The Mellin
// output is evaluated off its grid by trigonometric interpolation in ln x.
// ResolutionError when the aliasing guard exceeds 1e-6.
ProjectorComparison compare_projectors(const TestFunction& f, const ProjectorGrids& g, int sign = 1);

struct UnruhOptions {
  int sign = 1;          // projector sign in U
  int fermi_sign = -1;   // sign of chi_beta(D_u) it is compared with
  double beta = 0;       // 0: 2 pi/kappa
  LineGrid U{40, 1 << 14};
  int pad = 4;
};

// With U = e^{-kappa u} and (Phi F)(u) = (kappa U)^{1/2} F(U): maps f (sampled
// on a line in u) to the half-line, applies the Fourier-route projector in U,
// and compares with chi_beta(D_u) f applied by FFT multiplier, pulled back to
// U. Returns the discrepancy in L^2(dU) on the U window relative to ||f||.
double unruh_identity_residual(double kappa, const SampledFunction& f, const UnruhOptions& o = {});

}  // namespace kerrkit
