#pragma once

#include <cmath>
#include <complex>

namespace kerrkit {

struct KerrParams {
  double M = 1.0;
  double a = 0.0;
};

// Throws InvalidParams unless M > 0 and |a| < M.
void validate(const KerrParams& p);

struct HorizonConstants {
  double r_minus = 0;
  double r_plus = 0;
  double kappa_minus = 0;  // -infinity when a = 0
  double kappa_plus = 0;
  double Omega_H = 0;
  double T_H = 0;
  double C1 = 0;
  double C = 0;
  // 1/(2 kappa_-), which stays finite (zero) in the Schwarzschild limit.
  double half_inv_kappa_minus = 0;
};

HorizonConstants horizon_quantities(const KerrParams& p);

// Parameters together with their derived constants; most of the library takes this.
struct Kerr {
  KerrParams p;
  HorizonConstants h;

  Kerr() : Kerr(KerrParams{}) {}
  explicit Kerr(const KerrParams& params);
  Kerr(double M, double a) : Kerr(KerrParams{M, a}) {}

  double M() const { return p.M; }
  double a() const { return p.a; }
  double r_plus() const { return h.r_plus; }
  double r_minus() const { return h.r_minus; }
  double kappa() const { return h.kappa_plus; }

  // r_+ + i a cos(theta)
  std::complex<double> p_plus(double theta) const {
    return {h.r_plus, p.a * std::cos(theta)};
  }
};

}  // namespace kerrkit
