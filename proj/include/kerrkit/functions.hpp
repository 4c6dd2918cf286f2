#pragma once

// Scalar building blocks of the Kerr geometry. Templated on the scalar type so
// they compose with Eigen's AutoDiffScalar as well as plain double.

#include <cmath>

#include <Eigen/Core>

#include "kerrkit/params.hpp"

namespace kerrkit {

template <typename Scalar>
Scalar Delta(const Kerr& k, const Scalar& r) {
  return r * r - 2.0 * k.p.M * r + k.p.a * k.p.a;
}

template <typename Scalar>
Scalar rho2(const Kerr& k, const Scalar& r, const Scalar& theta) {
  using std::cos;
  const Scalar c = cos(theta);
  return r * r + k.p.a * k.p.a * c * c;
}

template <typename Scalar>
Scalar sigma2(const Kerr& k, const Scalar& r, const Scalar& theta) {
  using std::sin;
  const Scalar s = sin(theta);
  const Scalar q = r * r + k.p.a * k.p.a;
  return q * q - k.p.a * k.p.a * Delta(k, r) * s * s;
}

// Tortoise-type profile with dx/dr = (r^2+a^2)/Delta.
template <typename Scalar>
Scalar tortoise_x(const Kerr& k, const Scalar& r) {
  using std::abs;
  using std::log;
  Scalar x = r + log(abs(r - k.h.r_plus)) / (2.0 * k.h.kappa_plus);
  if (k.p.a != 0.0) x += k.h.half_inv_kappa_minus * log(abs(r - k.h.r_minus));
  return x;
}

// dLambda/dr = a/Delta
template <typename Scalar>
Scalar tortoise_lambda(const Kerr& k, const Scalar& r) {
  using std::abs;
  using std::log;
  if (k.p.a == 0.0) return Scalar(0.0) * r;
  return k.p.a / (k.h.r_plus - k.h.r_minus) *
         log(abs(r - k.h.r_plus) / abs(r - k.h.r_minus));
}

// (r - r+)/(U V) = G(r) on the Kruskal chart.
template <typename Scalar>
Scalar kruskal_G(const Kerr& k, const Scalar& r) {
  using std::exp;
  using std::pow;
  Scalar g = exp(-2.0 * k.h.kappa_plus * r);
  if (k.p.a != 0.0) g *= pow(r - k.h.r_minus, k.h.r_minus / k.h.r_plus);
  return g;
}

// Omega_H x(r) - Lambda(r), which is smooth across r+.
template <typename Scalar>
Scalar azimuth_shift_h(const Kerr& k, const Scalar& r) {
  using std::log;
  if (k.p.a == 0.0) return Scalar(0.0) * r;
  const double c = k.h.Omega_H * k.h.half_inv_kappa_minus +
                   k.p.a / (k.h.r_plus - k.h.r_minus);
  return k.h.Omega_H * r + c * log(r - k.h.r_minus);
}

// e^{-kappa r} (r - r-)^{M/r+}, the scale factor of the Kruskal tetrad.
template <typename Scalar>
Scalar kruskal_E(const Kerr& k, const Scalar& r) {
  using std::exp;
  using std::pow;
  return exp(-k.h.kappa_plus * r) * pow(r - k.h.r_minus, k.p.M / k.h.r_plus);
}

// Boyer-Lindquist covariant metric in (t, r, theta, phi).
template <typename Scalar>
Eigen::Matrix<Scalar, 4, 4> bl_metric_cov(const Kerr& k, const Scalar& r,
                                          const Scalar& theta) {
  using std::sin;
  const double M = k.p.M, a = k.p.a;
  const Scalar s = sin(theta);
  const Scalar s2 = s * s;
  const Scalar rr = rho2(k, r, theta);
  Eigen::Matrix<Scalar, 4, 4> g = Eigen::Matrix<Scalar, 4, 4>::Zero();
  g(0, 0) = -(1.0 - 2.0 * M * r / rr);
  g(0, 3) = g(3, 0) = -2.0 * a * M * r * s2 / rr;
  g(1, 1) = rr / Delta(k, r);
  g(2, 2) = rr;
  g(3, 3) = sigma2(k, r, theta) * s2 / rr;
  return g;
}

// Kerr-star (t*, r, theta, phi*) covariant metric. orientation = +1 gives the
// Kerr-star chart, -1 the star-Kerr chart (*t, r, theta, *phi).
template <typename Scalar>
Eigen::Matrix<Scalar, 4, 4> kerr_star_metric_cov(const Kerr& k, const Scalar& r,
                                                 const Scalar& theta,
                                                 int orientation = 1) {
  using std::sin;
  const double M = k.p.M, a = k.p.a;
  const Scalar s = sin(theta);
  const Scalar s2 = s * s;
  const Scalar rr = rho2(k, r, theta);
  Eigen::Matrix<Scalar, 4, 4> g = Eigen::Matrix<Scalar, 4, 4>::Zero();
  g(0, 0) = -(1.0 - 2.0 * M * r / rr);
  g(0, 1) = g(1, 0) = Scalar(double(orientation));
  g(0, 3) = g(3, 0) = -2.0 * a * M * r * s2 / rr;
  g(1, 3) = g(3, 1) = -double(orientation) * a * s2;
  g(2, 2) = rr;
  g(3, 3) = (r * r + a * a + 2.0 * M * r * a * a * s2 / rr) * s2;
  return g;
}

// Conformally rescaled metric w^2 g in (t*, w, theta, phi*) with w = 1/r.
template <typename Scalar>
Eigen::Matrix<Scalar, 4, 4> conformal_metric_cov(const Kerr& k, const Scalar& w,
                                                 const Scalar& theta,
                                                 int orientation = 1) {
  using std::cos;
  using std::sin;
  const double M = k.p.M, a = k.p.a;
  const Scalar s = sin(theta);
  const Scalar c = cos(theta);
  const Scalar s2 = s * s;
  const Scalar rh = 1.0 + a * a * w * w * c * c;
  const Scalar w3 = w * w * w;
  Eigen::Matrix<Scalar, 4, 4> g = Eigen::Matrix<Scalar, 4, 4>::Zero();
  g(0, 0) = -(w * w - 2.0 * M * w3 / rh);
  g(0, 1) = g(1, 0) = Scalar(-double(orientation));
  g(0, 3) = g(3, 0) = -2.0 * M * a * w3 * s2 / rh;
  g(1, 3) = g(3, 1) = double(orientation) * a * s2;
  g(2, 2) = rh;
  g(3, 3) = (1.0 + a * a * w * w + 2.0 * M * a * a * w3 * s2 / rh) * s2;
  return g;
}

}  // namespace kerrkit
