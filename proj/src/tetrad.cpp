#include "kerrkit/tetrad.hpp"

#include <cmath>
#include <complex>

#include "kerrkit/errors.hpp"
#include "kerrkit/functions.hpp"
#include "kerrkit/metric.hpp"

namespace kerrkit {

namespace {

using cd = std::complex<double>;
constexpr cd I{0.0, 1.0};

void finish_frame(NullTetrad& t) {
  const double s2 = std::sqrt(2.0);
  t.frame.col(0) = (t.l + t.n) / s2;
  t.frame.col(1) = (t.l - t.n) / s2;
  t.frame.col(2) = s2 * t.m.real();
  t.frame.col(3) = s2 * t.m.imag();
}

void require_off_axis(double theta) {
  if (std::abs(std::sin(theta)) <= kAxisSinTol) throw AxisError("tetrads are singular on the axis");
}

NullTetrad basic(const Kerr& k, double r, double theta) {
  const double a = k.p.a;
  const double D = Delta(k, r);
  if (D <= 0.0) throw HorizonError("basic tetrad needs Delta > 0");
  const double rr = rho2(k, r, theta);
  const double s = std::sin(theta);
  const double f = 1.0 / std::sqrt(2.0 * D * rr);
  NullTetrad t;
  t.l = f * Eigen::Vector4d(r * r + a * a, D, 0.0, a);
  t.n = f * Eigen::Vector4d(r * r + a * a, -D, 0.0, a);
  const cd p(r, a * std::cos(theta));
  const cd c = 1.0 / (std::sqrt(2.0) * p);
  t.m = c * Eigen::Vector4cd(I * a * s, 0.0, 1.0, I / s);
  return t;
}

NullTetrad foliation(const Kerr& k, double r, double theta) {
  const double M = k.p.M, a = k.p.a;
  const double D = Delta(k, r);
  if (D <= 0.0) throw HorizonError("foliation-adapted tetrad needs Delta > 0");
  const double rr = rho2(k, r, theta);
  const double sg2 = sigma2(k, r, theta), sg = std::sqrt(sg2);
  const double s = std::sin(theta);
  const double ft = sg / std::sqrt(2.0 * D * rr);
  const double fr = std::sqrt(D / (2.0 * rr));
  const Eigen::Vector4d time = ft * Eigen::Vector4d(1.0, 0.0, 0.0, 2.0 * a * M * r / sg2);
  const Eigen::Vector4d rad(0.0, fr, 0.0, 0.0);
  NullTetrad t;
  t.l = time + rad;
  t.n = time - rad;
  t.m = (1.0 / std::sqrt(2.0 * rr)) * Eigen::Vector4cd(0.0, 0.0, 1.0, I * rr / (sg * s));
  return t;
}

NullTetrad kruskal(const Kerr& k, double U, double V, double theta) {
  const double a = k.p.a, rp = k.h.r_plus, rm = k.h.r_minus;
  const double kap = k.h.kappa_plus, Om = k.h.Omega_H;
  const double r = kruskal_radius(k, U * V);
  const double rr = rho2(k, r, theta);
  const double q = r * r + a * a, qp = rp * rp + a * a;
  const double G = kruskal_G(k, r);
  const double pref = kruskal_E(k, r) / ((r - rm) * std::sqrt(2.0 * rr));
  NullTetrad t;
  // (U, V, theta, phi#)
  t.l = pref * Eigen::Vector4d(0.0, 2.0 * kap * q / G, 0.0, -a * (r + rp) * U / qp);
  t.n = pref * Eigen::Vector4d(-2.0 * kap * q / G, 0.0, 0.0, -a * (r + rp) * V / qp);
  // d_t = kappa(-U d_U + V d_V) - Omega_H d_phi#, d_phi = d_phi#.
  const double s = std::sin(theta);
  const cd p(r, a * std::cos(theta));
  const cd c = 1.0 / (std::sqrt(2.0) * p);
  const cd ias = I * a * s;
  t.m = c * Eigen::Vector4cd(-ias * kap * U, ias * kap * V, 1.0, -ias * Om + I / s);
  return t;
}

NullTetrad conformal(const Kerr& k, double w, double theta) {
  const double M = k.p.M, a = k.p.a;
  const double Dh = 1.0 - 2.0 * M * w + a * a * w * w;
  if (Dh <= 0.0) throw HorizonError("conformal tetrad needs r > r+");
  const double c = std::cos(theta), s = std::sin(theta);
  const double rh = 1.0 + a * a * w * w * c * c;
  NullTetrad t;
  // (t*, w, theta, phi*)
  t.l = (1.0 / std::sqrt(2.0 * Dh * rh)) *
        Eigen::Vector4d(2.0 * (1.0 + a * a * w * w), -w * w * Dh, 0.0, 2.0 * a * w * w);
  t.n = Eigen::Vector4d(0.0, std::sqrt(Dh / (2.0 * rh)), 0.0, 0.0);
  const cd den = std::sqrt(2.0) * cd(1.0, a * w * c);
  t.m = (1.0 / den) * Eigen::Vector4cd(I * a * s, 0.0, 1.0, I / s);
  return t;
}

}  // namespace

const char* tetrad_name(TetradKind kind) {
  switch (kind) {
    case TetradKind::Basic: return "Basic";
    case TetradKind::FoliationAdapted: return "FoliationAdapted";
    case TetradKind::KBL: return "KBL";
    case TetradKind::Conformal: return "Conformal";
  }
  return "?";
}

NullTetrad null_tetrad(const Kerr& k, const SpacetimePoint& p, TetradKind kind) {
  require_domain(k, p);
  require_off_axis(p.x[2]);
  const Chart natural = kind == TetradKind::KBL         ? Chart::KBL
                        : kind == TetradKind::Conformal ? Chart::ConformalKerrStar
                                                        : Chart::BL_I;
  if (p.chart != natural) {
    throw DomainError(std::string(tetrad_name(kind)) + " tetrad is defined on " +
                      chart_name(natural) + ", got a " + chart_name(p.chart) + " point");
  }
  NullTetrad t;
  switch (kind) {
    case TetradKind::Basic: t = basic(k, p.x[1], p.x[2]); break;
    case TetradKind::FoliationAdapted: t = foliation(k, p.x[1], p.x[2]); break;
    case TetradKind::KBL: t = kruskal(k, p.x[0], p.x[1], p.x[2]); break;
    case TetradKind::Conformal:
      if (p.x[1] < 0.0) throw DomainError("conformal tetrad is built on w >= 0");
      t = conformal(k, p.x[1], p.x[2]);
      break;
  }
  t.kind = kind;
  t.chart = natural;
  finish_frame(t);
  return t;
}

double tetrad_defect(const Eigen::Matrix4d& g, const NullTetrad& t) {
  const Eigen::Matrix4cd gc = g.cast<cd>();
  const Eigen::Vector4cd l = t.l.cast<cd>(), n = t.n.cast<cd>();
  auto dot = [&](const Eigen::Vector4cd& u, const Eigen::Vector4cd& v) {
    return (u.transpose() * gc * v)(0, 0);
  };
  double d = 0;
  d = std::max(d, std::abs(dot(l, l)));
  d = std::max(d, std::abs(dot(n, n)));
  d = std::max(d, std::abs(dot(l, n) + 1.0));
  d = std::max(d, std::abs(dot(t.m, t.m)));
  d = std::max(d, std::abs(dot(t.m, t.m.conjugate()) - 1.0));
  d = std::max(d, std::abs(dot(l, t.m)));
  d = std::max(d, std::abs(dot(n, t.m)));
  return d;
}

double frame_defect(const Eigen::Matrix4d& g, const NullTetrad& t) {
  const Eigen::Matrix4d eta = Eigen::Vector4d(-1, 1, 1, 1).asDiagonal();
  return (t.frame.transpose() * g * t.frame - eta).cwiseAbs().maxCoeff();
}

}  // namespace kerrkit
