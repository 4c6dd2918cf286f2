#include "kerrkit/metric.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "kerrkit/errors.hpp"
#include "kerrkit/functions.hpp"

namespace kerrkit {

namespace {

void check_axis(double theta) {
  if (std::abs(std::sin(theta)) <= kAxisSinTol) {
    std::ostringstream os;
    os << "axis singularity at theta = " << theta;
    throw AxisError(os.str());
  }
}

void check_horizon(const Kerr& k, double r) {
  const double d = Delta(k, r);
  if (std::abs(d) <= 1e-14 * k.p.M * k.p.M) {
    std::ostringstream os;
    os.precision(17);
    os << "Boyer-Lindquist coordinates are singular at r = " << r << " (Delta = " << d
       << ")";
    throw HorizonError(os.str());
  }
}

Eigen::Matrix4d bl_contra(const Kerr& k, double r, double theta) {
  const double M = k.p.M, a = k.p.a;
  const double D = Delta(k, r), rr = rho2(k, r, theta);
  const double s = std::sin(theta), s2 = s * s;
  Eigen::Matrix4d gi = Eigen::Matrix4d::Zero();
  gi(0, 0) = -sigma2(k, r, theta) / (D * rr);
  gi(0, 3) = gi(3, 0) = -2.0 * a * M * r / (D * rr);
  gi(1, 1) = D / rr;
  gi(2, 2) = 1.0 / rr;
  gi(3, 3) = (D - a * a * s2) / (D * rr * s2);
  return gi;
}

Eigen::Matrix4d kerr_star_contra(const Kerr& k, double r, double theta, int orient) {
  const double a = k.p.a;
  const double D = Delta(k, r), rr = rho2(k, r, theta);
  const double s = std::sin(theta), s2 = s * s;
  Eigen::Matrix4d gi = Eigen::Matrix4d::Zero();
  gi(0, 0) = a * a * s2 / rr;
  gi(0, 1) = gi(1, 0) = orient * (r * r + a * a) / rr;
  gi(0, 3) = gi(3, 0) = a / rr;
  gi(1, 1) = D / rr;
  gi(1, 3) = gi(3, 1) = orient * a / rr;
  gi(2, 2) = 1.0 / rr;
  gi(3, 3) = 1.0 / (rr * s2);
  return gi;
}

Eigen::Matrix4d checked_inverse(const Eigen::Matrix4d& g) {
  // Symmetric equilibration first: far from the horizon the Kruskal components
  // span many orders of magnitude.
  Eigen::Vector4d sc;
  for (int i = 0; i < 4; ++i) {
    const double m = g.row(i).cwiseAbs().maxCoeff();
    if (!(m > 0) || !std::isfinite(m)) throw ConditioningError("metric is numerically singular");
    sc[i] = 1.0 / std::sqrt(m);
  }
  const Eigen::Matrix4d gs = sc.asDiagonal() * g * sc.asDiagonal();
  Eigen::FullPivLU<Eigen::Matrix4d> lu(gs);
  if (!lu.isInvertible()) throw ConditioningError("metric is numerically singular");
  Eigen::Matrix4d gsi = lu.inverse();
  gsi = 0.5 * (gsi + gsi.transpose()).eval();
  const double dev = (gs * gsi - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff();
  if (dev > 1e-8) {
    std::ostringstream os;
    os << "metric inversion deviates from identity by " << dev;
    throw ConditioningError(os.str());
  }
  return sc.asDiagonal() * gsi * sc.asDiagonal();
}

}  // namespace

Eigen::Matrix4d kbl_metric_cov(const Kerr& k, double U, double V, double r,
                               double theta) {
  const double M = k.p.M, a = k.p.a;
  const double rp = k.h.r_plus, rm = k.h.r_minus, kap = k.h.kappa_plus;
  const double s = std::sin(theta), s2 = s * s, c = std::cos(theta);
  const double rr = rho2(k, r, theta);
  const double rrp = rp * rp + a * a * c * c;
  const double q = r * r + a * a, qp = rp * rp + a * a;
  const double G = kruskal_G(k, r);
  const double k2 = kap * kap;
  const double A = G * G * a * a * s2 / (4.0 * k2 * rr) * (r - rm) * (r + rp) / (q * qp) *
                   (rr / q + rrp / qp);
  const double X = G * G * a * a * s2 * (r + rp) * (r + rp) / (4.0 * k2 * rr * qp * qp);
  const double B = G * (r - rm) / (2.0 * k2 * rr) * (rr * rr / (q * q) + rrp * rrp / (qp * qp));
  const double Cp = G * a * s2 / (kap * rr * qp) * (rrp * (r - rm) + q * (r + rp));
  Eigen::Matrix4d g = Eigen::Matrix4d::Zero();
  g(0, 0) = (A + X) * V * V;
  g(1, 1) = (A + X) * U * U;
  g(0, 1) = g(1, 0) = 0.5 * B - X * U * V;
  g(0, 3) = g(3, 0) = -0.5 * Cp * V;
  g(1, 3) = g(3, 1) = 0.5 * Cp * U;
  g(2, 2) = rr;
  g(3, 3) = (q + 2.0 * M * r * a * a * s2 / rr) * s2;
  return g;
}

Eigen::Matrix4d covariant_metric(const Kerr& k, const SpacetimePoint& p,
                                 double epsilon0) {
  require_domain(k, p, epsilon0);
  const auto& x = p.x;
  switch (p.chart) {
    case Chart::BL_I:
    case Chart::BL_II:
    case Chart::BL_IPrime:
    case Chart::BL_IIPrime:
      check_horizon(k, x[1]);
      return bl_metric_cov(k, x[1], x[2]);
    case Chart::KerrStar: return kerr_star_metric_cov(k, x[1], x[2], 1);
    case Chart::StarKerr: return kerr_star_metric_cov(k, x[1], x[2], -1);
    case Chart::KBL: {
      const double r = kruskal_radius(k, x[0] * x[1]);
      return kbl_metric_cov(k, x[0], x[1], r, x[2]);
    }
    case Chart::ConformalKerrStar: return conformal_metric_cov(k, x[1], x[2], 1);
    case Chart::ConformalStarKerr: return conformal_metric_cov(k, x[1], x[2], -1);
  }
  throw DomainError("unknown chart");
}

MetricTensor metric(const Kerr& k, const SpacetimePoint& p, double epsilon0) {
  MetricTensor m;
  m.cov = covariant_metric(k, p, epsilon0);
  check_axis(p.x[2]);
  switch (p.chart) {
    case Chart::BL_I:
    case Chart::BL_II:
    case Chart::BL_IPrime:
    case Chart::BL_IIPrime: m.contra = bl_contra(k, p.x[1], p.x[2]); break;
    case Chart::KerrStar: m.contra = kerr_star_contra(k, p.x[1], p.x[2], 1); break;
    case Chart::StarKerr: m.contra = kerr_star_contra(k, p.x[1], p.x[2], -1); break;
    default: m.contra = checked_inverse(m.cov); break;
  }
  m.det = m.cov.determinant();
  return m;
}

double conformal_epsilon0(const Kerr& k, int grid) {
  double eps = 0.05 / k.p.M;
  for (int halvings = 0; halvings < 40; ++halvings, eps *= 0.5) {
    bool ok = true;
    for (int i = 0; i < grid && ok; ++i) {
      // w runs over (-eps, 0]
      const double w = -eps * double(i) / grid;
      for (int j = 0; j < grid && ok; ++j) {
        const double theta = M_PI * (j + 0.5) / grid;
        const Eigen::Matrix4d g = conformal_metric_cov(k, w, theta, 1);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(g, Eigen::EigenvaluesOnly);
        const auto& ev = es.eigenvalues();
        int neg = 0;
        for (int e = 0; e < 4; ++e) neg += ev[e] < 0;
        ok = neg == 1 && ev.cwiseAbs().minCoeff() > 1e-12;
      }
    }
    if (ok) return eps;
  }
  throw ConditioningError("no Lorentzian neighbourhood of w = 0 found");
}

}  // namespace kerrkit
