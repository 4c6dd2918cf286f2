#include "kerrkit/killing.hpp"

#include "kerrkit/errors.hpp"
#include "kerrkit/metric.hpp"

namespace kerrkit {

const char* killing_name(KillingField f) {
  switch (f) {
    case KillingField::V_I: return "V_I";
    case KillingField::V_H: return "V_H";
    case KillingField::D_PHI: return "D_PHI";
  }
  return "?";
}

Eigen::Vector4d killing_vector(const Kerr& k, KillingField f, const SpacetimePoint& p) {
  const double Om = k.h.Omega_H;
  if (p.chart == Chart::KBL) {
    const double kap = k.h.kappa_plus;
    const Eigen::Vector4d vh(-kap * p.x[0], kap * p.x[1], 0.0, 0.0);
    switch (f) {
      case KillingField::V_H: return vh;
      case KillingField::V_I: return vh - Eigen::Vector4d(0, 0, 0, Om);
      case KillingField::D_PHI: return {0, 0, 0, 1};
    }
  }
  // Every other chart has d_t and d_phi as its first and last coordinate fields.
  switch (f) {
    case KillingField::V_I: return {1, 0, 0, 0};
    case KillingField::V_H: return {1, 0, 0, Om};
    case KillingField::D_PHI: return {0, 0, 0, 1};
  }
  return Eigen::Vector4d::Zero();
}

double killing_norm(const Kerr& k, KillingField f, const SpacetimePoint& p) {
  const Eigen::Vector4d v = killing_vector(k, f, p);
  const Eigen::Matrix4d g = covariant_metric(k, p);
  double n = v.dot(g * v);
  if (is_conformal(p.chart)) {
    const double w = p.x[1];
    if (w <= 0.0) throw DomainError("physical norm undefined at or beyond null infinity");
    n /= w * w;
  }
  return n;
}

bool killing_future_timelike(const Kerr& k, KillingField f, const SpacetimePoint& p) {
  if (p.chart != Chart::BL_I) throw DomainError("time orientation is read off in BL_I");
  if (killing_norm(k, f, p) >= 0.0) return false;
  const MetricTensor m = metric(k, p);
  const Eigen::Vector4d v = killing_vector(k, f, p);
  const Eigen::Vector4d minus_grad_t = -m.contra.col(0);
  return v.dot(m.cov * minus_grad_t) < 0.0;
}

}  // namespace kerrkit
