#pragma once

#include <Eigen/Core>

#include "kerrkit/charts.hpp"
#include "kerrkit/params.hpp"

namespace kerrkit {

enum class KillingField { V_I, V_H, D_PHI };

const char* killing_name(KillingField f);

// Components of the field in the coordinate basis of p's chart.
Eigen::Vector4d killing_vector(const Kerr& k, KillingField f, const SpacetimePoint& p);

// g(v, v) with the physical metric (conformal charts are divided by w^2).
double killing_norm(const Kerr& k, KillingField f, const SpacetimePoint& p);

// Timelike and future directed, the latter decided by the sign of
// g(v, -grad t) in M_I. Requires a BL_I point.
bool killing_future_timelike(const Kerr& k, KillingField f, const SpacetimePoint& p);

}  // namespace kerrkit
