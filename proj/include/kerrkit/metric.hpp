#pragma once

#include <Eigen/Core>

#include "kerrkit/charts.hpp"
#include "kerrkit/params.hpp"

namespace kerrkit {

struct MetricTensor {
  Eigen::Matrix4d cov;
  Eigen::Matrix4d contra;
  double det = 0;
};

// Covariant components only; valid on the axis.
Eigen::Matrix4d covariant_metric(const Kerr& k, const SpacetimePoint& p,
                                 double epsilon0 = 0.0);

// Covariant and contravariant components. Conformal charts return the
// rescaled metric w^2 g. Throws AxisError for sin(theta) <= 1e-8,
// HorizonError for Delta = 0 in Boyer-Lindquist charts and ConditioningError
// when a numerically inverted metric misses the identity by more than 1e-8.
MetricTensor metric(const Kerr& k, const SpacetimePoint& p, double epsilon0 = 0.0);

// Kruskal chart metric from (U, V, r, theta).
Eigen::Matrix4d kbl_metric_cov(const Kerr& k, double U, double V, double r,
                               double theta);

// Largest epsilon <= 0.05/M, halving from there, for which the conformal
// metric keeps exactly one negative eigenvalue on the validation grid
// w in (-epsilon, 0], theta in (0, pi).
double conformal_epsilon0(const Kerr& k, int grid = 32);

constexpr double kAxisSinTol = 1e-8;

}  // namespace kerrkit
