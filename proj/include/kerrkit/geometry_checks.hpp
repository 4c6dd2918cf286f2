#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kerrkit/charts.hpp"
#include "kerrkit/params.hpp"

namespace kerrkit {

enum class Region { I, II, IPrime, IIPrime };

Chart bl_chart(Region r);

// Maps four uniforms in [0,1) to a Boyer-Lindquist point in the region,
// kept 5% of the horizon gap away from r+- and 0.1 away from the axis.
SpacetimePoint sample_bl_point(const Kerr& k, Region region, const std::vector<double>& u,
                               double r_max = 40.0);

struct ChartPair {
  Chart from;
  Chart to;
  std::vector<Region> regions;  // where the overlap is sampled
};

const std::vector<ChartPair>& overlapping_chart_pairs();

// Covariant metric of the physical spacetime at p (conformal charts divided by w^2).
Eigen::Matrix4d physical_metric(const Kerr& k, const SpacetimePoint& p);

// max |J^T g_to J - g_from| with J the numeric Jacobian of the transition,
// measured in the source chart's normalisation (w^2 g for conformal sources).
double pullback_residual(const Kerr& k, const SpacetimePoint& from, Chart to);

struct IsometryReport {
  Chart from;
  Chart to;
  int samples = 0;
  double max_residual = 0;
};

IsometryReport isometry_check(const Kerr& k, const ChartPair& pair, int samples,
                              std::uint64_t seed);

}  // namespace kerrkit
