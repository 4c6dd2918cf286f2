#pragma once

#include <array>
#include <optional>
#include <string>

#include <Eigen/Core>

#include "kerrkit/params.hpp"

namespace kerrkit {

// BL_IPrime and BL_IIPrime are the Boyer-Lindquist charts on the two blocks
// obtained from BL_I and BL_II by the wedge reflection.
enum class Chart {
  BL_I,
  BL_II,
  BL_IPrime,
  BL_IIPrime,
  KerrStar,
  StarKerr,
  KBL,
  ConformalKerrStar,
  ConformalStarKerr,
};

const char* chart_name(Chart c);
std::optional<Chart> chart_from_name(const std::string& name);
std::array<const char*, 4> coordinate_names(Chart c);
bool is_boyer_lindquist(Chart c);
bool is_conformal(Chart c);

struct SpacetimePoint {
  Chart chart = Chart::BL_I;
  Eigen::Vector4d x = Eigen::Vector4d::Zero();

  SpacetimePoint() = default;
  SpacetimePoint(Chart c, const Eigen::Vector4d& coords) : chart(c), x(coords) {}
  SpacetimePoint(Chart c, double x0, double x1, double x2, double x3)
      : chart(c), x(x0, x1, x2, x3) {}
};

// Reduces an azimuth to [0, 2 pi).
double reduce_azimuth(double phi);

// Validity domain of the chart; the conformal charts need epsilon0 (see
// conformal_epsilon0) for their w < 0 part.
bool in_domain(const Kerr& k, const SpacetimePoint& p, double epsilon0 = 0.0);
void require_domain(const Kerr& k, const SpacetimePoint& p, double epsilon0 = 0.0);

// Radius of the point, solving the Kruskal relation when needed.
double radius(const Kerr& k, const SpacetimePoint& p);

struct ChartMapOptions {
  bool reduce_azimuth = true;
  double epsilon0 = 0.0;
};

// Coordinate transition. Throws DomainError when the point is not in the
// overlap of the two charts and RootBracketError when the Kruskal relation
// cannot be inverted.
SpacetimePoint chart_map(const Kerr& k, const SpacetimePoint& from, Chart to,
                         const ChartMapOptions& opts = {});

// (U, V, theta, phi#) -> (-U, -V, theta, phi#)
SpacetimePoint wedge_reflect(const SpacetimePoint& kbl_point);

// Solves (r - r+)/(U V) = G(r) for r, given the product UV.
double kruskal_radius(const Kerr& k, double UV);

// Numeric Jacobian d(to)/d(from) by Ridders extrapolation of centred
// differences, starting from relative step `step`; azimuth jumps are unwrapped.
Eigen::Matrix4d chart_jacobian(const Kerr& k, const SpacetimePoint& from, Chart to,
                               double step = 1e-2, const ChartMapOptions& opts = {});

}  // namespace kerrkit
