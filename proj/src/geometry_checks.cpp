#include "kerrkit/geometry_checks.hpp"

#include <cmath>
#include <numbers>

#include "kerrkit/errors.hpp"
#include "kerrkit/metric.hpp"
#include "kerrkit/sampling.hpp"

namespace kerrkit {

Chart bl_chart(Region r) {
  switch (r) {
    case Region::I: return Chart::BL_I;
    case Region::II: return Chart::BL_II;
    case Region::IPrime: return Chart::BL_IPrime;
    case Region::IIPrime: return Chart::BL_IIPrime;
  }
  return Chart::BL_I;
}

SpacetimePoint sample_bl_point(const Kerr& k, Region region, const std::vector<double>& u,
                               double r_max) {
  const double rp = k.h.r_plus, rm = k.h.r_minus, gap = rp - rm;
  const double t = -5.0 + 10.0 * u[0];
  double r;
  if (region == Region::I || region == Region::IPrime) {
    r = rp + 0.05 * gap + (r_max - rp - 0.05 * gap) * u[1];
  } else {
    r = rm + gap * (0.05 + 0.9 * u[1]);
  }
  const double theta = 0.1 + (std::numbers::pi - 0.2) * u[2];
  const double phi = 0.5 + 5.0 * u[3];
  return {bl_chart(region), t, r, theta, phi};
}

const std::vector<ChartPair>& overlapping_chart_pairs() {
  using C = Chart;
  using R = Region;
  static const std::vector<ChartPair> pairs = {
      {C::BL_I, C::KerrStar, {R::I}},
      {C::BL_I, C::StarKerr, {R::I}},
      {C::BL_I, C::KBL, {R::I}},
      {C::BL_I, C::ConformalKerrStar, {R::I}},
      {C::BL_I, C::ConformalStarKerr, {R::I}},
      {C::BL_II, C::KerrStar, {R::II}},
      {C::BL_II, C::KBL, {R::II}},
      {C::BL_IPrime, C::KBL, {R::IPrime}},
      {C::BL_IIPrime, C::KBL, {R::IIPrime}},
      {C::BL_IIPrime, C::StarKerr, {R::IIPrime}},
      {C::KerrStar, C::StarKerr, {R::I}},
      {C::KerrStar, C::KBL, {R::I, R::II}},
      {C::StarKerr, C::KBL, {R::I, R::IIPrime}},
      {C::KerrStar, C::ConformalKerrStar, {R::I}},
      {C::StarKerr, C::ConformalStarKerr, {R::I}},
      {C::KBL, C::ConformalKerrStar, {R::I}},
      {C::KBL, C::ConformalStarKerr, {R::I}},
      {C::ConformalKerrStar, C::ConformalStarKerr, {R::I}},
      {C::KerrStar, C::ConformalStarKerr, {R::I}},
      {C::StarKerr, C::ConformalKerrStar, {R::I}},
  };
  return pairs;
}

Eigen::Matrix4d physical_metric(const Kerr& k, const SpacetimePoint& p) {
  Eigen::Matrix4d g = covariant_metric(k, p);
  if (is_conformal(p.chart)) g /= p.x[1] * p.x[1];
  return g;
}

double pullback_residual(const Kerr& k, const SpacetimePoint& from, Chart to) {
  ChartMapOptions o;
  o.reduce_azimuth = false;
  const SpacetimePoint target = chart_map(k, from, to, o);
  const Eigen::Matrix4d J = chart_jacobian(k, from, to);
  const Eigen::Matrix4d pulled = J.transpose() * physical_metric(k, target) * J;
  // Compare in the source chart's own normalisation (hat g for conformal charts).
  const double scale = is_conformal(from.chart) ? from.x[1] * from.x[1] : 1.0;
  return scale * (pulled - physical_metric(k, from)).cwiseAbs().maxCoeff();
}

IsometryReport isometry_check(const Kerr& k, const ChartPair& pair, int samples,
                              std::uint64_t seed) {
  IsometryReport rep{pair.from, pair.to, 0, 0.0};
  Halton h(5, seed);
  for (int i = 0; i < samples; ++i) {
    const auto u = h.next();
    const Region reg = pair.regions[std::size_t(u[4] * pair.regions.size())];
    const SpacetimePoint bl = sample_bl_point(k, reg, u);
    ChartMapOptions o;
    o.reduce_azimuth = false;
    const SpacetimePoint src = chart_map(k, bl, pair.from, o);
    rep.max_residual = std::max(rep.max_residual, pullback_residual(k, src, pair.to));
    ++rep.samples;
  }
  return rep;
}

}  // namespace kerrkit
