#include "kerrkit/causal.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>

#include "kerrkit/classify.hpp"
#include "kerrkit/errors.hpp"
#include "kerrkit/functions.hpp"
#include "kerrkit/geodesic_sampling.hpp"
#include "kerrkit/metric.hpp"
#include "kerrkit/sampling.hpp"

namespace kerrkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kKinkGap = 1e-9;

// Adaptive Gauss-Kronrod 7/15.
double integrate_gk(const std::function<double(double)>& f, double a, double b, double tol,
                    int depth = 0) {
  static const double xk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                               0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                               0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                               0.207784955007898467600689403773245, 0.0};
  static const double wk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                               0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                               0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                               0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static const double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                               0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double K = wk[7] * fc, G = wg[3] * fc, mag = std::abs(K);
  for (int i = 0; i < 7; ++i) {
    const double f1 = f(c - h * xk[i]), f2 = f(c + h * xk[i]);
    K += wk[i] * (f1 + f2);
    mag += wk[i] * (std::abs(f1) + std::abs(f2));
    if (i % 2 == 1) G += wg[i / 2] * (f1 + f2);
  }
  K *= h;
  G *= h;
  if (!std::isfinite(K)) throw QuadratureError("non-finite integrand");
  if (std::abs(K - G) <= std::max(tol, 1e-15 * std::abs(h) * mag)) return K;
  if (depth > 40) throw QuadratureError("adaptive quadrature did not converge");
  return integrate_gk(f, a, c, tol / 2, depth + 1) + integrate_gk(f, c, b, tol / 2, depth + 1);
}

template <class F>
double bisect(F&& g, double lo, double hi) {
  double glo = g(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double gm = g(mid);
    if ((gm < 0) == (glo < 0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

bool straddles(double g1, double g2) { return (g1 <= 0 && g2 >= 0) || (g1 >= 0 && g2 <= 0); }

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

RadialProfiles::RadialProfiles(const Kerr& k) : k_(k) {
  const double rm = k.r_minus(), rp = k.r_plus();
  eps_ = 0.1 * (rp - rm);
  mid_ = 0.5 * (rp + rm);
  J_ = integrate_gk([&](double s) { return chi(s) / (s - rm); }, rm + eps_, mid_, 1e-15);
  y3_ = y(3 * k.M());
}

double RadialProfiles::f(double r) const {
  const double a = k_.a(), M = k_.M();
  const double D = Delta(k_, r), q = r * r + a * a;
  return q * q / (D * D) - (a * a + M * M) / D;
}

double RadialProfiles::y_prime(double r) const { return std::sqrt(f(r)); }

double RadialProfiles::y(double r) const {
  const double a = k_.a(), M = k_.M(), rp = k_.r_plus();
  if (!(r > rp)) throw DomainError("y(r) is defined for r > r+");
  // f^(1/2) - (r^2+a^2)/Delta written without the cancellation at r+.
  auto g = [&](double s) {
    const double q = s * s + a * a;
    const double z = (a * a + M * M) * Delta(k_, s) / (q * q);
    return -(a * a + M * M) / (q * (1 + std::sqrt(1 - z)));
  };
  return tortoise_x(k_, r) + integrate_gk(g, rp, r, 1e-14 * M);
}

double RadialProfiles::x_tilde(double r) const { return r <= 3 * k_.M() ? y(r) : y3_; }

double RadialProfiles::x_tilde_prime(double r) const { return r < 3 * k_.M() ? y_prime(r) : 0.0; }

double RadialProfiles::x_tilde_n(double r, double n) const { return std::max(-n, x_tilde(r)); }

double RadialProfiles::x_tilde_n_prime(double r, double n) const {
  return x_tilde(r) > -n ? x_tilde_prime(r) : 0.0;
}

double RadialProfiles::x_n(double r, double n) const {
  const double M = k_.M();
  return std::min(r - 2 * M * std::log(r / M), n);
}

double RadialProfiles::x_n_prime(double r, double n) const {
  const double M = k_.M();
  return r - 2 * M * std::log(r / M) < n ? 1 - 2 * M / r : 0.0;
}

double RadialProfiles::chi(double r) const {
  const double lo = k_.r_minus() + eps_;
  const double s = std::clamp((r - lo) / (mid_ - lo), 0.0, 1.0);
  return 1 - s * s * s * (10 - 15 * s + 6 * s * s);
}

double RadialProfiles::v_prime(double r) const {
  const double rm = k_.r_minus();
  if (!(r > rm)) throw DomainError("v(r) is defined for r > r-");
  return 1 + chi(r) / (r - rm);
}

double RadialProfiles::v(double r) const {
  const double rm = k_.r_minus();
  if (!(r > rm)) throw DomainError("v(r) is defined for r > r-");
  if (r >= mid_) return r;
  if (r <= rm + eps_) return v_log(std::log(r - rm));
  return r - integrate_gk([&](double s) { return chi(s) / (s - rm); }, r, mid_, 1e-15);
}

double RadialProfiles::v_log(double ell) const {
  const double d = std::exp(ell);
  if (d > eps_) return v(k_.r_minus() + d);
  return k_.r_minus() + d - std::log(eps_) + ell - J_;
}

double RadialProfiles::log_r_T_gap(double T) const {
  const double rp = k_.r_plus(), rm = k_.r_minus();
  const double kap = k_.h.kappa_plus;
  // x(r) - r in terms of l = ln(r - r+), exact for any l.
  auto g = [&](double ell) {
    double v = ell / (2 * kap) + T;
    if (k_.a() != 0.0) v += k_.h.half_inv_kappa_minus * std::log(rp - rm + std::exp(ell));
    return v;
  };
  const double hi = std::log(rp);
  if (g(hi) <= 0) throw RootBracketError("r_T: x(r) - r > -T has no solution in (r+, 2r+)");
  const double lo = -700.0;
  if (g(lo) >= 0) throw RootBracketError("r_T below the resolvable range");
  return bisect(g, lo, hi);
}

double RadialProfiles::r_T(double T) const { return k_.r_plus() + std::exp(log_r_T_gap(T)); }

std::vector<double> RadialProfiles::x_n_kinks(double n) const {
  const double M = k_.M(), rp = k_.r_plus();
  auto h = [&](double r) { return r - 2 * M * std::log(r / M) - n; };
  std::vector<double> out;
  // h decreases up to 2M and increases beyond.
  if (rp < 2 * M && straddles(h(rp), h(2 * M))) out.push_back(bisect(h, rp, 2 * M));
  double hi = std::max(2 * M, rp);
  if (h(hi) < 0) {
    double top = 2 * hi;
    while (h(top) < 0) top *= 2;
    out.push_back(bisect(h, hi, top));
  }
  return out;
}

std::vector<double> RadialProfiles::x_tilde_n_kinks(double n) const {
  const double rp = k_.r_plus(), M = k_.M();
  if (y3_ <= -n) return {};
  // y is increasing and tends to -infinity at r+; solve in l = ln(r - r+).
  const double lo = std::log(8 * std::numeric_limits<double>::epsilon() * rp);
  if (y(rp + std::exp(lo)) + n >= 0) throw DomainError("x_tilde_n kink closer to r+ than resolvable");
  const double ell = bisect([&](double l) { return y(rp + std::exp(l)) + n; }, lo, std::log(3 * M - rp));
  return {rp + std::exp(ell), 3 * M};
}

double fit_r_T_rate(const RadialProfiles& prof, const std::vector<double>& Ts) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double T : Ts) {
    const double yv = prof.log_r_T_gap(T);
    sx += T;
    sy += yv;
    sxx += T * T;
    sxy += T * yv;
  }
  const double n = double(Ts.size());
  return -(n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string surface_name(const SurfaceSpec& s) {
  return std::visit(Overloaded{[](const SigmaT&) { return std::string("SigmaT"); },
                               [](const SigmaBar&) { return std::string("SigmaBar"); },
                               [](const SigmaTilde&) { return std::string("SigmaTilde"); },
                               [](const ZT&) { return std::string("Z"); },
                               [](const SigmaM&) { return std::string("SigmaM"); }},
                    s);
}

std::string surface_block(const SurfaceSpec& s) {
  if (std::holds_alternative<ZT>(s)) return "M_I+II";
  if (std::holds_alternative<SigmaM>(s)) return "M";
  return "M_I";
}

Chart surface_chart(const SurfaceSpec& s) {
  if (std::holds_alternative<ZT>(s)) return Chart::KerrStar;
  if (std::holds_alternative<SigmaM>(s)) return Chart::KBL;
  return Chart::BL_I;
}

std::vector<Region> surface_regions(const SurfaceSpec& s) {
  if (std::holds_alternative<ZT>(s)) return {Region::I, Region::II};
  if (std::holds_alternative<SigmaM>(s)) return {Region::I, Region::II, Region::IPrime, Region::IIPrime};
  return {Region::I};
}

namespace {

SpacetimePoint to_spec_chart(const RadialProfiles& prof, const SurfaceSpec& s,
                             const SpacetimePoint& p) {
  const Chart c = surface_chart(s);
  if (p.chart == c) {
    require_domain(prof.kerr(), p);
    return p;
  }
  ChartMapOptions o;
  o.reduce_azimuth = false;
  return chart_map(prof.kerr(), p, c, o);
}

void check_kinks(const RadialProfiles& prof, const SurfaceSpec& s, double r) {
  const Kerr& k = prof.kerr();
  const double d = kKinkGap * k.M();
  auto near = [&](const std::function<double(double)>& g) {
    return straddles(g(r - d), g(r + d));
  };
  bool hit = false;
  std::visit(Overloaded{
                 [&](const SigmaT&) {},
                 [&](const SigmaBar& sb) {
                   const double M = k.M();
                   hit = near([&](double q) { return q - 2 * M * std::log(q / M) - sb.n; });
                 },
                 [&](const SigmaTilde& st) {
                   const double M = k.M();
                   if (std::abs(r - 3 * M) <= d) hit = true;
                   if (!hit && r < 3 * M)
                     hit = near([&](double q) {
                       return q <= k.r_plus() ? -kInf : prof.y(q) + st.n;
                     });
                 },
                 [&](const ZT& z) { hit = std::abs(r - prof.r_T(z.T)) <= d; },
                 [&](const SigmaM&) {}},
             s);
  if (hit) throw DomainError("point within 1e-9 M of a profile kink");
}

Eigen::Vector4d surface_differential(const RadialProfiles& prof, const SurfaceSpec& s,
                                     const SpacetimePoint& q) {
  const Kerr& k = prof.kerr();
  const double r = radius(k, q);
  Eigen::Vector4d du = Eigen::Vector4d::Zero();
  std::visit(Overloaded{
                 [&](const SigmaT&) { du[0] = 1; },
                 [&](const SigmaBar& sb) {
                   du[0] = 1;
                   du[1] = prof.x_n_prime(r, sb.n);
                 },
                 [&](const SigmaTilde& st) {
                   du[0] = 1;
                   du[1] = -prof.x_tilde_n_prime(r, st.n);
                 },
                 [&](const ZT& z) {
                   du[0] = 1;
                   if (r <= prof.r_T(z.T)) {
                     du[1] = -prof.v_prime(r);
                   } else {
                     const double a = k.a();
                     du[1] = -(r * r + a * a) / Delta(k, r);
                   }
                 },
                 [&](const SigmaM&) {
                   du[0] = 1;
                   du[1] = -1;
                 }},
             s);
  return du;
}

}  // namespace

double surface_value(const RadialProfiles& prof, const SurfaceSpec& s, const SpacetimePoint& p) {
  const Kerr& k = prof.kerr();
  const SpacetimePoint q = to_spec_chart(prof, s, p);
  const double r = radius(k, q);
  return std::visit(Overloaded{
                        [&](const SigmaT& v) { return q.x[0] - v.T; },
                        [&](const SigmaBar& v) { return q.x[0] + prof.x_n(r, v.n) - v.T; },
                        [&](const SigmaTilde& v) { return q.x[0] - prof.x_tilde_n(r, v.n) - v.T; },
                        [&](const ZT& v) {
                          if (r <= prof.r_T(v.T)) return q.x[0] - prof.v(r) + v.T;
                          return q.x[0] - tortoise_x(k, r);
                        },
                        [&](const SigmaM&) { return q.x[0] - q.x[1]; }},
                    s);
}

double surface_gradient_norm(const RadialProfiles& prof, const SurfaceSpec& s,
                             const SpacetimePoint& p) {
  const Kerr& k = prof.kerr();
  const SpacetimePoint q = to_spec_chart(prof, s, p);
  check_kinks(prof, s, radius(k, q));
  const double U = q.x[0], V = q.x[1];
  if (std::holds_alternative<SigmaM>(s) && U != 0 && V != 0 && std::max(std::abs(U), std::abs(V)) > 1e3) {
    // Far out the Kruskal components span too many scales to invert cleanly;
    // there d(U - V) = -kappa (U + V) dt + kappa x' (U - V) dr in the block's
    // Boyer-Lindquist chart.
    const Region reg = U > 0 ? (V > 0 ? Region::I : Region::IIPrime) : (V > 0 ? Region::II : Region::IPrime);
    ChartMapOptions o;
    o.reduce_azimuth = false;
    const SpacetimePoint b = chart_map(k, q, bl_chart(reg), o);
    const double r = b.x[1], a = k.a(), kap = k.h.kappa_plus;
    const Eigen::Vector4d du(-kap * (U + V), kap * (r * r + a * a) / Delta(k, r) * (U - V), 0, 0);
    return du.dot(metric(k, b).contra * du);
  }
  const Eigen::Vector4d du = surface_differential(prof, s, q);
  return du.dot(metric(k, q).contra * du);
}

std::optional<BoundCheck> gradient_bound(const RadialProfiles& prof, const SurfaceSpec& s,
                                         const SpacetimePoint& p) {
  if (std::holds_alternative<SigmaT>(s) || std::holds_alternative<SigmaM>(s)) return std::nullopt;
  const Kerr& k = prof.kerr();
  const SpacetimePoint q = to_spec_chart(prof, s, p);
  const double r = radius(k, q);
  check_kinks(prof, s, r);
  const double M = k.M(), a = k.a();
  const double rr = rho2(k, r, q.x[2]);
  const Eigen::Vector4d du = surface_differential(prof, s, q);
  const Eigen::Matrix4d gi = metric(k, q).contra;
  double norm = 0, scale = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const double t = du[i] * gi(i, j) * du[j];
      norm += t;
      scale += std::abs(t);
    }
  BoundCheck b;
  b.scale = scale;
  if (std::holds_alternative<SigmaBar>(s)) {
    const double D = Delta(k, r);
    b.value = -norm;
    b.bound = (2 * M * r * (r * r + a * a) + (2 * M * r - a * a) * D) / (D * rr);
    return b;
  }
  if (std::holds_alternative<SigmaTilde>(s)) {
    b.value = -norm;
    b.bound = M * M / rr;
    return b;
  }
  if (const auto* z = std::get_if<ZT>(&s)) {
    if (r > prof.r_T(z->T)) return std::nullopt;
    b.upper = true;
    b.value = norm;
    b.bound = (-r * r - 2 * M * r) / rr;
    return b;
  }
  return std::nullopt;
}

SpacetimePoint sample_surface_point(const RadialProfiles& prof, const SurfaceSpec& s,
                                    const std::vector<double>& u) {
  const Kerr& k = prof.kerr();
  const double M = k.M(), rp = k.r_plus(), rm = k.r_minus(), gap = rp - rm;
  const double theta = 0.01 + (std::numbers::pi - 0.02) * u[2];
  const double phi = 2 * std::numbers::pi * u[3];
  const double t = -20 + 40 * u[0];
  // Exterior radius: half log-spread in r - r+ over [1e-6, 1e2] M, half uniform to 50 M.
  auto exterior = [&](double w) {
    if (w < 0.5) return rp + M * std::pow(10.0, -6 + 8 * (2 * w));
    return rp + 50 * M * (2 * w - 1) + 1e-6 * M;
  };
  // Interior radius, log-spread towards both horizons.
  auto interior = [&](double w) {
    const double lo = std::max(1e-6 * M, 1e-6 * gap);
    if (w < 0.5) return rm + std::exp(std::log(lo) + (std::log(0.5 * gap) - std::log(lo)) * 2 * w);
    return rp - std::exp(std::log(lo) + (std::log(0.5 * gap) - std::log(lo)) * (2 * w - 1));
  };
  auto nudge = [&](double r) {
    for (int i = 0; i < 8; ++i) {
      try {
        check_kinks(prof, s, r);
        return r;
      } catch (const DomainError&) {
        r += 4 * kKinkGap * M;
      }
    }
    return r;
  };
  if (std::holds_alternative<ZT>(s)) {
    const double r = nudge(u[1] < 0.4 ? interior(u[1] / 0.4) : exterior((u[1] - 0.4) / 0.6));
    return {Chart::KerrStar, t, r, theta, phi};
  }
  if (std::holds_alternative<SigmaM>(s)) {
    // On the surface itself: t = 0 in M_I and M_I', and the crossing sphere.
    const double w = u[1];
    if (w >= 0.9) return {Chart::KBL, 0.0, 0.0, theta, phi};
    const Region reg = w < 0.45 ? Region::I : Region::IPrime;
    const SpacetimePoint bl(bl_chart(reg), 0.0, exterior(std::fmod(w / 0.45, 1.0)), theta, phi);
    ChartMapOptions o;
    o.reduce_azimuth = false;
    return chart_map(k, bl, Chart::KBL, o);
  }
  return {Chart::BL_I, t, nudge(exterior(u[1])), theta, phi};
}

GradientSurvey gradient_survey(const RadialProfiles& prof, const SurfaceSpec& s, int n,
                               std::uint64_t seed, double bound_tol) {
  GradientSurvey out;
  out.name = surface_name(s);
  out.a = prof.kerr().a();
  Halton h(4, seed);
  for (int i = 0; i < n; ++i) {
    const SpacetimePoint p = sample_surface_point(prof, s, h.next());
    const double g = surface_gradient_norm(prof, s, p);
    ++out.samples;
    if (g < 0) ++out.timelike;
    out.worst_norm = std::max(out.worst_norm, g);
    if (const auto b = gradient_bound(prof, s, p)) {
      ++out.bound_samples;
      if (!b->holds(bound_tol)) ++out.bound_violations;
      out.worst_bound_margin = std::min(out.worst_bound_margin, b->margin() / std::max(1.0, b->scale));
    }
  }
  return out;
}

MaximalPath integrate_maximal(const Kerr& k, const GeodesicState& s, const FirstIntegrals& I,
                              const IntegrateConfig& cfg) {
  MaximalPath m;
  m.forward = integrate(k, s, I, cfg);
  m.backward = integrate(k, reversed_state(s), reversed_integrals(I), cfg);
  return m;
}

namespace {

TracePoint trace_point(const PathSample& p) {
  TracePoint q;
  q.block = p.block;
  q.r = p.x[1];
  q.theta = p.x[2];
  q.t = p.x[0];
  q.tstar = p.tstar;
  q.star_t = p.star_t;
  return q;
}

TracePoint trace_point(const Kerr& k, const HorizonTail& tail, const TailSample& s) {
  TracePoint q;
  q.block = tail.block;
  const bool plus = tail.r_h == k.r_plus();
  const double sigma = (tail.block == Region::II && plus) ? -1.0 : 1.0;
  q.r = tail.r_h + sigma * std::exp(s.log_distance);
  q.theta = s.theta;
  q.t = s.t_bl;
  q.tstar = s.tstar;
  q.star_t = s.star_t;
  (plus ? q.ell_plus : q.ell_minus) = s.log_distance;
  return q;
}

}  // namespace

std::vector<TracePoint> path_trace(const Kerr& k, const MaximalPath& p) {
  std::vector<TracePoint> out;
  if (p.backward.tail)
    for (auto it = p.backward.tail->samples.rbegin(); it != p.backward.tail->samples.rend(); ++it)
      out.push_back(trace_point(k, *p.backward.tail, *it));
  for (auto it = p.backward.samples.rbegin(); it != p.backward.samples.rend(); ++it)
    out.push_back(trace_point(*it));
  for (std::size_t i = 1; i < p.forward.samples.size(); ++i)
    out.push_back(trace_point(p.forward.samples[i]));
  if (p.forward.tail)
    for (const auto& s : p.forward.tail->samples) out.push_back(trace_point(k, *p.forward.tail, s));
  return out;
}

double trace_value(const RadialProfiles& prof, const SurfaceSpec& s, const TracePoint& q) {
  const Kerr& k = prof.kerr();
  auto need_I = [&] {
    if (q.block != Region::I) throw DomainError(surface_name(s) + " is defined on M_I only");
  };
  return std::visit(
      Overloaded{
          [&](const SigmaT& v) {
            need_I();
            return q.t - v.T;
          },
          [&](const SigmaBar& v) {
            need_I();
            return q.t + prof.x_n(q.r, v.n) - v.T;
          },
          [&](const SigmaTilde& v) {
            need_I();
            return q.t - (std::isnan(q.ell_plus) ? prof.x_tilde_n(q.r, v.n) : -v.n) - v.T;
          },
          [&](const ZT& v) {
            // continuation past H_I' leaves the domain of Z(T); those points carry no value
            if (q.block != Region::I && q.block != Region::II) return kNaN;
            const bool inner = q.block == Region::II || !std::isnan(q.ell_plus) ||
                               q.r <= prof.r_T(v.T);
            if (!inner) return q.t;
            const double vr = std::isnan(q.ell_minus) ? prof.v(q.r) : prof.v_log(q.ell_minus);
            return q.tstar - vr + v.T;
          },
          [&](const SigmaM&) {
            using LD = long double;
            const LD kap = k.h.kappa_plus, rp = k.r_plus(), rm = k.r_minus();
            int sU = 1, sV = 1;
            switch (q.block) {
              case Region::I: break;
              case Region::II: sU = -1; break;
              case Region::IPrime: sU = sV = -1; break;
              case Region::IIPrime: sV = -1; break;
            }
            const LD dplus = std::isnan(q.ell_plus) ? LD(q.r) - rp
                                                    : (q.r < k.r_plus() ? -1 : 1) * std::exp(LD(q.ell_plus));
            LD G = std::exp(-2 * kap * LD(q.r));
            if (k.a() != 0.0) {
              const LD lm = std::isnan(q.ell_minus) ? std::log(LD(q.r) - rm) : LD(q.ell_minus);
              G *= std::exp(lm * rm / rp);
            }
            const bool ks = !std::isnan(q.tstar) &&
                            (std::isnan(q.star_t) || std::abs(q.tstar) <= std::abs(q.star_t));
            LD U, V;
            if (ks) {
              V = sV * std::exp(kap * LD(q.tstar));
              U = dplus / (V * G);
            } else {
              U = sU * std::exp(-kap * LD(q.star_t));
              V = dplus / (U * G);
            }
            const LD u = U - V;
            if (u > LD(1e300)) return kInf;
            if (u < LD(-1e300)) return -kInf;
            return double(u);
          }},
      s);
}

CrossingReport crossing_stats(const std::vector<double>& u, bool budget_limited) {
  CrossingReport r;
  r.budget_limited = budget_limited;
  r.sup_u = -kInf;
  r.inf_u = kInf;
  int last = 0;
  for (double v : u) {
    if (std::isnan(v)) continue;
    r.sup_u = std::max(r.sup_u, v);
    r.inf_u = std::min(r.inf_u, v);
    const int sg = v > 0 ? 1 : (v < 0 ? -1 : 0);
    if (sg == 0) continue;
    if (last != 0 && sg != last) ++r.sign_changes;
    last = sg;
  }
  r.enters_both = r.sup_u > 0 && r.inf_u < 0;
  r.sup_diverges = r.sup_u >= kDivergenceThreshold;
  r.inf_diverges = r.inf_u <= -kDivergenceThreshold;
  return r;
}

CrossingReport crossing_report(const RadialProfiles& prof, const SurfaceSpec& s,
                               const MaximalPath& path) {
  std::vector<double> u;
  for (const auto& q : path_trace(prof.kerr(), path)) u.push_back(trace_value(prof, s, q));
  auto cut = [](const GeodesicPath& p) {
    return p.termination == EventKind::Incomplete || p.termination == EventKind::DoubleRootApproach;
  };
  return crossing_stats(u, cut(path.backward) || cut(path.forward));
}

std::vector<SpacetimePoint> rest_photon(double theta, double phi, double s0, double s1, int n) {
  std::vector<SpacetimePoint> out;
  for (int i = 0; i < n; ++i) {
    const double s = s0 + (s1 - s0) * i / std::max(n - 1, 1);
    out.emplace_back(Chart::KBL, 0.0, s, theta, phi);
  }
  return out;
}

IntegrateConfig crossing_config(const SurfaceSpec& s) {
  IntegrateConfig c;
  c.max_affine = 1e7;
  c.continue_through_horizon = std::holds_alternative<ZT>(s) || std::holds_alternative<SigmaM>(s);
  return c;
}

CrossingSurvey crossing_survey(const RadialProfiles& prof, const SurfaceSpec& s, int per_type,
                               std::uint64_t seed, int max_draws) {
  const Kerr& k = prof.kerr();
  CrossingSurvey out;
  out.name = surface_name(s);
  out.a = k.a();
  const IntegrateConfig cfg = crossing_config(s);
  std::map<std::string, int> types;
  Halton h(6, seed);
  auto source = [&](auto draw) {
    // Draw until every type met from this source has its quota.
    std::map<std::string, int> seen;
    for (int d = 0; d < max_draws; ++d) {
      const SampledGeodesic g = draw(h.next());
      std::string label;
      try {
        label = classify(k, g.integrals, g.state).label();
      } catch (const Error&) {
        label = "unclassified";
      }
      int& c = seen[label];
      if (c >= per_type) {
        if (std::all_of(seen.begin(), seen.end(), [&](const auto& e) { return e.second >= per_type; }) &&
            d >= 4 * per_type)
          break;
        continue;
      }
      ++c;
      ++types[label];
      ++out.paths;
      const CrossingReport r = crossing_report(prof, s, integrate_maximal(k, g.state, g.integrals, cfg));
      if (r.crosses_once())
        ++out.crossed_once;
      else if (r.flagged_incomplete())
        ++out.flagged_incomplete;
      else
        ++out.failures;
    }
  };
  source([&](const std::vector<double>& u) { return sample_null_geodesic(k, Region::I, u); });
  if (std::holds_alternative<ZT>(s) || std::holds_alternative<SigmaM>(s))
    source([&](const std::vector<double>& u) { return sample_null_geodesic(k, Region::II, u); });
  if (k.a() != 0.0) source([&](const std::vector<double>& u) { return sample_zero_energy_geodesic(k, u); });
  out.types.assign(types.begin(), types.end());
  return out;
}

}  // namespace kerrkit
