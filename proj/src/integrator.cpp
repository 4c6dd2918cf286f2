#include <cmath>
#include <limits>

#include "kerrkit/errors.hpp"
#include "kerrkit/functions.hpp"
#include "kerrkit/integrate.hpp"
#include "kerrkit/metric.hpp"
#include "kerrkit/roots.hpp"

namespace kerrkit {

const char* event_name(EventKind k) {
  switch (k) {
    case EventKind::HorizonCrossing: return "HorizonCrossing";
    case EventKind::Escape: return "Escape";
    case EventKind::TurningPointR: return "TurningPointR";
    case EventKind::TurningPointTheta: return "TurningPointTheta";
    case EventKind::DoubleRootApproach: return "DoubleRootApproach";
    case EventKind::AxisApproach: return "AxisApproach";
    case EventKind::Incomplete: return "Incomplete";
  }
  return "?";
}

GeodesicState reversed_state(const GeodesicState& s) {
  GeodesicState out = s;
  out.sign_r = -s.sign_r;
  out.sign_theta = -s.sign_theta;
  return out;
}

FirstIntegrals reversed_integrals(const FirstIntegrals& I) { return {-I.E, -I.L, I.Q}; }

namespace {

using Vec = Eigen::Matrix<double, 8, 1>;
enum : int { iR = 0, iTh, iPr, iPt, iTs, iPs, iSt, iSp };
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct System {
  const Kerr& k;
  FirstIntegrals I;
  double K;
  bool frozen = false;

  double D_over_s2(double s) const {
    if (I.L == 0.0) return -k.a() * I.E;
    if (std::abs(s) <= kAxisSinTol) throw IntegrationError("step-size underflow near the axis");
    return I.L / (s * s) - k.a() * I.E;
  }

  // (P + q)/Delta, using (P + q)(P - q) = Delta K when the sum cancels.
  double W(double P, double q, double Dl) const {
    if (P * q < 0) {
      const double den = P - q;
      return den == 0.0 ? 0.0 : K / den;
    }
    return (P + q) / Dl;
  }

  Vec operator()(const Vec& y) const {
    const double a = k.a();
    const double r = y[iR], th = y[iTh], pr = y[iPr], pt = y[iPt];
    const double s = std::sin(th), c = std::cos(th);
    const double rr = r * r + a * a * c * c;
    const double Dl = Delta(k, r);
    const double P = (r * r + a * a) * I.E - a * I.L;
    const double Dth = I.L - a * I.E * s * s;
    const double Ds = D_over_s2(s);
    Vec f;
    f[iR] = frozen ? 0.0 : pr / rr;
    f[iPr] = frozen ? 0.0 : potential_R_prime(k, I, r) / (2 * rr);
    f[iTh] = pt / rr;
    f[iPt] = potential_Theta_prime(k, I, th) / (2 * rr);
    const double wp = W(P, pr, Dl), wm = W(P, -pr, Dl);
    f[iTs] = (a * Dth + (r * r + a * a) * wp) / rr;
    f[iPs] = (Ds + a * wp) / rr;
    f[iSt] = (a * Dth + (r * r + a * a) * wm) / rr;
    f[iSp] = (Ds + a * wm) / rr;
    return f;
  }
};

double hermite(double y0, double f0, double y1, double f1, double h, double u) {
  const double u2 = u * u, u3 = u2 * u;
  return (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * h * f0 + (-2 * u3 + 3 * u2) * y1 +
         (u3 - u2) * h * f1;
}

struct Step {
  double s0, s1;
  Vec y0, y1, f0, f1;
  double h() const { return s1 - s0; }
  double comp(int i, double u) const { return hermite(y0[i], f0[i], y1[i], f1[i], h(), u); }
  Vec at(double u) const {
    Vec v;
    for (int i = 0; i < 8; ++i) v[i] = comp(i, u);
    return v;
  }
  // Fraction u in [0,1] where component i crosses `level` (assumes a sign change).
  double locate(int i, double level, double u_hi = 1.0) const {
    double lo = 0, hi = u_hi;
    const double g0 = y0[i] - level;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double g = comp(i, mid) - level;
      if ((g < 0) == (g0 < 0) && g != 0.0)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  }
};

double log_abs_distance(double r, double root, double root_log, bool use_log) {
  return use_log ? root_log : std::log(std::abs(r - root));
}

// x(r) with ln|r - r_h| supplied when r sits (numerically) on a horizon.
double tortoise_x_log(const Kerr& k, double r, double r_h, double ell) {
  const bool plus = (r_h == k.r_plus());
  double x = r + log_abs_distance(r, k.r_plus(), ell, plus) / (2 * k.h.kappa_plus);
  if (k.a() != 0.0)
    x += k.h.half_inv_kappa_minus * log_abs_distance(r, k.r_minus(), ell, !plus);
  return x;
}


struct RecoveredIntegrals {
  double E, L, null_norm;
};

// E and L recomputed from the state by contracting its velocity with the
// Killing fields, in whichever of the Kerr-star / star-Kerr forms has the
// regular time velocity (Boyer-Lindquist is singular on both horizons).
// Near r = 0 the contraction cancels terms of order 1/rho^2, so it is carried
// out in extended precision.
RecoveredIntegrals recover_integrals(const Kerr& k, const FirstIntegrals& I, double r_d,
                                     double th_d, double pr_d, double pt_d, bool frozen) {
  using T = long double;
  const T a = k.a(), E = I.E, L = I.L, Q = I.Q;
  const T r = r_d, th = th_d, pr = frozen ? T(0) : T(pr_d), pt = pt_d;
  const T s = std::sin(th), c = std::cos(th);
  const T rr = r * r + a * a * c * c;
  const T Dl = r * r - 2 * T(k.M()) * r + a * a;
  const T K = Q + (L - a * E) * (L - a * E);
  const T P = (r * r + a * a) * E - a * L;
  const T Dth = L - a * E * s * s;
  const T Ds = (I.L == 0.0) ? -a * E : L / (s * s) - a * E;
  auto W = [&](T q) -> T {
    if (P * q < 0) {
      const T den = P - q;
      return den == 0 ? T(0) : K / den;
    }
    return (P + q) / Dl;
  };
  const T wp = W(pr), wm = W(-pr);
  const T tks = (a * Dth + (r * r + a * a) * wp) / rr;
  const T tsk = (a * Dth + (r * r + a * a) * wm) / rr;
  const bool use_ks = std::abs(tks) <= std::abs(tsk);
  Eigen::Matrix<T, 4, 1> v;
  v << (use_ks ? tks : tsk), pr / rr, pt / rr, (Ds + a * (use_ks ? wp : wm)) / rr;
  const Eigen::Matrix<T, 4, 4> g = kerr_star_metric_cov<T>(k, r, th, use_ks ? 1 : -1);
  const Eigen::Matrix<T, 4, 1> gv = g * v;
  T sum = 0, mag = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const T t = g(i, j) * v(i) * v(j);
      sum += t;
      mag += std::abs(t);
    }
  return {double(-gv(0)), double(gv(3)), mag == 0 ? 0.0 : double(std::abs(sum) / mag)};
}

class Integrator {
 public:
  Integrator(const Kerr& k, const FirstIntegrals& I, const IntegrateConfig& cfg)
      : k_(k), I_(I), cfg_(cfg), sys_{k, I, carter_K(k, I)} {}

  GeodesicPath run(const GeodesicState& init);

 private:
  const Kerr& k_;
  FirstIntegrals I_;
  IntegrateConfig cfg_;
  System sys_;
  Region block_ = Region::I;
  GeodesicPath path_;
  std::vector<double> double_roots_;

  double pscale() const {
    const double M = k_.M();
    return std::abs(I_.E) * M * M + std::abs(I_.L) * M + std::sqrt(std::abs(I_.Q)) * M;
  }
  void project(Vec& y) const;
  PathSample make_sample(double s, const Vec& y) const;
  void record(double s, const Vec& y);
  void add_event(EventKind kind, double s, const Vec& y, std::map<std::string, double> data = {});
  void horizon_tail(const Vec& y, double r_h, int sign_r);
};

void Integrator::project(Vec& y) const {
  const double r = y[iR], th = y[iTh];
  if (!sys_.frozen) {
    const double R = potential_R(k_, I_, r);
    const double P = potential_P(k_, I_, r);
    const double Rs = P * P + std::abs(Delta(k_, r)) * sys_.K;
    if (R > 0 && y[iPr] * y[iPr] > 1e-6 * Rs) y[iPr] = std::copysign(std::sqrt(R), y[iPr]);
  }
  const double s = std::sin(th);
  if (I_.L != 0.0 && std::abs(s) <= kAxisSinTol) return;
  const double Th = potential_Theta(k_, I_, th);
  const double Ds = sys_.D_over_s2(s);
  const double Ts = sys_.K + Ds * Ds * s * s;
  if (Th > 0 && y[iPt] * y[iPt] > 1e-6 * Ts) y[iPt] = std::copysign(std::sqrt(Th), y[iPt]);
}

PathSample Integrator::make_sample(double s_aff, const Vec& y) const {
  const double a = k_.a(), M = k_.M();
  const double r = y[iR], th = y[iTh];
  const double s = std::sin(th), c = std::cos(th);
  const double rr = r * r + a * a * c * c;
  const double Dl = Delta(k_, r);
  const double P = potential_P(k_, I_, r);
  const double Ds = sys_.D_over_s2(s);
  const double Dth = I_.L - a * I_.E * s * s;
  PathSample ps;
  ps.affine = s_aff;
  ps.block = block_;
  ps.tstar = y[iTs];
  ps.phistar = y[iPs];
  ps.p_r = y[iPr];
  ps.p_theta = y[iPt];
  const double x = tortoise_x(k_, r), lam = tortoise_lambda(k_, r);
  ps.star_t = y[iSt];
  ps.star_phi = y[iSp];
  if (block_ != Region::II) {
    const double wp = std::abs(P + y[iPr]), wm = std::abs(P - y[iPr]);
    if (std::isnan(y[iSt]) || (!std::isnan(y[iTs]) && wp <= wm)) {
      ps.x = {y[iTs] - x, r, th, y[iPs] - lam};
    } else {
      ps.x = {y[iSt] + x, r, th, y[iSp] + lam};
    }
  } else {
    ps.x = {y[iTs] - x, r, th, y[iPs] - lam};
  }
  ps.v = {kNaN, y[iPr] / rr, y[iPt] / rr, kNaN};
  if (std::abs(Dl) > 1e-14 * M * M) {
    ps.v(0) = (a * Dth + (r * r + a * a) * P / Dl) / rr;
    ps.v(3) = (Ds + a * P / Dl) / rr;
  }
  const double R = potential_R(k_, I_, r);
  ps.radial_residual = std::abs(y[iPr] * y[iPr] - R) / (1 + std::abs(R));
  const double Krec = y[iPt] * y[iPt] + Ds * Ds * s * s;
  const double Kscale = std::max({std::abs(sys_.K), I_.E * I_.E * M * M, I_.L * I_.L, std::abs(I_.Q), 1e-300});
  ps.K_drift = std::abs(Krec - sys_.K) / Kscale;
  const RecoveredIntegrals rec = recover_integrals(k_, I_, r, th, y[iPr], y[iPt], sys_.frozen);
  const double ELs = std::max({std::abs(I_.E), std::abs(I_.L) / M, 1e-300});
  ps.E_drift = std::abs(rec.E - I_.E) / ELs;
  ps.L_drift = std::abs(rec.L - I_.L) / (ELs * M);
  ps.null_drift = rec.null_norm;
  return ps;
}

void Integrator::record(double s, const Vec& y) {
  const PathSample ps = make_sample(s, y);
  auto upd = [](double& m, double v) {
    if (!std::isnan(v)) m = std::max(m, v);
  };
  upd(path_.max_E_drift, ps.E_drift);
  upd(path_.max_L_drift, ps.L_drift);
  upd(path_.max_K_drift, ps.K_drift);
  upd(path_.max_null_drift, ps.null_drift);
  upd(path_.max_radial_residual, ps.radial_residual);
  if (cfg_.store_samples) path_.samples.push_back(ps);
}

void Integrator::add_event(EventKind kind, double s, const Vec& y,
                           std::map<std::string, double> data) {
  PathEvent e;
  e.kind = kind;
  e.affine = s;
  e.r = y[iR];
  e.theta = y[iTh];
  e.data = std::move(data);
  path_.events.push_back(std::move(e));
}

void Integrator::horizon_tail(const Vec& yend, double r_h, int sign_r) {
  const double a = k_.a();
  const double r_o = (r_h == k_.r_plus()) ? k_.r_minus() : k_.r_plus();
  const double sigma = yend[iR] > r_h ? 1.0 : -1.0;
  const double P_end = potential_P(k_, I_, yend[iR]);
  HorizonTail tail;
  tail.r_h = r_h;
  tail.block = block_;
  tail.tstar_regular = block_ == Region::II || std::abs(P_end + yend[iPr]) <= std::abs(P_end - yend[iPr]);

  // R expanded about r_h, so that it stays resolved once |r - r_h| drops
  // below the spacing of doubles near r_h (crossing-sphere approaches,
  // where R vanishes on the horizon).
  const RadialQuartic q = radial_quartic(k_, I_);
  double P_h = potential_P(k_, I_, r_h);
  if (std::abs(P_h) <= 1e-13 * (std::abs(I_.E) * (r_h * r_h + a * a) + std::abs(a * I_.L))) P_h = 0.0;
  const double b0 = P_h * P_h, b1 = q.derivative(r_h), b2 = q.second_derivative(r_h) / 2,
               b3 = 4 * q.c4 * r_h + q.c3, b4 = q.c4;

  using Z = Eigen::Matrix<double, 6, 1>;  // theta, p_theta, t*, phi*, *t, *phi
  auto rhs = [&](double ell, const Z& z, bool& ok) {
    Z dz = Z::Zero();
    const double d = sigma * std::exp(ell);
    const double r = r_h + d;
    const double R = std::max((((b4 * d + b3) * d + b2) * d + b1) * d + b0, 0.0);
    const double pr = sign_r * std::sqrt(R);
    if (pr == 0.0) {
      ok = false;
      return dz;
    }
    const double F = d / pr;
    const double th = z[0], s = std::sin(th);
    const double P = P_h + I_.E * d * (2 * r_h + d);
    const double Dth = I_.L - a * I_.E * s * s;
    const double Ds = sys_.D_over_s2(s);
    const double ro = r - r_o;
    dz[0] = z[1] * F;
    dz[1] = potential_Theta_prime(k_, I_, th) / 2 * F;
    dz[2] = (a * Dth * d + (r * r + a * a) * (P + pr) / ro) / pr;
    dz[3] = (Ds * d + a * (P + pr) / ro) / pr;
    dz[4] = (a * Dth * d + (r * r + a * a) * (P - pr) / ro) / pr;
    dz[5] = (Ds * d + a * (P - pr) / ro) / pr;
    return dz;
  };
  auto sample = [&](double ell, const Z& z) {
    const double r = r_h + sigma * std::exp(ell);
    TailSample ts;
    ts.log_distance = ell;
    ts.theta = z[0];
    ts.tstar = z[2];
    ts.phistar = z[3];
    ts.star_t = z[4];
    ts.star_phi = z[5];
    const double x = tortoise_x_log(k_, r, r_h, ell);
    ts.t_bl = (tail.tstar_regular && !std::isnan(z[2])) || std::isnan(z[4]) ? z[2] - x : z[4] + x;
    return ts;
  };

  Z z;
  z << yend[iTh], yend[iPt], yend[iTs], yend[iPs], yend[iSt], yend[iSp];
  double ell = std::log(std::abs(yend[iR] - r_h));
  double ell_end = ell - cfg_.tail_span;
  if (r_h == 0.0) ell_end = std::max(ell_end, -700.0);
  const double h = -std::abs(cfg_.tail_step);
  tail.samples.push_back(sample(ell, z));
  int n = 0;
  bool ok = true;
  while (ell > ell_end && ok) {
    const Z k1 = rhs(ell, z, ok);
    const Z k2 = rhs(ell + h / 2, z + h / 2 * k1, ok);
    const Z k3 = rhs(ell + h / 2, z + h / 2 * k2, ok);
    const Z k4 = rhs(ell + h, z + h * k3, ok);
    if (!ok) break;
    z += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    ell += h;
    if (++n % 10 == 0) tail.samples.push_back(sample(ell, z));
  }
  if (n % 10 != 0) tail.samples.push_back(sample(ell, z));
  path_.tail = std::move(tail);
}

GeodesicPath Integrator::run(const GeodesicState& init) {
  const double M = k_.M(), a = k_.a();
  if (init.sign_r != 1 && init.sign_r != -1) throw DomainError("sign_r must be +1 or -1");
  if (init.sign_theta != 1 && init.sign_theta != -1) throw DomainError("sign_theta must be +1 or -1");
  const SpacetimePoint& p = init.point;
  const double r0 = p.x(1), th0 = p.x(2);
  if (p.chart == Chart::BL_I) {
    if (!(r0 > k_.r_plus())) throw DomainError("BL_I start needs r > r+");
    block_ = Region::I;
  } else if (p.chart == Chart::BL_II) {
    if (!(r0 > k_.r_minus() && r0 < k_.r_plus())) throw DomainError("BL_II start needs r- < r < r+");
    block_ = Region::II;
  } else {
    throw DomainError("integrate starts from a BL_I or BL_II point");
  }
  path_.integrals = I_;

  const RadialQuartic q = radial_quartic(k_, I_);
  const double R0 = q(r0);
  const double P0 = potential_P(k_, I_, r0);
  if (R0 < -1e-10 * (P0 * P0 + std::abs(Delta(k_, r0)) * sys_.K)) throw ForbiddenRegion("R(r) < 0 at the start");
  const double Th0 = potential_Theta(k_, I_, th0);
  const double s0 = std::sin(th0);
  const double Ds0 = sys_.D_over_s2(s0);
  if (Th0 < -1e-10 * (std::abs(sys_.K) + Ds0 * Ds0 * s0 * s0)) throw ForbiddenRegion("Theta(theta) < 0 at the start");

  const RootAnalysis ra = radial_roots(k_, I_);
  for (const auto& rt : ra.roots)
    if (rt.multiplicity >= 2) {
      double_roots_.push_back(rt.r);
      if (std::abs(r0 - rt.r) <= 1e-7 * std::max(M, rt.r) && std::abs(R0) <= kDoubleRootTol * q.scale(r0))
        sys_.frozen = true;
    }
  path_.spherical = sys_.frozen;

  Vec y;
  y[iR] = r0;
  y[iTh] = th0;
  y[iPr] = sys_.frozen ? 0.0 : init.sign_r * std::sqrt(std::max(R0, 0.0));
  y[iPt] = init.sign_theta * std::sqrt(std::max(Th0, 0.0));
  const double x0 = tortoise_x(k_, r0), l0 = tortoise_lambda(k_, r0);
  y[iTs] = p.x(0) + x0;
  y[iPs] = p.x(3) + l0;
  y[iSt] = p.x(0) - x0;
  y[iSp] = p.x(3) - l0;

  double s = init.affine;
  const double s_end = init.affine + cfg_.max_affine;
  Vec f = sys_(y);
  record(s, y);

  Vec scale;
  scale << M, 1.0, pscale(), pscale(), M, 1.0, M, 1.0;
  for (int i = 0; i < 8; ++i)
    if (!std::isnan(y[i])) scale[i] = std::max(scale[i], std::abs(y[i]));

  double h = 1e-3 * std::max(M, 1e-3 * r0) * r0 * r0 / std::max(pscale(), 1e-300);
  h = std::min(h, cfg_.max_affine);
  const double standoff = cfg_.horizon_standoff * M;

  static const double c2 = 1. / 5, c3 = 3. / 10, c4 = 4. / 5, c5 = 8. / 9;
  static const double a21 = 1. / 5, a31 = 3. / 40, a32 = 9. / 40, a41 = 44. / 45, a42 = -56. / 15,
                      a43 = 32. / 9, a51 = 19372. / 6561, a52 = -25360. / 2187,
                      a53 = 64448. / 6561, a54 = -212. / 729, a61 = 9017. / 3168,
                      a62 = -355. / 33, a63 = 46732. / 5247, a64 = 49. / 176,
                      a65 = -5103. / 18656, b1 = 35. / 384, b3 = 500. / 1113, b4 = 125. / 192,
                      b5 = -2187. / 6784, b6 = 11. / 84, e1 = 71. / 57600, e3 = -71. / 16695,
                      e4 = 71. / 1920, e5 = -17253. / 339200, e6 = 22. / 525, e7 = -1. / 40;
  (void)c2; (void)c3; (void)c4; (void)c5;

  while (true) {
    if (s >= s_end) {
      add_event(EventKind::Incomplete, s, y);
      path_.termination = EventKind::Incomplete;
      break;
    }
    if (path_.steps >= cfg_.max_steps) {
      add_event(EventKind::Incomplete, s, y, {{"max_steps", 1.0}});
      path_.termination = EventKind::Incomplete;
      break;
    }
    h = std::min(h, s_end - s);
    if (h <= 1e-14 * std::max(1.0, std::abs(s)) && s_end - s > h)
      throw IntegrationError("step-size underflow at r = " + std::to_string(y[iR]));

    const Vec k1 = f;
    const Vec k2 = sys_(y + h * (a21 * k1));
    const Vec k3 = sys_(y + h * (a31 * k1 + a32 * k2));
    const Vec k4 = sys_(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vec k5 = sys_(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vec k6 = sys_(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    Vec yn = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Vec k7 = sys_(yn);
    const Vec err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    const bool quad_ok = std::abs(Delta(k_, y[iR])) > 1e-2 * M * M &&
                         std::abs(Delta(k_, yn[iR])) > 1e-2 * M * M;
    double en = 0;
    for (int i = 0; i < 8; ++i) {
      if (i >= iTs && !quad_ok) continue;
      if (i >= iTs && std::isnan(y[i])) continue;
      const double tol = cfg_.atol * scale[i] + cfg_.rtol * std::max(std::abs(y[i]), std::abs(yn[i]));
      const double e = std::abs(err[i]) / tol;
      if (std::isnan(e)) {
        en = std::numeric_limits<double>::infinity();
        break;
      }
      en = std::max(en, e);
    }
    if (!(en <= 1.0)) {
      h *= std::isfinite(en) ? std::max(0.2, 0.9 * std::pow(en, -0.2)) : 0.2;
      continue;
    }
    // Neither time is resolved across a step that leaves M_II and turns back
    // towards r+, or that turns while one time is dropped; shorten such steps
    // so the turn falls just inside the end, where the dropped time is rebuilt.
    if (!sys_.frozen && y[iPr] != 0.0 && (y[iPr] < 0) != (yn[iPr] < 0)) {
      const Step pre{s, s + h, y, yn, f, k7};
      const double ut = pre.locate(iPr, 0.0);
      if (block_ == Region::II && cfg_.continue_through_horizon && y[iR] < k_.r_plus() &&
          pre.comp(iR, ut) > k_.r_plus()) {
        h *= 0.5 * (pre.locate(iR, k_.r_plus(), ut) + ut);
        continue;
      }
      if (std::isnan(y[iTs]) != std::isnan(y[iSt]) && ut < 0.9) {
        h *= ut + 0.05;
        continue;
      }
    }

    ++path_.steps;
    Step st{s, s + h, y, yn, f, k7};
    const double fac = en == 0 ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(en, -0.2)));

    // Polar axis: L = 0 orbits pass straight through; reflect back into [0, pi].
    if (I_.L == 0.0 && (yn[iTh] < 0 || yn[iTh] > M_PI)) {
      const double edge = yn[iTh] < 0 ? 0.0 : M_PI;
      const double u = st.locate(iTh, edge);
      add_event(EventKind::AxisApproach, s + u * h, st.at(u));
      yn[iTh] = 2 * edge - yn[iTh];
      yn[iPt] = -yn[iPt];
      yn[iPs] += M_PI;
      yn[iSp] += M_PI;
    }
    project(yn);
    Vec fn = sys_(yn);

    double u_turn = -1, r_turn = 0;
    if (!sys_.frozen && y[iPr] != 0.0 && ((y[iPr] < 0) != (yn[iPr] < 0) || yn[iPr] == 0.0)) {
      u_turn = st.locate(iPr, 0.0);
      const Vec yt = st.at(u_turn);
      r_turn = yt[iR];
      add_event(EventKind::TurningPointR, s + u_turn * h, yt);
    }
    // Fraction of the step at which r first passes `level`, also when it
    // passes and comes back within one step; negative when it does not.
    auto first_passage = [&](double level, bool below) {
      const double r0s = y[iR];
      if (below ? r0s <= level : r0s >= level) return -1.0;
      if (below ? yn[iR] < level : yn[iR] > level) {
        if (u_turn < 0 || (below ? r_turn >= level : r_turn <= level)) return st.locate(iR, level);
      }
      if (u_turn >= 0 && (below ? r_turn < level : r_turn > level)) return st.locate(iR, level, u_turn);
      return -1.0;
    };
    if (y[iPt] != 0.0 && ((y[iPt] < 0) != (yn[iPt] < 0) || yn[iPt] == 0.0)) {
      const double u = st.locate(iPt, 0.0);
      add_event(EventKind::TurningPointTheta, s + u * h, st.at(u));
    }

    auto finish_at = [&](double u, double level, EventKind kind, std::map<std::string, double> data) {
      Vec ye = st.at(u);
      ye[iR] = level;
      project(ye);
      // The time that diverges on the horizon is not resolved by the step's
      // interpolant; take it from the regular one instead.
      if (kind == EventKind::HorizonCrossing) {
        const double rh = std::abs(level - k_.r_plus()) < std::abs(level - k_.r_minus()) ? k_.r_plus() : k_.r_minus();
        const double Ph = potential_P(k_, I_, rh) * ye[iPr];
        const double x = tortoise_x(k_, level), lam = tortoise_lambda(k_, level);
        if (Ph < 0 && !std::isnan(ye[iTs])) {
          ye[iSt] = ye[iTs] - 2 * x;
          ye[iSp] = ye[iPs] - 2 * lam;
        } else if (Ph > 0 && !std::isnan(ye[iSt])) {
          ye[iTs] = ye[iSt] + 2 * x;
          ye[iPs] = ye[iSp] + 2 * lam;
        }
      }
      // Events located past the end point belong to the discarded part of the step.
      while (!path_.events.empty() && path_.events.back().affine > s + u * h) path_.events.pop_back();
      record(s + u * h, ye);
      add_event(kind, s + u * h, ye, std::move(data));
      path_.termination = kind;
      return ye;
    };

    const double rn = yn[iR];
    if (block_ == Region::I || block_ == Region::IPrime) {
      if (rn > cfg_.r_max * M && yn[iPr] > 0) {
        finish_at(st.locate(iR, cfg_.r_max * M), cfg_.r_max * M, EventKind::Escape, {});
        path_.end_radius = cfg_.r_max * M;
        break;
      }
      const double Pp = potential_P(k_, I_, k_.r_plus());
      // M_I' is only reached backwards from M_II; its other horizon leads
      // out of the Kruskal domain, so there is no continuation from it.
      const bool tstar_regular = Pp > 0 && block_ == Region::I;
      const double uc = first_passage(k_.r_plus(), true);
      if (cfg_.continue_through_horizon && tstar_regular && uc >= 0) {
        Vec ye = st.at(uc);
        ye[iR] = k_.r_plus();
        add_event(EventKind::HorizonCrossing, s + uc * h, ye,
                  {{"radius", k_.r_plus()}, {"tstar", ye[iTs]}, {"continued", 1.0}});
        block_ = Region::II;
        yn[iSt] = yn[iSp] = kNaN;
      } else if (!(cfg_.continue_through_horizon && tstar_regular)) {
        const double level = k_.r_plus() + standoff;
        const double u = first_passage(level, true);
        if (u >= 0) {
          const Vec ye = finish_at(u, level, EventKind::HorizonCrossing,
                                   {{"radius", k_.r_plus()}, {"P_at_horizon", Pp}});
          path_.end_radius = k_.r_plus();
          if (cfg_.horizon_tail) horizon_tail(ye, k_.r_plus(), -1);
          break;
        }
      }
    }
    if (block_ == Region::II) {
      // For a = 0 the inner boundary is the singularity r = 0, where r' grows
      // like r^(-3/2); the tail in ln r is regular there, so switch earlier.
      const double lo = k_.r_minus() + (a == 0.0 ? std::max(standoff, 1e-3 * M) : standoff);
      const double hi = k_.r_plus() - standoff;
      const double ul = first_passage(lo, true);
      if (ul >= 0) {
        const Vec ye = finish_at(ul, lo, EventKind::HorizonCrossing,
                                 {{"radius", k_.r_minus()}, {"P_at_horizon", potential_P(k_, I_, k_.r_minus())}});
        path_.end_radius = k_.r_minus();
        if (cfg_.horizon_tail) horizon_tail(ye, k_.r_minus(), -1);
        break;
      }
      // Leaving M_II backwards in time. t* stays finite where P(r+) + p_r = 0
      // (into M_I), *t where P(r+) - p_r = 0 (into M_I').
      const double Pp = potential_P(k_, I_, k_.r_plus());
      const double uc = cfg_.continue_through_horizon && Pp != 0.0 ? first_passage(k_.r_plus(), false) : -1.0;
      const double uh = uc >= 0 ? -1.0 : first_passage(hi, false);
      if (uc >= 0) {
        Vec ye = st.at(uc);
        ye[iR] = k_.r_plus();
        const bool into_I = Pp < 0;
        add_event(EventKind::HorizonCrossing, s + uc * h, ye,
                  {{"radius", k_.r_plus()}, {into_I ? "tstar" : "star_t", ye[into_I ? iTs : iSt]}, {"continued", 1.0}});
        block_ = into_I ? Region::I : Region::IPrime;
        if (into_I)
          yn[iSt] = yn[iSp] = kNaN;
        else
          yn[iTs] = yn[iPs] = kNaN;
      } else if (uh >= 0) {
        const Vec ye = finish_at(uh, hi, EventKind::HorizonCrossing,
                                 {{"radius", k_.r_plus()}, {"P_at_horizon", potential_P(k_, I_, k_.r_plus())}});
        path_.end_radius = k_.r_plus();
        if (cfg_.horizon_tail) horizon_tail(ye, k_.r_plus(), 1);
        break;
      }
    }
    if (!sys_.frozen) {
      bool hit = false;
      for (double rd : double_roots_) {
        if (std::abs(rn - rd) < cfg_.double_root_delta * M) {
          s += h;
          y = yn;
          record(s, y);
          add_event(EventKind::DoubleRootApproach, s, y, {{"radius", rd}});
          path_.termination = EventKind::DoubleRootApproach;
          path_.end_radius = rd;
          hit = true;
          break;
        }
      }
      if (hit) break;
    }

    s += h;
    y = yn;
    f = fn;
    // A time dropped at a horizon crossing is needed again if the path turns
    // towards the other horizon of its new block; rebuild it from the one kept.
    const bool clear = std::min(std::abs(y[iR] - k_.r_plus()), std::abs(y[iR] - k_.r_minus())) > 1e-3 * M;
    if (std::isnan(y[iTs]) != std::isnan(y[iSt]) && (clear || u_turn >= 0) && y[iR] != k_.r_plus()) {
      const double x = tortoise_x(k_, y[iR]), lam = tortoise_lambda(k_, y[iR]);
      if (std::isnan(y[iSt])) {
        y[iSt] = y[iTs] - 2 * x;
        y[iSp] = y[iPs] - 2 * lam;
      } else {
        y[iTs] = y[iSt] + 2 * x;
        y[iPs] = y[iSp] + 2 * lam;
      }
    }
    for (int i = 0; i < 8; ++i)
      if (!std::isnan(y[i])) scale[i] = std::max(scale[i], std::abs(y[i]));
    record(s, y);
    h *= fac;
  }
  return std::move(path_);
}

}  // namespace

GeodesicPath integrate(const Kerr& k, const GeodesicState& initial, const FirstIntegrals& I,
                       const IntegrateConfig& cfg) {
  Integrator it(k, I, cfg);
  return it.run(initial);
}

}  // namespace kerrkit
