#include "kerrkit/charts.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "kerrkit/errors.hpp"
#include "kerrkit/functions.hpp"

namespace kerrkit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class Block { I, II, IPrime, IIPrime, Horizon };

// Every chart is funnelled through this representation. Fields are filled
// only where they are defined and exact; derived charts are built from the
// most direct source available so that finite-difference Jacobians stay clean.
struct Canonical {
  double r = 0, theta = 0;
  Block block = Block::I;
  bool has_bl = false;
  double t = 0, phi = 0;
  bool has_ks = false;
  double tstar = 0, phistar = 0;
  bool has_sk = false;
  double st = 0, sphi = 0;
  bool has_kbl = false;
  double U = 0, V = 0, phis = 0;
};

Block block_of(Chart c) {
  switch (c) {
    case Chart::BL_I: return Block::I;
    case Chart::BL_II: return Block::II;
    case Chart::BL_IPrime: return Block::IPrime;
    case Chart::BL_IIPrime: return Block::IIPrime;
    default: return Block::Horizon;
  }
}

Chart chart_of(Block b) {
  switch (b) {
    case Block::I: return Chart::BL_I;
    case Block::II: return Chart::BL_II;
    case Block::IPrime: return Chart::BL_IPrime;
    case Block::IIPrime: return Chart::BL_IIPrime;
    default: break;
  }
  throw DomainError("horizon points have no Boyer-Lindquist coordinates");
}

[[noreturn]] void outside(const SpacetimePoint& p, Chart to) {
  std::ostringstream os;
  os.precision(17);
  os << "point (" << p.x.transpose() << ") in " << chart_name(p.chart)
     << " is outside the domain of " << chart_name(to);
  throw DomainError(os.str());
}

// Exponential embeddings of each BL block into the Kruskal chart.
void bl_to_kbl(const Kerr& k, Canonical& c) {
  const double kap = k.h.kappa_plus;
  const double x = tortoise_x(k, c.r);
  const double Um = std::exp(-kap * (c.t - x));
  const double Vm = std::exp(kap * (c.t + x));
  switch (c.block) {
    case Block::I: c.U = Um; c.V = Vm; break;
    case Block::II: c.U = -Um; c.V = Vm; break;
    case Block::IPrime: c.U = -Um; c.V = -Vm; break;
    case Block::IIPrime: c.U = Um; c.V = -Vm; break;
    default: break;
  }
  c.phis = c.phi - k.h.Omega_H * c.t;
  c.has_kbl = true;
}

void ks_to_kbl(const Kerr& k, Canonical& c) {
  const double kap = k.h.kappa_plus;
  c.V = std::exp(kap * c.tstar);
  c.U = (c.r - k.h.r_plus) / (c.V * kruskal_G(k, c.r));
  c.phis = c.phistar - k.h.Omega_H * c.tstar + azimuth_shift_h(k, c.r);
  c.has_kbl = true;
}

void sk_to_kbl(const Kerr& k, Canonical& c) {
  const double kap = k.h.kappa_plus;
  c.U = std::exp(-kap * c.st);
  c.V = (c.r - k.h.r_plus) / (c.U * kruskal_G(k, c.r));
  c.phis = c.sphi - k.h.Omega_H * c.st - azimuth_shift_h(k, c.r);
  c.has_kbl = true;
}

void ensure_kbl(const Kerr& k, Canonical& c) {
  if (c.has_kbl) return;
  if (c.has_ks) return ks_to_kbl(k, c);
  if (c.has_sk) return sk_to_kbl(k, c);
  if (c.has_bl) return bl_to_kbl(k, c);
}

Canonical from_kerr_star(const Kerr& k, double tstar, double r, double theta,
                         double phistar) {
  Canonical c;
  c.r = r;
  c.theta = theta;
  c.has_ks = true;
  c.tstar = tstar;
  c.phistar = phistar;
  if (r == k.h.r_plus) {
    c.block = Block::Horizon;
    ks_to_kbl(k, c);
    return c;
  }
  c.block = r > k.h.r_plus ? Block::I : Block::II;
  c.has_bl = true;
  c.t = tstar - tortoise_x(k, r);
  c.phi = phistar - tortoise_lambda(k, r);
  return c;
}

Canonical from_star_kerr(const Kerr& k, double st, double r, double theta,
                         double sphi) {
  Canonical c;
  c.r = r;
  c.theta = theta;
  c.has_sk = true;
  c.st = st;
  c.sphi = sphi;
  if (r == k.h.r_plus) {
    c.block = Block::Horizon;
    sk_to_kbl(k, c);
    return c;
  }
  c.block = r > k.h.r_plus ? Block::I : Block::IIPrime;
  c.has_bl = true;
  c.t = st + tortoise_x(k, r);
  c.phi = sphi + tortoise_lambda(k, r);
  return c;
}

Canonical from_kbl(const Kerr& k, double U, double V, double theta, double phis) {
  Canonical c;
  c.theta = theta;
  c.has_kbl = true;
  c.U = U;
  c.V = V;
  c.phis = phis;
  const double kap = k.h.kappa_plus;
  const double Om = k.h.Omega_H;
  c.r = kruskal_radius(k, U * V);
  if (U == 0.0 || V == 0.0) {
    c.block = Block::Horizon;
    c.r = k.h.r_plus;
  } else if (U > 0 && V > 0) {
    c.block = Block::I;
  } else if (U < 0 && V > 0) {
    c.block = Block::II;
  } else if (U < 0 && V < 0) {
    c.block = Block::IPrime;
  } else {
    c.block = Block::IIPrime;
  }
  if (c.block != Block::Horizon) {
    c.has_bl = true;
    c.t = std::log(std::abs(V) / std::abs(U)) / (2.0 * kap);
    c.phi = phis + Om * c.t;
  }
  if (V > 0) {
    c.has_ks = true;
    c.tstar = std::log(V) / kap;
    c.phistar = phis + Om * c.tstar - azimuth_shift_h(k, c.r);
  }
  if (U > 0) {
    c.has_sk = true;
    c.st = -std::log(U) / kap;
    c.sphi = phis + Om * c.st + azimuth_shift_h(k, c.r);
  }
  return c;
}

Canonical to_canonical(const Kerr& k, const SpacetimePoint& p, double eps0) {
  require_domain(k, p, eps0);
  const auto& x = p.x;
  switch (p.chart) {
    case Chart::BL_I:
    case Chart::BL_II:
    case Chart::BL_IPrime:
    case Chart::BL_IIPrime: {
      Canonical c;
      c.block = block_of(p.chart);
      c.has_bl = true;
      c.t = x[0];
      c.r = x[1];
      c.theta = x[2];
      c.phi = x[3];
      return c;
    }
    case Chart::KerrStar: return from_kerr_star(k, x[0], x[1], x[2], x[3]);
    case Chart::StarKerr: return from_star_kerr(k, x[0], x[1], x[2], x[3]);
    case Chart::KBL: return from_kbl(k, x[0], x[1], x[2], x[3]);
    case Chart::ConformalKerrStar:
    case Chart::ConformalStarKerr: {
      if (x[1] <= 0.0) {
        throw DomainError("conformal points with w <= 0 lie on or beyond null infinity");
      }
      const double r = 1.0 / x[1];
      return p.chart == Chart::ConformalKerrStar ? from_kerr_star(k, x[0], r, x[2], x[3])
                                                 : from_star_kerr(k, x[0], r, x[2], x[3]);
    }
  }
  throw DomainError("unknown chart");
}

void complete_from_bl(const Kerr& k, Canonical& c) {
  if (!c.has_bl) return;
  if (!c.has_ks && (c.block == Block::I || c.block == Block::II)) {
    c.has_ks = true;
    c.tstar = c.t + tortoise_x(k, c.r);
    c.phistar = c.phi + tortoise_lambda(k, c.r);
  }
  if (!c.has_sk && (c.block == Block::I || c.block == Block::IIPrime)) {
    c.has_sk = true;
    c.st = c.t - tortoise_x(k, c.r);
    c.sphi = c.phi - tortoise_lambda(k, c.r);
  }
}

Eigen::Vector4d from_canonical(const Kerr& k, Canonical& c, const SpacetimePoint& src,
                               Chart to) {
  complete_from_bl(k, c);
  switch (to) {
    case Chart::BL_I:
    case Chart::BL_II:
    case Chart::BL_IPrime:
    case Chart::BL_IIPrime:
      if (!c.has_bl || chart_of(c.block) != to) outside(src, to);
      return {c.t, c.r, c.theta, c.phi};
    case Chart::KerrStar:
      if (!c.has_ks) outside(src, to);
      return {c.tstar, c.r, c.theta, c.phistar};
    case Chart::StarKerr:
      if (!c.has_sk) outside(src, to);
      return {c.st, c.r, c.theta, c.sphi};
    case Chart::KBL:
      ensure_kbl(k, c);
      if (!c.has_kbl) outside(src, to);
      return {c.U, c.V, c.theta, c.phis};
    case Chart::ConformalKerrStar:
      if (!c.has_ks || c.r < k.h.r_plus) outside(src, to);
      return {c.tstar, 1.0 / c.r, c.theta, c.phistar};
    case Chart::ConformalStarKerr:
      if (!c.has_sk || c.r < k.h.r_plus) outside(src, to);
      return {c.st, 1.0 / c.r, c.theta, c.sphi};
  }
  outside(src, to);
}

}  // namespace

const char* chart_name(Chart c) {
  switch (c) {
    case Chart::BL_I: return "BL_I";
    case Chart::BL_II: return "BL_II";
    case Chart::BL_IPrime: return "BL_IPrime";
    case Chart::BL_IIPrime: return "BL_IIPrime";
    case Chart::KerrStar: return "KerrStar";
    case Chart::StarKerr: return "StarKerr";
    case Chart::KBL: return "KBL";
    case Chart::ConformalKerrStar: return "ConformalKerrStar";
    case Chart::ConformalStarKerr: return "ConformalStarKerr";
  }
  return "?";
}

std::optional<Chart> chart_from_name(const std::string& name) {
  for (Chart c : {Chart::BL_I, Chart::BL_II, Chart::BL_IPrime, Chart::BL_IIPrime,
                  Chart::KerrStar, Chart::StarKerr, Chart::KBL,
                  Chart::ConformalKerrStar, Chart::ConformalStarKerr}) {
    if (name == chart_name(c)) return c;
  }
  return std::nullopt;
}

std::array<const char*, 4> coordinate_names(Chart c) {
  switch (c) {
    case Chart::KerrStar: return {"t*", "r", "theta", "phi*"};
    case Chart::StarKerr: return {"*t", "r", "theta", "*phi"};
    case Chart::KBL: return {"U", "V", "theta", "phi#"};
    case Chart::ConformalKerrStar: return {"t*", "w", "theta", "phi*"};
    case Chart::ConformalStarKerr: return {"*t", "w", "theta", "*phi"};
    default: return {"t", "r", "theta", "phi"};
  }
}

bool is_boyer_lindquist(Chart c) {
  return c == Chart::BL_I || c == Chart::BL_II || c == Chart::BL_IPrime ||
         c == Chart::BL_IIPrime;
}

bool is_conformal(Chart c) {
  return c == Chart::ConformalKerrStar || c == Chart::ConformalStarKerr;
}

double reduce_azimuth(double phi) {
  double r = std::fmod(phi, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

bool in_domain(const Kerr& k, const SpacetimePoint& p, double epsilon0) {
  const auto& x = p.x;
  if (!x.allFinite()) return false;
  if (x[2] < 0.0 || x[2] > std::numbers::pi) return false;
  const double rp = k.h.r_plus, rm = k.h.r_minus;
  switch (p.chart) {
    case Chart::BL_I:
    case Chart::BL_IPrime: return x[1] > rp;
    case Chart::BL_II:
    case Chart::BL_IIPrime: return x[1] > rm && x[1] < rp;
    case Chart::KerrStar:
    case Chart::StarKerr: return x[1] > rm;
    case Chart::KBL: return true;
    case Chart::ConformalKerrStar:
    case Chart::ConformalStarKerr: return x[1] > -epsilon0 && x[1] <= 1.0 / rp;
  }
  return false;
}

void require_domain(const Kerr& k, const SpacetimePoint& p, double epsilon0) {
  if (!in_domain(k, p, epsilon0)) outside(p, p.chart);
}

double kruskal_radius(const Kerr& k, double UV) {
  const double rp = k.h.r_plus, rm = k.h.r_minus, kap = k.h.kappa_plus;
  if (UV == 0.0) return rp;
  const double sgn = UV > 0 ? 1.0 : -1.0;
  const double target = std::log(std::abs(UV));
  // Unknown nu = ln|r - r+|; psi(nu) = 2 kappa x(r) - ln|UV| is increasing in nu.
  const double nu_max = sgn > 0 ? std::numeric_limits<double>::infinity()
                                : std::log(rp - rm);
  auto psi = [&](double nu, double& dpsi) {
    const double e = std::exp(nu);
    const double r = rp + sgn * e;
    double val = nu + 2.0 * kap * r - target;
    double d = 1.0 + sgn * e * 2.0 * kap;
    if (k.p.a != 0.0) {
      val -= (rm / rp) * std::log(r - rm);
      d -= sgn * e * (rm / rp) / (r - rm);
    }
    dpsi = d;
    return val;
  };
  if (sgn < 0) {
    // Schwarzschild interior ends at r = 0 where psi stays finite.
    double d;
    if (k.p.a == 0.0 && psi(std::log(rp) - 1e-15, d) <= 0.0) {
      std::ostringstream os;
      os.precision(17);
      os << "no radius in (r-, r+) solves (r-r+)/(UV)=G(r) for UV=" << UV;
      throw RootBracketError(os.str());
    }
  }
  // Bracket in nu.
  double d;
  double nu = target + std::log(kruskal_G(k, rp));
  if (sgn < 0 && nu >= nu_max) nu = nu_max - 1.0;
  double lo = nu, hi = nu;
  double step = 1.0;
  while (psi(lo, d) > 0.0) {
    lo -= step;
    step *= 2.0;
    if (step > 1e6) throw RootBracketError("Kruskal radius bracket failed (low side)");
  }
  step = 1.0;
  while (psi(hi, d) < 0.0) {
    hi += step;
    step *= 2.0;
    if (sgn < 0 && hi >= nu_max) {
      hi = nu_max;
      break;
    }
    if (step > 1e6) throw RootBracketError("Kruskal radius bracket failed (high side)");
  }
  for (int it = 0; it < 200; ++it) {
    const double f = psi(nu, d);
    if (std::abs(f) < 1e-15) break;
    if (f < 0) lo = nu; else hi = nu;
    double next = nu - f / d;
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    if (next == nu) break;
    nu = next;
    if (hi - lo < 1e-16 * std::max(1.0, std::abs(nu))) break;
  }
  return rp + sgn * std::exp(nu);
}

double radius(const Kerr& k, const SpacetimePoint& p) {
  switch (p.chart) {
    case Chart::KBL: return kruskal_radius(k, p.x[0] * p.x[1]);
    case Chart::ConformalKerrStar:
    case Chart::ConformalStarKerr:
      if (p.x[1] <= 0) return std::numeric_limits<double>::infinity();
      return 1.0 / p.x[1];
    default: return p.x[1];
  }
}

SpacetimePoint chart_map(const Kerr& k, const SpacetimePoint& from, Chart to,
                         const ChartMapOptions& opts) {
  if (from.chart == to) {
    require_domain(k, from, opts.epsilon0);
    SpacetimePoint out = from;
    if (opts.reduce_azimuth) out.x[3] = reduce_azimuth(out.x[3]);
    return out;
  }
  Canonical c = to_canonical(k, from, opts.epsilon0);
  SpacetimePoint out(to, from_canonical(k, c, from, to));
  if (opts.reduce_azimuth) out.x[3] = reduce_azimuth(out.x[3]);
  return out;
}

SpacetimePoint wedge_reflect(const SpacetimePoint& p) {
  if (p.chart != Chart::KBL) throw DomainError("wedge reflection acts on KBL points");
  return {Chart::KBL, -p.x[0], -p.x[1], p.x[2], p.x[3]};
}

Eigen::Matrix4d chart_jacobian(const Kerr& k, const SpacetimePoint& from, Chart to,
                               double step, const ChartMapOptions& opts) {
  ChartMapOptions o = opts;
  o.reduce_azimuth = false;
  const Eigen::Vector4d centre = chart_map(k, from, to, o).x;
  Eigen::Matrix4d J;
  // Ridders: centred differences over shrinking steps, extrapolated to h = 0
  // in a Neville tableau; the entry with the smallest error estimate wins.
  constexpr int kTab = 10;
  constexpr double kShrink = 1.4, kShrink2 = kShrink * kShrink, kSafe = 2.0;
  for (int j = 0; j < 4; ++j) {
    auto eval = [&](double offset) {
      SpacetimePoint q = from;
      q.x[j] += offset;
      Eigen::Vector4d d = chart_map(k, q, to, o).x - centre;
      d[3] = std::remainder(d[3], kTwoPi);
      return d;
    };
    auto central = [&](double h) -> Eigen::Vector4d { return (eval(h) - eval(-h)) / (2 * h); };
    double h = step * std::max(std::abs(from.x[j]), 1e-2);
    Eigen::Vector4d first;
    for (;;) {
      try {
        first = central(h);
        break;
      } catch (const Error&) {
        // the probe left the domain; start closer in
        h *= 0.1;
        if (h < 1e-10 * std::max(std::abs(from.x[j]), 1e-2)) throw;
      }
    }
    std::array<std::array<Eigen::Vector4d, kTab>, kTab> a;
    a[0][0] = first;
    Eigen::Vector4d best = first;
    double err = std::numeric_limits<double>::infinity();
    for (int i = 1; i < kTab; ++i) {
      h /= kShrink;
      a[0][i] = central(h);
      double fac = kShrink2;
      for (int m = 1; m <= i; ++m) {
        a[m][i] = (a[m - 1][i] * fac - a[m - 1][i - 1]) / (fac - 1);
        fac *= kShrink2;
        const double e = std::max((a[m][i] - a[m - 1][i]).cwiseAbs().maxCoeff(),
                                  (a[m][i] - a[m - 1][i - 1]).cwiseAbs().maxCoeff());
        if (e <= err) {
          err = e;
          best = a[m][i];
        }
      }
      if ((a[i][i] - a[i - 1][i - 1]).cwiseAbs().maxCoeff() >= kSafe * err) break;
    }
    J.col(j) = best;
  }
  return J;
}

}  // namespace kerrkit
