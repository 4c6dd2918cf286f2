#include "kerrkit/roots.hpp"

#include <algorithm>
#include <cmath>

namespace kerrkit {

namespace {

double eval(const std::vector<double>& c, double x) {
  double v = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
  return v;
}

double magnitude(const std::vector<double>& c, double x) {
  double v = 0, p = 1;
  for (double ci : c) {
    v += std::abs(ci) * p;
    p *= std::abs(x);
  }
  return v;
}

std::vector<double> derivative(const std::vector<double>& c) {
  std::vector<double> d;
  for (std::size_t i = 1; i < c.size(); ++i) d.push_back(double(i) * c[i]);
  return d;
}

std::vector<double> trimmed(std::vector<double> c) {
  while (!c.empty() && c.back() == 0.0) c.pop_back();
  return c;
}

// Root of a polynomial known to change sign on [a, b] and be monotone there.
double bracketed_root(const std::vector<double>& c, double a, double b) {
  const std::vector<double> d = derivative(c);
  double fa = eval(c, a);
  double x = 0.5 * (a + b);
  for (int it = 0; it < 200; ++it) {
    const double fx = eval(c, x);
    if (fx == 0.0) return x;
    if ((fx < 0) == (fa < 0)) {
      a = x;
      fa = fx;
    } else {
      b = x;
    }
    const double dx = eval(d, x);
    double xn = dx != 0.0 ? x - fx / dx : 0.5 * (a + b);
    if (!(xn > a && xn < b)) xn = 0.5 * (a + b);
    if (std::abs(xn - x) <= 1e-16 * std::max(1.0, std::abs(x)) || b - a <= 4e-16 * std::max(1.0, std::abs(x)))
      return xn;
    x = xn;
  }
  return x;
}

}  // namespace

int RootAnalysis::total_multiplicity() const {
  int m = 0;
  for (const auto& r : roots) m += r.multiplicity;
  return m;
}

std::vector<RootInfo> real_polynomial_roots(const std::vector<double>& coeffs, double lo,
                                            double hi, double rel_tol) {
  const std::vector<double> c = trimmed(coeffs);
  std::vector<RootInfo> out;
  if (c.size() <= 1) return out;
  if (c.size() == 2) {
    const double x = -c[0] / c[1];
    if (x >= lo && x <= hi) out.push_back({x, 1});
    return out;
  }
  std::vector<RootInfo> crit = real_polynomial_roots(derivative(c), lo, hi, rel_tol);

  // Tangencies: critical points where the polynomial itself vanishes.
  std::vector<RootInfo> tangent;
  for (const auto& cp : crit) {
    if (std::abs(eval(c, cp.r)) <= rel_tol * magnitude(c, cp.r))
      tangent.push_back({cp.r, cp.multiplicity + 1});
  }

  std::vector<double> knots{lo};
  for (const auto& cp : crit)
    if (cp.r > lo && cp.r < hi) knots.push_back(cp.r);
  knots.push_back(hi);
  std::vector<RootInfo> simple;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double a = knots[i], b = knots[i + 1];
    const double fa = eval(c, a), fb = eval(c, b);
    if (fa == 0.0) {
      simple.push_back({a, 1});
      continue;
    }
    if ((fa < 0) != (fb < 0) && fb != 0.0) simple.push_back({bracketed_root(c, a, b), 1});
    if (fb == 0.0 && i + 2 == knots.size()) simple.push_back({b, 1});
  }

  // A simple root lying on top of a tangency is the same root seen twice
  // (rounding can split a double root into two nearby sign changes).
  for (const auto& s : simple) {
    bool merged = false;
    for (const auto& t : tangent) {
      const double gap = std::abs(s.r - t.r);
      if (gap <= 1e-6 * std::max(1.0, std::abs(t.r))) merged = true;
    }
    if (!merged) out.push_back(s);
  }
  for (const auto& t : tangent) out.push_back(t);
  std::sort(out.begin(), out.end(), [](const RootInfo& x, const RootInfo& y) { return x.r < y.r; });
  // Merge duplicates from adjacent knots.
  std::vector<RootInfo> uniq;
  for (const auto& r : out) {
    if (!uniq.empty() && std::abs(uniq.back().r - r.r) <= 1e-12 * std::max(1.0, std::abs(r.r))) {
      uniq.back().multiplicity = std::max(uniq.back().multiplicity, r.multiplicity);
      continue;
    }
    uniq.push_back(r);
  }
  return uniq;
}

RootAnalysis radial_roots(const Kerr& k, const FirstIntegrals& I) {
  const RadialQuartic q = radial_quartic(k, I);
  std::vector<double> c = trimmed({q.c0, q.c1, q.c2, q.c3, q.c4});
  RootAnalysis ra;
  ra.degree = c.empty() ? 0 : int(c.size()) - 1;
  if (c.empty()) {
    ra.identically_zero = true;
    return ra;
  }
  const double lo = k.r_minus();
  double bound = 0;
  for (std::size_t i = 0; i + 1 < c.size(); ++i)
    bound = std::max(bound, std::abs(c[i] / c.back()));
  const double hi = std::max(lo, 0.0) + 1.0 + bound;
  ra.roots = real_polynomial_roots(c, lo, hi, kDoubleRootTol);

  auto sgn = [&](double r) {
    const double v = q(r);
    if (std::abs(v) <= kDoubleRootTol * q.scale(r)) return 0;
    return v > 0 ? 1 : -1;
  };
  ra.sign_at_rplus = sgn(k.r_plus());
  ra.sign_at_rminus = sgn(k.r_minus());

  for (const auto& cp : real_polynomial_roots(derivative(c), lo, hi, kDoubleRootTol)) {
    const double v = std::abs(q(cp.r)), s = q.scale(cp.r);
    if (v > kDoubleRootTol * s && v <= kNearDegenerateTol * s) {
      ra.near_degenerate = true;
      ra.near_degenerate_r = cp.r;
    }
  }
  return ra;
}

}  // namespace kerrkit
