#pragma once

#include <vector>

#include "kerrkit/geodesics.hpp"
#include "kerrkit/params.hpp"

namespace kerrkit {

// Relative tolerance (against RadialQuartic::scale) below which a tangency is a
// multiple root, and the wider band in which the decision is reported as
// near-degenerate.
constexpr double kDoubleRootTol = 1e-9;
constexpr double kNearDegenerateTol = 1e-6;

struct RootInfo {
  double r = 0;
  int multiplicity = 1;
};

struct RootAnalysis {
  std::vector<RootInfo> roots;  // on [r-, infinity), ascending
  int sign_at_rplus = 0;        // sign of R(r+), 0 within tolerance
  int sign_at_rminus = 0;
  int degree = 0;
  bool identically_zero = false;
  // A critical point of R with |R| between the two tolerances: a tangency that
  // cannot be told apart from a near miss.
  bool near_degenerate = false;
  double near_degenerate_r = 0;

  int total_multiplicity() const;
};

// Real roots of sum c[i] x^i on [lo, hi], isolated on the monotone pieces
// between critical points and polished by safeguarded Newton. Tangencies are
// reported with their multiplicity.
std::vector<RootInfo> real_polynomial_roots(const std::vector<double>& c, double lo,
                                            double hi, double rel_tol = kDoubleRootTol);

RootAnalysis radial_roots(const Kerr& k, const FirstIntegrals& I);

}  // namespace kerrkit
