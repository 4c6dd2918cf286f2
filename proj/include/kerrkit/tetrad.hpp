#pragma once

#include <array>

#include <Eigen/Core>

#include "kerrkit/charts.hpp"
#include "kerrkit/params.hpp"

namespace kerrkit {

enum class TetradKind { Basic, FoliationAdapted, KBL, Conformal };

const char* tetrad_name(TetradKind kind);

// Components are in the coordinate basis of the chart the tetrad was built in.
// frame.col(i) is the orthonormal vector u_i: u0 = (l+n)/sqrt2,
// u1 = (l-n)/sqrt2, u2 = sqrt2 Re m, u3 = sqrt2 Im m.
struct NullTetrad {
  TetradKind kind = TetradKind::Basic;
  Chart chart = Chart::BL_I;
  Eigen::Vector4d l;
  Eigen::Vector4d n;
  Eigen::Vector4cd m;
  Eigen::Matrix4d frame;
};

// Basic and FoliationAdapted live on BL_I, KBL on the Kruskal chart and
// Conformal on ConformalKerrStar (where n and m are the rescaled c^-2 n and
// c^-1 m). Throws DomainError on a kind/chart mismatch and HorizonError at
// Delta = 0 for the Boyer-Lindquist kinds.
NullTetrad null_tetrad(const Kerr& k, const SpacetimePoint& p, TetradKind kind);

// Largest deviation among the six defining inner products
// l.l, n.n, l.n + 1, m.m, m.conj(m) - 1, l.m, n.m.
double tetrad_defect(const Eigen::Matrix4d& g, const NullTetrad& tet);

// Largest deviation of u_i.g.u_j from diag(-1, 1, 1, 1).
double frame_defect(const Eigen::Matrix4d& g, const NullTetrad& tet);

}  // namespace kerrkit
