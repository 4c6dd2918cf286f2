#pragma once

#include <vector>

#include "kerrkit/geodesics.hpp"
#include "kerrkit/geometry_checks.hpp"
#include "kerrkit/integrate.hpp"

namespace kerrkit {

struct SampledGeodesic {
  GeodesicState state;
  FirstIntegrals integrals;
  const char* family = "";
};

// Future-directed null geodesic from six uniforms in [0,1).
//  M_I:  a Boyer-Lindquist point and a direction on the celestial sphere of
//        the foliation-adapted frame.
//  M_II: a point and random integrals compatible with Theta >= 0, r decreasing.
SampledGeodesic sample_null_geodesic(const Kerr& k, Region block, const std::vector<double>& u,
                                     double r_max = 20.0);

// E = 0 geodesic started inside the ergoregion (needs a != 0).
SampledGeodesic sample_zero_energy_geodesic(const Kerr& k, const std::vector<double>& u);

}  // namespace kerrkit
