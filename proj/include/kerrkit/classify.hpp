#pragma once

#include <string>

#include "kerrkit/geodesics.hpp"
#include "kerrkit/integrate.hpp"
#include "kerrkit/params.hpp"

namespace kerrkit {

enum class EndpointKind {
  Horizon,
  Infinity,
  DoubleRootAsymptote,
  SphericalOrbit,
  CrossingSphere,
  Undetermined,
};

const char* endpoint_name(EndpointKind k);

struct Endpoint {
  EndpointKind kind = EndpointKind::Undetermined;
  double r = 0;
  bool inner = false;  // r- rather than r+ for horizons and crossing spheres
};

bool same_endpoint(const Endpoint& x, const Endpoint& y, double rel_tol = 1e-4);

struct GeodesicType {
  Endpoint start;
  Endpoint end;
  Region block = Region::I;
  bool ambiguous = false;
  std::string reason;  // why the classification is ambiguous or undetermined

  // Table notation: "[r+->inf[", "]inf->r+]", "[r0]", "[S(r+)->r-]", ...
  std::string label() const;
};

bool same_type(const GeodesicType& x, const GeodesicType& y);

// Classification from the real roots of R, the signs of R(r+-), the starting
// radius and the direction of travel (sign_r of the state, which is taken as
// the future direction).
GeodesicType classify(const Kerr& k, const FirstIntegrals& I, const GeodesicState& start);

// The same from integrating forward and backward from the start.
GeodesicType classify_by_integration(const Kerr& k, const FirstIntegrals& I,
                                     const GeodesicState& start, const IntegrateConfig& cfg = {});

}  // namespace kerrkit
