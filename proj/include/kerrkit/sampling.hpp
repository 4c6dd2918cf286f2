#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

namespace kerrkit {

// Randomly shifted Halton sequence in [0,1)^dim. The shift comes from the
// seed, so a fixed seed reproduces the same points.
class Halton {
 public:
  Halton(int dim, std::uint64_t seed);
  std::vector<double> next();
  int dim() const { return int(shift_.size()); }

 private:
  std::vector<double> shift_;
  std::uint64_t index_ = 1;
};

// Radical inverse of i in the given prime base.
double radical_inverse(std::uint64_t i, int base);

}  // namespace kerrkit
