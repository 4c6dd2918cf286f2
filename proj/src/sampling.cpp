#include "kerrkit/sampling.hpp"

#include <cmath>
#include <stdexcept>

namespace kerrkit {

namespace {
constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
}

double radical_inverse(std::uint64_t i, int base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (i > 0) {
    r += f * double(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

Halton::Halton(int dim, std::uint64_t seed) {
  if (dim < 1 || dim > int(std::size(kPrimes))) throw std::invalid_argument("Halton dimension");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  shift_.resize(dim);
  for (auto& s : shift_) s = u(rng);
}

std::vector<double> Halton::next() {
  std::vector<double> p(shift_.size());
  for (std::size_t d = 0; d < p.size(); ++d) {
    double v = radical_inverse(index_, kPrimes[d]) + shift_[d];
    p[d] = v - std::floor(v);
  }
  ++index_;
  return p;
}

}  // namespace kerrkit
