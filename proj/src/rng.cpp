#include "orthant/rng.hpp"

#include "orthant/errors.hpp"

#include <cmath>

namespace orthant {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t key = splitmix64(seed);
  for (std::uint64_t p : path) key = splitmix64(key ^ splitmix64(p + 0x632be59bd9b4e019ULL));
  return key;
}

Vector Rng::normal_vector(std::size_t d) {
  Vector v(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal();
  return v;
}

void require_size(std::size_t actual, std::size_t expected, const std::string& what) {
  if (actual != expected) {
    throw ShapeError(what + ": expected size " + std::to_string(expected) + ", got " +
                     std::to_string(actual));
  }
}

bool in_orthant(const Vector& theta) {
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    if (!(theta[i] >= 0.0) || !std::isfinite(theta[i])) return false;
  }
  return true;
}

}  // namespace orthant
