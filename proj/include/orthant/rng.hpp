#pragma once

#include "orthant/types.hpp"

#include <cstdint>
#include <initializer_list>
#include <random>

namespace orthant {

// SplitMix64 finalizer; used to derive independent stream keys.
std::uint64_t splitmix64(std::uint64_t x);

// Key derived from a master seed and a path of stream indices, e.g.
// derive_seed(seed, {trial, kStreamData}). Distinct paths give unrelated keys.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

// Stream tags used by the library so different consumers of one master seed
// never share a generator.
enum StreamTag : std::uint64_t {
  kStreamData = 0x64617461,
  kStreamInit = 0x696e6974,
  kStreamChain = 0x63686169,
  kStreamAnneal = 0x616e6e65,
  kStreamGrid = 0x67726964,
};

// mt19937_64 engine keyed by derive_seed, with standard normal and uniform
// helpers. The distributions are the libstdc++ ones, so streams are bitwise
// reproducible within one toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t key) : engine_(key) {}
  Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> path)
      : engine_(derive_seed(seed, path)) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform_(engine_); }
  Vector normal_vector(std::size_t d);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace orthant
