#pragma once

#include "orthant/models.hpp"
#include "orthant/rng.hpp"
#include "orthant/simulate.hpp"

#include <cstdint>
#include <vector>

namespace fixture {

using namespace orthant;

inline ModelInstance logistic(std::size_t d, std::size_t n, std::uint64_t seed, double shift = 0.0) {
  SimulationSpec s;
  s.kind = ModelKind::logistic;
  s.n = n;
  s.theta_star = Vector::Constant(static_cast<Eigen::Index>(d), 0.5);
  s.theta_star[static_cast<Eigen::Index>(d - 1)] = 0.0;
  s.boundary_shift = shift;
  return simulate(s, seed);
}

inline ModelInstance poisson(std::size_t d, std::size_t n, std::uint64_t seed, double shift = 0.0) {
  SimulationSpec s;
  s.kind = ModelKind::poisson;
  s.n = n;
  s.theta_star = Vector::Ones(static_cast<Eigen::Index>(d));
  s.theta_star[static_cast<Eigen::Index>(d - 1)] = 0.0;
  s.exposure = 2.0;
  s.boundary_shift = shift;
  return simulate(s, seed);
}

// k components in p dimensions with identity-scaled covariances.
inline ModelInstance gmm(std::size_t k, std::size_t p, std::size_t n, std::uint64_t seed) {
  SimulationSpec s;
  s.kind = ModelKind::gmm;
  s.n = n;
  s.theta_star.resize(static_cast<Eigen::Index>(k * p));
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t j = 0; j < p; ++j) s.theta_star[static_cast<Eigen::Index>(c * p + j)] = 1.0 + 2.0 * c;
  s.weights = Vector::Constant(static_cast<Eigen::Index>(k), 1.0 / static_cast<double>(k));
  for (std::size_t c = 0; c < k; ++c) {
    Matrix cov = Matrix::Identity(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
    cov *= 0.5 + 0.25 * static_cast<double>(c);
    if (p > 1) cov(0, 1) = cov(1, 0) = 0.1;
    s.covariances.push_back(cov);
  }
  return simulate(s, seed);
}

inline std::vector<ModelInstance> all_models(std::uint64_t seed) {
  std::vector<ModelInstance> out;
  out.push_back(logistic(4, 60, seed));
  out.push_back(poisson(4, 60, seed));
  out.push_back(gmm(2, 2, 60, seed));
  return out;
}

// Uniform point of [lo, hi]^d.
inline Vector interior_point(Rng& rng, std::size_t d, double lo = 0.2, double hi = 2.0) {
  Vector x(static_cast<Eigen::Index>(d));
  for (auto& v : x) v = rng.uniform(lo, hi);
  return x;
}

}  // namespace fixture
