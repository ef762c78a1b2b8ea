#pragma once

#include "orthant/models.hpp"

#include <cstdint>
#include <optional>

namespace orthant {

// Shape parameters for drawing a synthetic dataset around a true parameter.
struct SimulationSpec {
  ModelKind kind = ModelKind::logistic;
  std::size_t n = 100;
  Vector theta_star;
  Prior prior;

  // Strength of the boundary misspecification applied to coordinates with
  // theta_star_j == 0. With a value of 0 the data are drawn exactly from the
  // model at theta_star, so the population gradient vanishes at the boundary
  // coordinates. A positive value makes that gradient strictly negative:
  //   logistic: X_ij <- Z_ij - shift * (Y_i - c'(X_i^T theta_star))
  //   poisson:  A_ij <- A_ij * exp(-shift * r_i), r_i the Pearson residual
  //   gmm:      the generating mean coordinate is -shift * sd instead of 0
  // For logistic and poisson theta_star stays the exact maximizer of the
  // population log-likelihood over the orthant.
  double boundary_shift = 0.0;

  // Poisson: exposure T and an optional sensitivity matrix (n x d). When no
  // matrix is given, entries are drawn Uniform(0, 1).
  double exposure = 1.0;
  std::optional<RowMatrix> sensitivity;

  // GMM: known weights and covariances; theta_star holds the k stacked means.
  Vector weights;
  std::vector<Matrix> covariances;
};

// Deterministic for a fixed (spec, seed).
ModelInstance simulate(const SimulationSpec& spec, std::uint64_t seed);

}  // namespace orthant
