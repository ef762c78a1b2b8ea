#pragma once

#include "orthant/geometry.hpp"
#include "orthant/json_io.hpp"
#include "orthant/models.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>

namespace orthant {

enum class ModeObjective {
  likelihood,  // ell_n
  posterior,   // log pi + n ell_n
};

struct ModeOptions {
  double tol = kDefaultModeTolerance;
  std::size_t max_iter = 10000;
  double armijo = 1e-4;
  double backtrack = 0.5;
  ModeObjective objective = ModeObjective::likelihood;
  // Optional upper bounds; the feasible set becomes [0, upper].
  std::optional<Vector> upper;
};

struct ModeResult {
  Vector theta_hat;
  double objective = 0.0;
  double grad_norm = 0.0;  // ||x - P(x + grad)||
  std::size_t iterations = 0;
  bool converged = false;
  std::size_t restarts_used = 0;
};

// Projected gradient ascent with Barzilai-Borwein trial steps and Armijo
// backtracking. Accepted iterates never decrease the objective.
ModeResult find_mode_local(const LikelihoodModel& model, const Vector& init,
                           const ModeOptions& options = {});

struct AnnealOptions {
  std::size_t n_restarts = 10;
  std::size_t n_proposals = 2000;
  double initial_temperature = 1.0;
  double cooling = 0.995;
  double proposal_scale = 0.1;  // fraction of the box width per coordinate
  Vector lower;                 // empty means 0
  Vector upper;
};

// Multi-start simulated annealing inside the box, then find_mode_local from the
// best point found. Restarts run concurrently with streams keyed by
// (seed, restart index), so the result depends only on the seed.
ModeResult find_mode_global(const LikelihoodModel& model, const AnnealOptions& anneal,
                            std::uint64_t seed, ModeOptions local = {});

void to_json(Json& j, const ModeResult& r);

}  // namespace orthant
