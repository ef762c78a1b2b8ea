#pragma once

#include "orthant/geometry.hpp"
#include "orthant/json_io.hpp"
#include "orthant/mode.hpp"
#include "orthant/models.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>

namespace orthant {

// B_2(center_S0, r0) x [0, r1]^{d1}, sampled for constant estimation.
struct RegionSpec {
  CoordinateSplit split;
  double r0 = 0.0;
  double r1 = 0.0;
  std::size_t grid = 256;
  std::uint64_t seed = 0;

  static RegionSpec from_good_set(const GoodSet& gs, std::size_t grid, std::uint64_t seed);
  bool contains(const Vector& theta) const;
};

// Point i of the region grid (point 0 is the center). Ball draws are uniform
// in the ball and then clipped to the orthant.
Vector region_point(const RegionSpec& region, std::size_t i);

enum class NormMethod { power_with_fallback, dense };

struct OperatorNorm {
  double value = 0.0;
  std::size_t iterations = 0;
  bool used_dense = false;
};

// Largest |eigenvalue| of a symmetric matrix. Power iteration with a Rayleigh
// quotient estimate; if it has not settled within max_iter iterations and the
// matrix is at most dense_limit wide, a dense eigensolve is used instead.
OperatorNorm operator_norm(const Matrix& h, NormMethod method = NormMethod::power_with_fallback,
                           std::size_t max_iter = 50, double tol = 1e-8,
                           std::size_t dense_limit = 200);

// Multiplier for the boundary branch of the Poincare bound.
enum class PoincareFactor { deterministic = 4, random_gibbs = 16 };

struct PoincareInputs {
  double c_S0 = 0.0;
  double C_S1 = 0.0;
  double s2 = 0.0;
  double delta0 = 0.0;
  double delta1 = 0.0;
  std::size_t d0 = 0;
  std::size_t d1 = 0;
  std::size_t n = 1;
  double prior_osc = 0.0;
  PoincareFactor factor = PoincareFactor::deterministic;
};

struct AssumptionReport {
  std::optional<double> c_S0_hat;  // absent when S0 is empty
  std::optional<double> C_S1_hat;  // absent when S1 is empty
  double s2_hat = 0.0;
  double osc_bound = 0.0;
  double C_PI_bound = 0.0;
  std::optional<double> zeta_hat;
  double prior_osc = 0.0;
  double delta0 = 0.0;
  double delta1 = 0.0;
  std::size_t d0 = 0;
  std::size_t d1 = 0;
  std::size_t n = 0;
  std::size_t grid = 0;
  std::uint64_t seed = 0;
  std::size_t dense_fallbacks = 0;
};

// Monte Carlo estimates over the region grid: c_S0 is the smallest
// lambda_min(-H_S0S0), C_S1 the smallest -d_j ell_n over j in S1, s2 the
// largest ||H||_op. Deltas are recovered from the radii and n.
AssumptionReport estimate_constants(const LikelihoodModel& model, const RegionSpec& region,
                                    NormMethod method = NormMethod::power_with_fallback,
                                    PoincareFactor factor = PoincareFactor::deterministic);

struct Decomposition {
  double ell = 0.0;
  double f = 0.0;  // ell(theta_S0, theta_hat_S1)
  double g = 0.0;  // sum_{j in S1} d_j ell(theta_hat) theta_j
  double B = 0.0;  // ell - f - g
};

Decomposition decompose_likelihood(const LikelihoodModel& model, const CoordinateSplit& split,
                                   const Vector& theta);
// Reuses a precomputed gradient at the mode.
Decomposition decompose_likelihood(const LikelihoodModel& model, const CoordinateSplit& split,
                                   const Vector& grad_at_mode, const Vector& theta);

// 2 s2 (delta0 delta1 sqrt(d0 d1) / n^{3/2} + delta1^2 d1 / n^2).
double osc_bound(double s2, double delta0, double delta1, std::size_t d0, std::size_t d1,
                 std::size_t n);

// max(1/(n c_S0), F exp(prior_osc) / (n^2 C_S1^2)) * exp(n * osc_bound). A
// branch whose block is empty is dropped.
double poincare_bound(const PoincareInputs& in);

// ceil(cbar4 d0 d1 log^2((d0 + d1) / eps)).
std::size_t concentration_sample_size(std::size_t d0, std::size_t d1, double eps,
                                      double cbar4 = 1.0);

struct WellSeparation {
  double zeta_hat = 0.0;  // heuristic: a minimum over samples, not a certified bound
  std::size_t n_samples = 0;
  std::size_t n_attempts = 0;
  bool separated() const { return zeta_hat > 0.0; }
};

// min over uniform box draws outside the region of ell(theta_hat) - ell(theta).
WellSeparation check_well_separation(const LikelihoodModel& model, const ModeResult& mode,
                                     const RegionSpec& region, const Vector& box_upper,
                                     std::size_t n_outside_samples, std::uint64_t seed,
                                     Vector box_lower = {});

void to_json(Json& j, const AssumptionReport& r);
void to_json(Json& j, const WellSeparation& w);

}  // namespace orthant
