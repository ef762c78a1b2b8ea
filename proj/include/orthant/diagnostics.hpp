#pragma once

#include "orthant/ess.hpp"
#include "orthant/geometry.hpp"
#include "orthant/json_io.hpp"
#include "orthant/sampler.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace orthant {

struct EssReport {
  Vector per_coordinate;  // NaN where every kept draw of the coordinate is equal
  std::vector<std::size_t> degenerate;
  double llr_ess = 0.0;  // bulk ESS of the log-posterior trace
  std::size_t n_kept = 0;
  std::size_t n_chains = 0;

  // Median over the non-degenerate coordinates.
  double median() const;
};

// All chains must share dimension and length. A constant log-posterior trace
// raises DegenerateChainError.
EssReport ess_report(const std::vector<const Chain*>& chains);
EssReport ess_report(const Chain& chain);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return lo <= v && v <= hi; }
};

// Linear interpolation at index p (n - 1) of the sorted samples.
double empirical_quantile(const std::vector<double>& sorted, double p);

// Equal-tailed [Q((1 - level)/2), Q((1 + level)/2)].
Interval credible_interval(std::vector<double> samples, double level);
Interval credible_interval(const Vector& samples, double level);

struct CoverageReport {
  Vector per_coordinate_coverage;
  std::size_t n_trials = 0;
  double level = 0.95;
  std::vector<bool> boundary_flags;
};

// intervals[t][j] is the interval of coordinate j in trial t.
CoverageReport coverage_from_intervals(const std::vector<std::vector<Interval>>& intervals,
                                       const Vector& theta_star, double level,
                                       std::vector<bool> boundary_flags);

std::vector<Interval> chain_intervals(const Chain& chain, double level);

CoverageReport coverage_experiment(const std::vector<const Chain*>& trial_chains,
                                   const Vector& theta_star, double level,
                                   const CoordinateSplit& split);

struct Expectation {
  double estimate = 0.0;
  double mc_stderr = 0.0;
  double ess = 0.0;
};

// Mean of f over the kept draws with standard error sqrt(var / ESS_f). f must
// map into [0, 1]; anything else raises RangeError.
Expectation estimate_expectation(const Chain& chain, const std::function<double(const Vector&)>& f);

// Fraction of kept draws inside the good set.
double good_set_mass(const Chain& chain, const GoodSet& gs);
double good_set_mass(const RowMatrix& samples, const GoodSet& gs);

struct SpectralGapResult {
  double gap = 0.0;
  std::size_t grid_points = 0;
  double a = 0.0;
  double b = 0.0;
  double implied_C_PI = 0.0;
};

// Smallest non-zero eigenvalue of -L, L f = f'' + (log mu)' f' with reflecting
// ends, from a cell-centred finite-volume discretization on grid_points
// cells. The weighted problem is symmetrized before the tridiagonal eigensolve.
SpectralGapResult spectral_gap_1d(const std::function<double(double)>& log_density, double a,
                                  double b, std::size_t grid_points);

void to_json(Json& j, const EssReport& r);
void to_json(Json& j, const CoverageReport& r);
void to_json(Json& j, const SpectralGapResult& r);

}  // namespace orthant
