#include "orthant/diagnostics.hpp"

#include "orthant/errors.hpp"
#include "parallel_guard.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace orthant {

namespace {

using Index = Eigen::Index;

void check_level(double level) {
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("credible level must lie in (0, 1)");
}

}  // namespace

double EssReport::median() const {
  std::vector<double> v;
  for (Index j = 0; j < per_coordinate.size(); ++j) {
    if (!std::isnan(per_coordinate[j])) v.push_back(per_coordinate[j]);
  }
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  return empirical_quantile(v, 0.5);
}

EssReport ess_report(const std::vector<const Chain*>& chains) {
  if (chains.empty()) throw ShapeError("ESS report needs at least one chain");
  const std::size_t d = chains.front()->dim();
  const std::size_t rows = chains.front()->rows();
  for (const Chain* c : chains) {
    if (c->dim() != d || c->rows() != rows) throw ShapeError("chains differ in shape");
  }
  EssReport r;
  r.n_kept = rows;
  r.n_chains = chains.size();
  r.per_coordinate.resize(static_cast<Index>(d));

  detail::ParallelErrors errors;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t j = 0; j < d; ++j) {
    errors.capture(j, [&] {
      std::vector<Vector> cols;
      for (const Chain* c : chains) cols.push_back(c->samples.col(static_cast<Index>(j)));
      try {
        r.per_coordinate[static_cast<Index>(j)] = bulk_ess(cols);
      } catch (const DegenerateChainError&) {
        r.per_coordinate[static_cast<Index>(j)] = std::numeric_limits<double>::quiet_NaN();
      }
    });
  }
  errors.rethrow();
  for (std::size_t j = 0; j < d; ++j) {
    if (std::isnan(r.per_coordinate[static_cast<Index>(j)])) r.degenerate.push_back(j);
  }
  std::vector<Vector> trace;
  for (const Chain* c : chains) trace.push_back(c->log_post);
  r.llr_ess = bulk_ess(trace);
  return r;
}

EssReport ess_report(const Chain& chain) { return ess_report(std::vector<const Chain*>{&chain}); }

double empirical_quantile(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw ShapeError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("quantile level must lie in [0, 1]");
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

Interval credible_interval(std::vector<double> samples, double level) {
  check_level(level);
  if (samples.size() < 2) throw ShapeError("credible interval needs at least two samples");
  std::sort(samples.begin(), samples.end());
  return {empirical_quantile(samples, 0.5 * (1.0 - level)),
          empirical_quantile(samples, 0.5 * (1.0 + level))};
}

Interval credible_interval(const Vector& samples, double level) {
  return credible_interval(std::vector<double>(samples.data(), samples.data() + samples.size()), level);
}

CoverageReport coverage_from_intervals(const std::vector<std::vector<Interval>>& intervals,
                                       const Vector& theta_star, double level,
                                       std::vector<bool> boundary_flags) {
  check_level(level);
  const auto d = static_cast<std::size_t>(theta_star.size());
  if (intervals.empty()) throw ShapeError("coverage needs at least one trial");
  if (boundary_flags.empty()) boundary_flags.assign(d, false);
  require_size(boundary_flags.size(), d, "boundary flags");
  CoverageReport r;
  r.n_trials = intervals.size();
  r.level = level;
  r.boundary_flags = std::move(boundary_flags);
  Vector hits = Vector::Zero(static_cast<Index>(d));
  for (const auto& trial : intervals) {
    require_size(trial.size(), d, "trial intervals");
    for (std::size_t j = 0; j < d; ++j) {
      if (trial[j].contains(theta_star[static_cast<Index>(j)])) hits[static_cast<Index>(j)] += 1.0;
    }
  }
  r.per_coordinate_coverage = hits / static_cast<double>(r.n_trials);
  return r;
}

std::vector<Interval> chain_intervals(const Chain& chain, double level) {
  std::vector<Interval> out;
  for (Index j = 0; j < chain.samples.cols(); ++j) {
    out.push_back(credible_interval(Vector(chain.samples.col(j)), level));
  }
  return out;
}

CoverageReport coverage_experiment(const std::vector<const Chain*>& trial_chains,
                                   const Vector& theta_star, double level,
                                   const CoordinateSplit& split) {
  std::vector<std::vector<Interval>> intervals;
  for (const Chain* c : trial_chains) {
    require_size(c->dim(), static_cast<std::size_t>(theta_star.size()), "chain");
    intervals.push_back(chain_intervals(*c, level));
  }
  std::vector<bool> flags(static_cast<std::size_t>(theta_star.size()), false);
  for (std::size_t j : split.boundary) flags.at(j) = true;
  return coverage_from_intervals(intervals, theta_star, level, std::move(flags));
}

Expectation estimate_expectation(const Chain& chain, const std::function<double(const Vector&)>& f) {
  if (chain.rows() == 0) throw ShapeError("expectation over an empty chain");
  Vector v(static_cast<Index>(chain.rows()));
  for (Index i = 0; i < v.size(); ++i) {
    const double y = f(chain.samples.row(i).transpose());
    if (!(y >= 0.0 && y <= 1.0)) throw RangeError("f must map into [0, 1]");
    v[i] = y;
  }
  Expectation e;
  e.estimate = v.mean();
  const double var = v.size() > 1 ? (v.array() - e.estimate).square().sum() / static_cast<double>(v.size() - 1) : 0.0;
  if (var == 0.0 || v.size() < 8) {
    e.ess = static_cast<double>(v.size());
    e.mc_stderr = std::sqrt(var / e.ess);
    return e;
  }
  e.ess = mean_ess({v});
  e.mc_stderr = std::sqrt(var / e.ess);
  return e;
}

double good_set_mass(const RowMatrix& samples, const GoodSet& gs) {
  require_size(static_cast<std::size_t>(samples.cols()), gs.dim(), "chain");
  if (samples.rows() == 0) throw ShapeError("good-set mass over an empty chain");
  std::size_t inside = 0;
  for (Index i = 0; i < samples.rows(); ++i) {
    if (contains(gs, samples.row(i).transpose())) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(samples.rows());
}

double good_set_mass(const Chain& chain, const GoodSet& gs) { return good_set_mass(chain.samples, gs); }

void to_json(Json& j, const EssReport& r) {
  Json per = Json::array();
  for (Index i = 0; i < r.per_coordinate.size(); ++i) {
    per.push_back(std::isnan(r.per_coordinate[i]) ? Json(nullptr) : Json(r.per_coordinate[i]));
  }
  const double med = r.median();
  j = Json{{"per_coordinate", per},
           {"median", std::isnan(med) ? Json(nullptr) : Json(med)},
           {"degenerate", r.degenerate},
           {"llr_ess", r.llr_ess},
           {"n_kept", r.n_kept},
           {"n_chains", r.n_chains}};
}

void to_json(Json& j, const CoverageReport& r) {
  j = Json{{"per_coordinate_coverage", to_json_array(r.per_coordinate_coverage)},
           {"n_trials", r.n_trials},
           {"level", r.level},
           {"boundary_flags", r.boundary_flags}};
}

void to_json(Json& j, const SpectralGapResult& r) {
  j = Json{{"gap", r.gap},
           {"grid_points", r.grid_points},
           {"domain", {r.a, r.b}},
           {"implied_C_PI", r.implied_C_PI}};
}

}  // namespace orthant
