#include "orthant/prior.hpp"

#include "orthant/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace orthant {

CoordinatePrior CoordinatePrior::flat() { return CoordinatePrior{}; }

CoordinatePrior CoordinatePrior::exponential(double rate) {
  if (!(rate > 0.0)) throw ConfigError("exponential prior rate must be positive");
  CoordinatePrior p;
  p.name = "exponential";
  const double log_rate = std::log(rate);
  p.log_density = [=](double t) { return log_rate - rate * t; };
  p.derivative = [=](double) { return -rate; };
  p.lipschitz = rate;
  return p;
}

Prior::Prior(std::vector<CoordinatePrior> factors) : factors_(std::move(factors)) {}

Prior Prior::exponential(std::size_t d, double rate) {
  return Prior(std::vector<CoordinatePrior>(d, CoordinatePrior::exponential(rate)));
}

bool Prior::is_flat() const {
  return std::all_of(factors_.begin(), factors_.end(),
                     [](const CoordinatePrior& f) { return !f.log_density; });
}

double Prior::log_density(const Vector& theta) const {
  if (factors_.empty()) return 0.0;
  require_size(static_cast<std::size_t>(theta.size()), factors_.size(), "prior");
  double s = 0.0;
  for (std::size_t j = 0; j < factors_.size(); ++j) s += factors_[j].value(theta[j]);
  return s;
}

Vector Prior::gradient(const Vector& theta) const {
  Vector g = Vector::Zero(theta.size());
  if (factors_.empty()) return g;
  require_size(static_cast<std::size_t>(theta.size()), factors_.size(), "prior gradient");
  for (std::size_t j = 0; j < factors_.size(); ++j) g[j] = factors_[j].slope(theta[j]);
  return g;
}

double Prior::oscillation(std::size_t j, double lo, double hi) const {
  if (factors_.empty()) return 0.0;
  const CoordinatePrior& f = factors_.at(j);
  if (!f.log_density) return 0.0;
  constexpr int kPoints = 257;
  double mn = std::numeric_limits<double>::infinity();
  double mx = -mn;
  for (int i = 0; i < kPoints; ++i) {
    const double t = lo + (hi - lo) * i / (kPoints - 1);
    const double v = f.value(t);
    mn = std::min(mn, v);
    mx = std::max(mx, v);
  }
  return mx - mn;
}

double Prior::max_oscillation(const std::vector<std::size_t>& coords, double lo,
                              double hi) const {
  double m = 0.0;
  for (std::size_t j : coords) m = std::max(m, oscillation(j, lo, hi));
  return m;
}

bool Prior::check_concavity(Rng& rng, std::size_t triples, double upper) const {
  for (const CoordinatePrior& f : factors_) {
    if (!f.log_density) continue;
    for (std::size_t k = 0; k < triples; ++k) {
      const double a = rng.uniform(0.0, upper);
      const double b = rng.uniform(0.0, upper);
      const double mid = f.value(0.5 * (a + b));
      const double chord = 0.5 * (f.value(a) + f.value(b));
      if (mid < chord - 1e-12 * (1.0 + std::abs(chord))) return false;
    }
  }
  return true;
}

std::string Prior::describe() const {
  if (is_flat()) return "flat";
  std::string s;
  for (std::size_t j = 0; j < factors_.size(); ++j) {
    if (j) s += ",";
    s += factors_[j].name;
  }
  return s;
}

}  // namespace orthant
