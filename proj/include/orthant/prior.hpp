#pragma once

#include "orthant/rng.hpp"
#include "orthant/types.hpp"

#include <functional>
#include <string>
#include <vector>

namespace orthant {

// One factor log pi_j of a product prior on [0, inf).
struct CoordinatePrior {
  std::string name = "flat";
  std::function<double(double)> log_density;  // empty means identically 0
  std::function<double(double)> derivative;   // empty means identically 0
  double lipschitz = 0.0;                      // Lipschitz constant of log_density

  static CoordinatePrior flat();
  // log pi(t) = log(rate) - rate * t.
  static CoordinatePrior exponential(double rate);

  double value(double t) const { return log_density ? log_density(t) : 0.0; }
  double slope(double t) const { return derivative ? derivative(t) : 0.0; }
};

// Log-concave product prior. An empty factor list is the flat improper prior
// of any dimension; otherwise there is one factor per coordinate.
class Prior {
 public:
  Prior() = default;
  explicit Prior(std::vector<CoordinatePrior> factors);

  static Prior flat() { return Prior(); }
  static Prior exponential(std::size_t d, double rate);

  bool is_flat() const;
  std::size_t size() const { return factors_.size(); }
  const CoordinatePrior& factor(std::size_t j) const { return factors_.at(j); }

  double log_density(const Vector& theta) const;
  Vector gradient(const Vector& theta) const;

  // osc_{[lo,hi]} log pi_j, evaluated on a 257-point grid.
  double oscillation(std::size_t j, double lo, double hi) const;
  // max_j osc_{[lo,hi]} log pi_j over the given coordinates.
  double max_oscillation(const std::vector<std::size_t>& coords, double lo, double hi) const;

  // Midpoint concavity on `triples` random pairs per factor inside [0, upper].
  bool check_concavity(Rng& rng, std::size_t triples = 200, double upper = 10.0) const;

  std::string describe() const;

 private:
  std::vector<CoordinatePrior> factors_;
};

}  // namespace orthant
