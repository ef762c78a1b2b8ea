#pragma once

#include "orthant/json_io.hpp"
#include "orthant/types.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace orthant {

inline constexpr double kDefaultModeTolerance = 1e-8;
// Coordinates of the mode at or below this value are treated as boundary ones.
inline constexpr double kDefaultSplitThreshold = 10.0 * kDefaultModeTolerance;

struct CoordinateSplit {
  std::vector<std::size_t> regular;   // S0
  std::vector<std::size_t> boundary;  // S1
  Vector center;                      // the mode with S1 entries snapped to 0

  std::size_t d0() const { return regular.size(); }
  std::size_t d1() const { return boundary.size(); }
  std::size_t dim() const { return regular.size() + boundary.size(); }
  bool is_boundary(std::size_t j) const;
};

CoordinateSplit split_coordinates(const Vector& theta_hat,
                                  double tau = kDefaultSplitThreshold);

// Constants entering the default radii multipliers.
struct DeltaDefaults {
  double cbar0 = 1.0;
  double cbar1 = 1.0;
  double eps = 0.05;
};

// delta0 = cbar0 * log(1/eps).
double default_delta0(const DeltaDefaults& c = {});
// delta1 = cbar1 * log(d1/eps); d1 = 0 is treated as 1.
double default_delta1(std::size_t d1, const DeltaDefaults& c = {});

// B_2(center_S0, r0) x [0, r1]^{d1}, intersected with the orthant.
struct GoodSet {
  Vector center;
  CoordinateSplit split;
  double delta0 = 0.0;
  double delta1 = 0.0;
  std::size_t n = 1;
  double r0 = 0.0;  // 0 when S0 is empty
  double r1 = 0.0;
  std::vector<std::string> warnings;

  std::size_t dim() const { return static_cast<std::size_t>(center.size()); }
};

// With S0 empty, delta0 must be left unset and the set is the box alone.
GoodSet build_good_set(const CoordinateSplit& split, std::optional<double> delta0,
                       double delta1, std::size_t n);
// Default deltas from the given constants.
GoodSet build_good_set(const CoordinateSplit& split, std::size_t n,
                       const DeltaDefaults& c = {});

// Closed-set membership with exact comparisons.
bool contains(const GoodSet& gs, const Vector& theta);

Vector project_orthant(const Vector& x);
void project_orthant_inplace(Vector& x);

// Euclidean projection onto the good set. Each S1 coordinate is clamped to
// [0, r1]; the S0 block goes to the nearest point of ball and orthant, found
// by a one-dimensional search on the ball multiplier.
Vector project_good_set(const GoodSet& gs, const Vector& x);
void project_good_set_inplace(const GoodSet& gs, Vector& x);

void to_json(Json& j, const CoordinateSplit& s);
void to_json(Json& j, const GoodSet& gs);

}  // namespace orthant
