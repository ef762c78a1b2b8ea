#include "orthant/geometry.hpp"

#include "orthant/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace orthant {

namespace {

using Index = Eigen::Index;

double s0_distance(const GoodSet& gs, const Vector& x) {
  double s = 0.0;
  for (std::size_t j : gs.split.regular) {
    const double t = x[static_cast<Index>(j)] - gs.center[static_cast<Index>(j)];
    s += t * t;
  }
  return std::sqrt(s);
}

}  // namespace

bool CoordinateSplit::is_boundary(std::size_t j) const {
  return std::binary_search(boundary.begin(), boundary.end(), j);
}

CoordinateSplit split_coordinates(const Vector& theta_hat, double tau) {
  if (!(tau > 0.0)) throw ConfigError("split threshold tau must be positive");
  if (!in_orthant(theta_hat)) throw DomainError("mode must lie in the orthant");
  CoordinateSplit s;
  s.center = theta_hat;
  for (Index j = 0; j < theta_hat.size(); ++j) {
    if (theta_hat[j] <= tau) {
      s.boundary.push_back(static_cast<std::size_t>(j));
      s.center[j] = 0.0;
    } else {
      s.regular.push_back(static_cast<std::size_t>(j));
    }
  }
  return s;
}

double default_delta0(const DeltaDefaults& c) {
  if (!(c.eps > 0.0 && c.eps < 1.0)) throw ConfigError("eps must lie in (0, 1)");
  return c.cbar0 * std::log(1.0 / c.eps);
}

double default_delta1(std::size_t d1, const DeltaDefaults& c) {
  if (!(c.eps > 0.0 && c.eps < 1.0)) throw ConfigError("eps must lie in (0, 1)");
  return c.cbar1 * std::log(static_cast<double>(std::max<std::size_t>(d1, 1)) / c.eps);
}

GoodSet build_good_set(const CoordinateSplit& split, std::optional<double> delta0,
                       double delta1, std::size_t n) {
  if (n < 1) throw ConfigError("good set needs n >= 1");
  if (!(delta1 > 0.0)) throw ConfigError("delta1 must be positive");
  if (split.d0() == 0 && delta0) {
    throw ConfigError("delta0 given but there are no regular coordinates (r0 undefined)");
  }
  if (split.d0() > 0 && !delta0) throw ConfigError("delta0 required when S0 is non-empty");
  if (delta0 && !(*delta0 > 0.0)) throw ConfigError("delta0 must be positive");

  GoodSet gs;
  gs.center = split.center;
  gs.split = split;
  gs.delta1 = delta1;
  gs.n = n;
  const double nn = static_cast<double>(n);
  gs.r1 = delta1 / nn;
  if (split.d0() > 0) {
    gs.delta0 = *delta0;
    gs.r0 = gs.delta0 * std::sqrt(static_cast<double>(split.d0()) / nn);
    double min_regular = std::numeric_limits<double>::infinity();
    for (std::size_t j : split.regular) min_regular = std::min(min_regular, split.center[static_cast<Index>(j)]);
    if (gs.r0 >= min_regular) {
      std::ostringstream msg;
      msg << "r0 = " << gs.r0 << " reaches the boundary (smallest regular mode coordinate "
          << min_regular << "); the ball is cut by the orthant";
      gs.warnings.push_back(msg.str());
    }
  }
  return gs;
}

GoodSet build_good_set(const CoordinateSplit& split, std::size_t n, const DeltaDefaults& c) {
  std::optional<double> d0;
  if (split.d0() > 0) d0 = default_delta0(c);
  return build_good_set(split, d0, default_delta1(split.d1(), c), n);
}

bool contains(const GoodSet& gs, const Vector& theta) {
  require_size(static_cast<std::size_t>(theta.size()), gs.dim(), "good set membership");
  for (Index j = 0; j < theta.size(); ++j) {
    if (!(theta[j] >= 0.0)) return false;
  }
  for (std::size_t j : gs.split.boundary) {
    if (!(theta[static_cast<Index>(j)] <= gs.r1)) return false;
  }
  return gs.split.regular.empty() || s0_distance(gs, theta) <= gs.r0;
}

void project_orthant_inplace(Vector& x) { x = x.cwiseMax(0.0); }

Vector project_orthant(const Vector& x) { return x.cwiseMax(0.0); }

void project_good_set_inplace(const GoodSet& gs, Vector& x) {
  require_size(static_cast<std::size_t>(x.size()), gs.dim(), "good set projection");
  for (std::size_t j : gs.split.boundary) {
    double& v = x[static_cast<Index>(j)];
    v = std::clamp(v, 0.0, gs.r1);
  }
  if (gs.split.regular.empty()) return;
  const Vector y = x;
  // KKT: z_j = max((y_j + lam c_j) / (1 + lam), 0) with the smallest lam >= 0
  // putting z in the ball; the distance to c is non-increasing in lam.
  auto place = [&](double lam) {
    for (std::size_t j : gs.split.regular) {
      const auto i = static_cast<Index>(j);
      x[i] = std::max((y[i] + lam * gs.center[i]) / (1.0 + lam), 0.0);
    }
    return s0_distance(gs, x);
  };
  if (place(0.0) <= gs.r0) return;
  double lo = 0.0, hi = 1.0;
  while (place(hi) > gs.r0) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (place(mid) > gs.r0 ? lo : hi) = mid;
  }
  place(hi);
}

Vector project_good_set(const GoodSet& gs, const Vector& x) {
  Vector y = x;
  project_good_set_inplace(gs, y);
  return y;
}

void to_json(Json& j, const CoordinateSplit& s) {
  j = Json{{"S0", s.regular}, {"S1", s.boundary}, {"center", to_json_array(s.center)}};
}

void to_json(Json& j, const GoodSet& gs) {
  j = Json{{"center", to_json_array(gs.center)},
           {"S0", gs.split.regular},
           {"S1", gs.split.boundary},
           {"delta0", gs.delta0},
           {"delta1", gs.delta1},
           {"n", gs.n},
           {"r0", gs.r0},
           {"r1", gs.r1},
           {"warnings", gs.warnings}};
}

}  // namespace orthant
