#include "orthant/assumptions.hpp"

#include "orthant/errors.hpp"
#include "orthant/rng.hpp"
#include "parallel_guard.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace orthant {

namespace {

using Index = Eigen::Index;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_region(const RegionSpec& region) {
  if (region.grid < 1) throw ConfigError("region grid must have at least one point");
  if (region.split.d0() > 0 && !(region.r0 > 0.0)) throw ConfigError("region r0 must be positive");
  if (!(region.r1 > 0.0)) throw ConfigError("region r1 must be positive");
}

Matrix sub_block(const Matrix& h, const std::vector<std::size_t>& idx) {
  const auto m = static_cast<Index>(idx.size());
  Matrix s(m, m);
  for (Index a = 0; a < m; ++a)
    for (Index b = 0; b < m; ++b)
      s(a, b) = h(static_cast<Index>(idx[static_cast<std::size_t>(a)]),
                  static_cast<Index>(idx[static_cast<std::size_t>(b)]));
  return s;
}

}  // namespace

RegionSpec RegionSpec::from_good_set(const GoodSet& gs, std::size_t grid, std::uint64_t seed) {
  RegionSpec r;
  r.split = gs.split;
  r.r0 = gs.r0;
  r.r1 = gs.r1;
  r.grid = grid;
  r.seed = seed;
  return r;
}

bool RegionSpec::contains(const Vector& theta) const {
  require_size(static_cast<std::size_t>(theta.size()), split.dim(), "region membership");
  double s = 0.0;
  for (std::size_t j : split.regular) {
    const double t = theta[static_cast<Index>(j)] - split.center[static_cast<Index>(j)];
    s += t * t;
  }
  if (!split.regular.empty() && !(std::sqrt(s) <= r0)) return false;
  for (std::size_t j : split.boundary) {
    const double t = theta[static_cast<Index>(j)];
    if (!(t >= 0.0 && t <= r1)) return false;
  }
  return true;
}

Vector region_point(const RegionSpec& region, std::size_t i) {
  Vector x = region.split.center;
  if (i == 0) return x;
  Rng rng(region.seed, {kStreamGrid, i});
  const std::size_t d0 = region.split.d0();
  if (d0 > 0) {
    Vector dir = rng.normal_vector(d0);
    const double nrm = dir.norm();
    const double radius = region.r0 * std::pow(rng.uniform(), 1.0 / static_cast<double>(d0));
    for (std::size_t a = 0; a < d0; ++a) {
      const auto j = static_cast<Index>(region.split.regular[a]);
      x[j] = std::max(x[j] + radius * dir[static_cast<Index>(a)] / nrm, 0.0);
    }
  }
  for (std::size_t j : region.split.boundary) x[static_cast<Index>(j)] = rng.uniform(0.0, region.r1);
  return x;
}

OperatorNorm operator_norm(const Matrix& h, NormMethod method, std::size_t max_iter, double tol,
                           std::size_t dense_limit) {
  if (h.rows() != h.cols()) throw ShapeError("operator norm needs a square matrix");
  OperatorNorm out;
  if (h.rows() == 0) return out;
  auto dense = [&] {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("dense eigensolve failed");
    out.value = es.eigenvalues().cwiseAbs().maxCoeff();
    out.used_dense = true;
    return out;
  };
  if (method == NormMethod::dense) return dense();

  Vector v = Vector::Ones(h.rows()) / std::sqrt(static_cast<double>(h.rows()));
  double prev = 0.0;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    Vector w = h * v;
    const double rayleigh = std::abs(v.dot(w));
    const double nrm = w.norm();
    out.iterations = it;
    if (nrm == 0.0) {
      out.value = 0.0;
      return out;
    }
    v = w / nrm;
    if (it > 1 && std::abs(rayleigh - prev) <= tol * std::max(rayleigh, 1e-300)) {
      out.value = rayleigh;
      return out;
    }
    prev = rayleigh;
  }
  if (static_cast<std::size_t>(h.rows()) <= dense_limit) return dense();
  out.value = prev;
  return out;
}

AssumptionReport estimate_constants(const LikelihoodModel& model, const RegionSpec& region,
                                    NormMethod method, PoincareFactor factor) {
  check_region(region);
  require_size(region.split.dim(), model.dim(), "region");
  const std::size_t m = region.grid;
  std::vector<double> c_min(m, kInf), C_min(m, kInf), s2(m, 0.0);
  std::vector<int> dense_used(m, 0);

  detail::ParallelErrors errors;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < m; ++i) {
    errors.capture(i, [&] {
      const Vector x = region_point(region, i);
      const Matrix h = model.hess_log_lik(x);
      const OperatorNorm on = operator_norm(h, method);
      s2[i] = on.value;
      dense_used[i] = on.used_dense ? 1 : 0;
      if (region.split.d0() > 0) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(-sub_block(h, region.split.regular),
                                                 Eigen::EigenvaluesOnly);
        c_min[i] = es.eigenvalues().minCoeff();
      }
      if (region.split.d1() > 0) {
        const Vector g = model.grad_log_lik(x);
        for (std::size_t j : region.split.boundary) C_min[i] = std::min(C_min[i], -g[static_cast<Index>(j)]);
      }
    });
  }
  errors.rethrow();

  AssumptionReport r;
  r.d0 = region.split.d0();
  r.d1 = region.split.d1();
  r.n = model.n();
  r.grid = m;
  r.seed = region.seed;
  r.s2_hat = *std::max_element(s2.begin(), s2.end());
  for (int u : dense_used) r.dense_fallbacks += static_cast<std::size_t>(u);
  const double nn = static_cast<double>(r.n);
  if (r.d0 > 0) {
    r.c_S0_hat = *std::min_element(c_min.begin(), c_min.end());
    r.delta0 = region.r0 * std::sqrt(nn / static_cast<double>(r.d0));
  }
  if (r.d1 > 0) r.C_S1_hat = *std::min_element(C_min.begin(), C_min.end());
  r.delta1 = region.r1 * nn;
  r.prior_osc = model.prior().max_oscillation(region.split.boundary, 0.0, region.r1);
  r.osc_bound = osc_bound(r.s2_hat, r.delta0, r.delta1, r.d0, r.d1, r.n);

  const bool c_ok = r.d0 == 0 || *r.c_S0_hat > 0.0;
  const bool C_ok = r.d1 == 0 || *r.C_S1_hat > 0.0;
  if (c_ok && C_ok) {
    r.C_PI_bound = poincare_bound({r.c_S0_hat.value_or(0.0), r.C_S1_hat.value_or(0.0), r.s2_hat,
                                   r.delta0, r.delta1, r.d0, r.d1, r.n, r.prior_osc, factor});
  } else {
    r.C_PI_bound = kInf;
  }
  return r;
}

Decomposition decompose_likelihood(const LikelihoodModel& model, const CoordinateSplit& split,
                                   const Vector& grad_at_mode, const Vector& theta) {
  require_size(static_cast<std::size_t>(theta.size()), model.dim(), "decomposition point");
  require_size(static_cast<std::size_t>(grad_at_mode.size()), model.dim(), "mode gradient");
  Decomposition out;
  out.ell = model.log_lik(theta);
  Vector mixed = theta;
  for (std::size_t j : split.boundary) mixed[static_cast<Index>(j)] = split.center[static_cast<Index>(j)];
  out.f = model.log_lik(mixed);
  for (std::size_t j : split.boundary) {
    const auto i = static_cast<Index>(j);
    out.g += grad_at_mode[i] * theta[i];
  }
  out.B = out.ell - out.f - out.g;
  return out;
}

Decomposition decompose_likelihood(const LikelihoodModel& model, const CoordinateSplit& split,
                                   const Vector& theta) {
  return decompose_likelihood(model, split, model.grad_log_lik(split.center), theta);
}

double osc_bound(double s2, double delta0, double delta1, std::size_t d0, std::size_t d1,
                 std::size_t n) {
  if (n < 1) throw ConfigError("osc_bound needs n >= 1");
  if (d1 == 0) return 0.0;
  const double nn = static_cast<double>(n);
  const double dd0 = static_cast<double>(d0);
  const double dd1 = static_cast<double>(d1);
  return 2.0 * s2 *
         (delta0 * delta1 * std::sqrt(dd0 * dd1) / std::pow(nn, 1.5) + delta1 * delta1 * dd1 / (nn * nn));
}

double poincare_bound(const PoincareInputs& in) {
  if (in.n < 1) throw ConfigError("poincare_bound needs n >= 1");
  if (in.d0 == 0 && in.d1 == 0) throw ConfigError("poincare_bound needs d0 + d1 >= 1");
  const double nn = static_cast<double>(in.n);
  double base = 0.0;
  if (in.d0 > 0) {
    if (!(in.c_S0 > 0.0)) throw ConfigError("c_S0 must be positive");
    base = 1.0 / (nn * in.c_S0);
  }
  double expo = 0.0;
  if (in.d1 > 0) {
    if (!(in.C_S1 > 0.0)) throw ConfigError("C_S1 must be positive");
    const double f = static_cast<double>(static_cast<int>(in.factor));
    base = std::max(base, f * std::exp(in.prior_osc) / (nn * nn * in.C_S1 * in.C_S1));
    expo = 2.0 * in.s2 *
           (in.delta0 * in.delta1 * std::sqrt(static_cast<double>(in.d0 * in.d1)) / std::sqrt(nn) +
            in.delta1 * in.delta1 * static_cast<double>(in.d1) / nn);
  }
  return base * std::exp(expo);
}

std::size_t concentration_sample_size(std::size_t d0, std::size_t d1, double eps, double cbar4) {
  if (d0 < 1 || d1 < 1) throw ConfigError("concentration_sample_size needs d0, d1 >= 1");
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("eps must lie in (0, 1)");
  if (!(cbar4 > 0.0)) throw ConfigError("cbar4 must be positive");
  const double l = std::log(static_cast<double>(d0 + d1) / eps);
  const double v = cbar4 * static_cast<double>(d0) * static_cast<double>(d1) * l * l;
  // A value that is an integer up to rounding must not be pushed to the next one.
  return static_cast<std::size_t>(std::ceil(v * (1.0 - 1e-12)));
}

WellSeparation check_well_separation(const LikelihoodModel& model, const ModeResult& mode,
                                     const RegionSpec& region, const Vector& box_upper,
                                     std::size_t n_outside_samples, std::uint64_t seed,
                                     Vector box_lower) {
  const auto d = static_cast<Index>(model.dim());
  if (box_lower.size() == 0) box_lower = Vector::Zero(d);
  if (box_upper.size() != d || box_lower.size() != d || !(box_upper.array() > box_lower.array()).all()) {
    throw ConfigError("well-separation search needs a non-empty box");
  }
  if (n_outside_samples < 1) throw ConfigError("well-separation search needs samples");
  const double top = model.log_lik(mode.theta_hat);
  WellSeparation w;
  w.zeta_hat = kInf;
  Rng rng(seed, {kStreamGrid, 0x77656c6cULL});
  const std::size_t max_attempts = 1000 * n_outside_samples;
  Vector x(d);
  while (w.n_samples < n_outside_samples && w.n_attempts < max_attempts) {
    ++w.n_attempts;
    for (Index j = 0; j < d; ++j) x[j] = rng.uniform(box_lower[j], box_upper[j]);
    if (region.contains(x)) continue;
    double v;
    try {
      v = model.log_lik(x);
    } catch (const DomainError&) {
      continue;
    }
    ++w.n_samples;
    w.zeta_hat = std::min(w.zeta_hat, top - v);
  }
  if (w.n_samples == 0) throw ConfigError("no samples found outside the region inside the box");
  return w;
}

void to_json(Json& j, const AssumptionReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  j = Json{{"c_S0_hat", opt(r.c_S0_hat)},
           {"C_S1_hat", opt(r.C_S1_hat)},
           {"s2_hat", r.s2_hat},
           {"osc_bound", r.osc_bound},
           {"C_PI_bound", std::isfinite(r.C_PI_bound) ? Json(r.C_PI_bound) : Json(nullptr)},
           {"zeta_hat", opt(r.zeta_hat)},
           {"zeta_hat_kind", "heuristic minimum over sampled points"},
           {"prior_osc", r.prior_osc},
           {"delta0", r.delta0},
           {"delta1", r.delta1},
           {"d0", r.d0},
           {"d1", r.d1},
           {"n", r.n},
           {"grid", r.grid},
           {"seed", r.seed},
           {"dense_fallbacks", r.dense_fallbacks}};
}

void to_json(Json& j, const WellSeparation& w) {
  j = Json{{"zeta_hat", w.zeta_hat}, {"n_samples", w.n_samples}, {"n_attempts", w.n_attempts},
           {"separated", w.separated()}};
}

}  // namespace orthant
