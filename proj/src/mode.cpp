#include "orthant/mode.hpp"

#include "orthant/errors.hpp"
#include "orthant/rng.hpp"
#include "parallel_guard.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace orthant {

namespace {

using Index = Eigen::Index;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

class Objective {
 public:
  Objective(const LikelihoodModel& model, ModeObjective kind) : model_(model), kind_(kind) {}

  // Value and gradient; -inf (and an untouched gradient) outside the domain.
  double value_grad(const Vector& x, Vector& g) const {
    try {
      const double v = kind_ == ModeObjective::likelihood ? model_.log_lik_and_grad(x, g)
                                                          : log_posterior_and_grad(model_, x, g);
      if (!std::isfinite(v) || !g.allFinite()) return kNegInf;
      return v;
    } catch (const DomainError&) {
      return kNegInf;
    }
  }

  double value(const Vector& x) const {
    try {
      const double v = kind_ == ModeObjective::likelihood ? model_.log_lik(x)
                                                          : log_posterior_unnorm(model_, x);
      return std::isfinite(v) ? v : kNegInf;
    } catch (const DomainError&) {
      return kNegInf;
    }
  }

 private:
  const LikelihoodModel& model_;
  ModeObjective kind_;
};

void project_feasible(Vector& x, const std::optional<Vector>& upper) {
  x = x.cwiseMax(0.0);
  if (upper) x = x.cwiseMin(*upper);
}

double residual(const Vector& x, const Vector& g, const std::optional<Vector>& upper) {
  Vector y = x + g;
  project_feasible(y, upper);
  return (x - y).norm();
}

}  // namespace

ModeResult find_mode_local(const LikelihoodModel& model, const Vector& init,
                           const ModeOptions& options) {
  require_size(static_cast<std::size_t>(init.size()), model.dim(), "mode initial point");
  if (!in_orthant(init)) throw DomainError("mode search must start inside the orthant");
  if (!(options.tol > 0.0)) throw ConfigError("mode tolerance must be positive");
  if (!(options.backtrack > 0.0 && options.backtrack < 1.0)) {
    throw ConfigError("backtrack factor must lie in (0, 1)");
  }
  if (options.upper) {
    require_size(static_cast<std::size_t>(options.upper->size()), model.dim(), "mode upper bound");
  }

  const Objective obj(model, options.objective);
  Vector x = init;
  project_feasible(x, options.upper);
  Vector g(x.size());
  double f = obj.value_grad(x, g);
  if (f == kNegInf) throw NonFiniteError("objective is not finite at the initial point");

  ModeResult r;
  double alpha = 1.0 / std::max(1.0, g.lpNorm<Eigen::Infinity>());
  Vector xn(x.size());
  Vector gn(x.size());
  std::size_t it = 0;
  r.grad_norm = residual(x, g, options.upper);
  for (; it < options.max_iter && r.grad_norm > options.tol; ++it) {
    bool accepted = false;
    double fn = kNegInf;
    for (int tries = 0; tries < 80; ++tries) {
      xn = x + alpha * g;
      project_feasible(xn, options.upper);
      const double predicted = g.dot(xn - x);
      fn = obj.value_grad(xn, gn);
      if (fn != kNegInf) {
        if (fn >= f + options.armijo * predicted) {
          accepted = true;
          break;
        }
        // Increase below the resolution of f: accept if nothing is lost.
        if (fn >= f && predicted <= 1e-14 * (1.0 + std::abs(f))) {
          accepted = true;
          break;
        }
      }
      alpha *= options.backtrack;
    }
    if (!accepted) break;

    const Vector s = xn - x;
    const Vector y = g - gn;
    const double sy = s.dot(y);
    x.swap(xn);
    g.swap(gn);
    f = fn;
    alpha = sy > 0.0 ? std::clamp(s.squaredNorm() / sy, 1e-12, 1e12) : std::min(alpha * 2.0, 1e12);
    r.grad_norm = residual(x, g, options.upper);
  }

  r.theta_hat = x;
  r.objective = f;
  r.iterations = it;
  r.converged = r.grad_norm <= options.tol;
  return r;
}

ModeResult find_mode_global(const LikelihoodModel& model, const AnnealOptions& anneal,
                            std::uint64_t seed, ModeOptions local) {
  const auto d = static_cast<Index>(model.dim());
  const Vector lower = anneal.lower.size() == 0 ? Vector::Zero(d) : anneal.lower;
  if (anneal.upper.size() != d || lower.size() != d) {
    throw ConfigError("annealing box must have one bound per coordinate");
  }
  if (d == 0 || !((anneal.upper.array() > lower.array()).all()) || !(lower.array() >= 0.0).all()) {
    throw ConfigError("annealing box is empty or leaves the orthant");
  }
  if (anneal.n_restarts < 1) throw ConfigError("annealing needs at least one restart");
  if (!(anneal.cooling > 0.0 && anneal.cooling <= 1.0) || !(anneal.initial_temperature > 0.0)) {
    throw ConfigError("annealing temperature schedule is invalid");
  }

  const Objective obj(model, local.objective);
  const Vector width = anneal.upper - lower;
  std::vector<Vector> best_x(anneal.n_restarts);
  std::vector<double> best_f(anneal.n_restarts, kNegInf);

  detail::ParallelErrors errors;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t r = 0; r < anneal.n_restarts; ++r) {
    errors.capture(r, [&] {
      Rng rng(seed, {kStreamAnneal, r});
      Vector x(d);
      for (Index j = 0; j < d; ++j) x[j] = rng.uniform(lower[j], anneal.upper[j]);
      double f = obj.value(x);
      Vector bx = x;
      double bf = f;
      double temp = anneal.initial_temperature;
      Vector prop(d);
      for (std::size_t k = 0; k < anneal.n_proposals; ++k) {
        for (Index j = 0; j < d; ++j) {
          prop[j] = std::clamp(x[j] + anneal.proposal_scale * width[j] * rng.normal(), lower[j],
                               anneal.upper[j]);
        }
        const double fp = obj.value(prop);
        const double u = rng.uniform();
        if (fp != kNegInf && (fp >= f || u < std::exp((fp - f) / temp))) {
          x = prop;
          f = fp;
          if (f > bf) {
            bf = f;
            bx = x;
          }
        }
        temp *= anneal.cooling;
      }
      best_x[r] = bx;
      best_f[r] = bf;
    });
  }
  errors.rethrow();

  std::size_t best = 0;
  for (std::size_t r = 1; r < anneal.n_restarts; ++r) {
    if (best_f[r] > best_f[best]) best = r;
  }
  if (best_f[best] == kNegInf) throw NonFiniteError("annealing found no finite objective value");

  if (!local.upper) local.upper = anneal.upper;
  ModeResult res = find_mode_local(model, best_x[best], local);
  res.iterations += anneal.n_restarts * anneal.n_proposals;
  res.restarts_used = anneal.n_restarts;
  return res;
}

void to_json(Json& j, const ModeResult& r) {
  j = Json{{"theta_hat", to_json_array(r.theta_hat)},
           {"objective", r.objective},
           {"grad_norm", r.grad_norm},
           {"iterations", r.iterations},
           {"converged", r.converged},
           {"restarts_used", r.restarts_used}};
}

}  // namespace orthant
