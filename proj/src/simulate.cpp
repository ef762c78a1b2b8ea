#include "orthant/simulate.hpp"

#include "orthant/errors.hpp"
#include "orthant/rng.hpp"

#include <cmath>
#include <random>

namespace orthant {

namespace {

using Index = Eigen::Index;

ModelInstance simulate_logistic(const SimulationSpec& spec, Rng& rng) {
  const Index n = static_cast<Index>(spec.n);
  const Index d = spec.theta_star.size();
  LogisticData data;
  data.X.resize(n, d);
  data.Y.resize(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) data.X(i, j) = rng.normal();
    const double p = sigmoid(data.X.row(i).dot(spec.theta_star));
    data.Y[i] = rng.uniform() < p ? 1.0 : 0.0;
    if (spec.boundary_shift != 0.0) {
      const double resid = data.Y[i] - p;
      for (Index j = 0; j < d; ++j) {
        if (spec.theta_star[j] == 0.0) data.X(i, j) -= spec.boundary_shift * resid;
      }
    }
  }
  return ModelInstance(std::move(data), spec.prior);
}

ModelInstance simulate_poisson(const SimulationSpec& spec, Rng& rng) {
  const Index n = static_cast<Index>(spec.n);
  const Index d = spec.theta_star.size();
  if (!(spec.exposure > 0.0)) throw ConfigError("poisson exposure must be positive");
  PoissonData data;
  data.T = spec.exposure;
  if (spec.sensitivity) {
    data.A = *spec.sensitivity;
    if (data.A.rows() != n || data.A.cols() != d) {
      throw ShapeError("poisson sensitivity matrix must be n x d");
    }
  } else {
    data.A.resize(n, d);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < d; ++j) data.A(i, j) = rng.uniform();
  }
  data.Y.resize(n);
  for (Index i = 0; i < n; ++i) {
    const double rate = data.A.row(i).dot(spec.theta_star);
    if (!(rate > 0.0)) {
      throw ConfigError("poisson design gives A_i theta* <= 0 at row " + std::to_string(i));
    }
    const double mean = data.T * rate;
    std::poisson_distribution<long long> draw(mean);
    const double count = static_cast<double>(draw(rng.engine()));
    data.Y[i] = count / data.T;
    if (spec.boundary_shift != 0.0) {
      const double pearson = (count - mean) / std::sqrt(mean);
      const double scale = std::exp(-spec.boundary_shift * pearson);
      for (Index j = 0; j < d; ++j) {
        if (spec.theta_star[j] == 0.0) data.A(i, j) *= scale;
      }
    }
  }
  if ((data.Y.array() > 0.0).count() == 0) {
    throw ConfigError("simulated poisson data has no positive observation; increase n or T");
  }
  return ModelInstance(std::move(data), spec.prior);
}

ModelInstance simulate_gmm(const SimulationSpec& spec, Rng& rng) {
  const Index k = spec.weights.size();
  if (k < 1) throw ConfigError("gmm simulation needs weights");
  if (static_cast<Index>(spec.covariances.size()) != k) {
    throw ConfigError("gmm simulation needs one covariance per component");
  }
  if (spec.theta_star.size() % k != 0) {
    throw ShapeError("gmm theta_star length must be a multiple of the component count");
  }
  const Index p = spec.theta_star.size() / k;
  const Index n = static_cast<Index>(spec.n);

  std::vector<Matrix> chol;
  std::vector<Vector> means;
  for (Index j = 0; j < k; ++j) {
    Eigen::LLT<Matrix> llt(spec.covariances[static_cast<std::size_t>(j)]);
    if (llt.info() != Eigen::Success) throw ConfigError("gmm covariance is not positive definite");
    chol.push_back(llt.matrixL());
    Vector mu = spec.theta_star.segment(j * p, p);
    for (Index c = 0; c < p; ++c) {
      if (mu[c] == 0.0) {
        mu[c] = -spec.boundary_shift *
                std::sqrt(spec.covariances[static_cast<std::size_t>(j)](c, c));
      }
    }
    means.push_back(mu);
  }
  std::discrete_distribution<Index> label(spec.weights.data(), spec.weights.data() + k);

  GmmData data;
  data.weights = spec.weights;
  data.covariances = spec.covariances;
  data.X.resize(n, p);
  for (Index i = 0; i < n; ++i) {
    const Index z = label(rng.engine());
    const Vector noise = rng.normal_vector(static_cast<std::size_t>(p));
    data.X.row(i) = (means[static_cast<std::size_t>(z)] + chol[static_cast<std::size_t>(z)] * noise)
                        .transpose();
  }
  return ModelInstance(std::move(data), spec.prior);
}

}  // namespace

ModelInstance simulate(const SimulationSpec& spec, std::uint64_t seed) {
  if (spec.n < 1) throw ConfigError("simulation needs n >= 1");
  if (spec.theta_star.size() < 1) throw ConfigError("simulation needs theta_star");
  if (!in_orthant(spec.theta_star)) throw ConfigError("theta_star must lie in the orthant");
  if (!(spec.boundary_shift >= 0.0)) throw ConfigError("boundary_shift must be >= 0");
  Rng rng(seed, {kStreamData});
  switch (spec.kind) {
    case ModelKind::logistic: return simulate_logistic(spec, rng);
    case ModelKind::poisson: return simulate_poisson(spec, rng);
    case ModelKind::gmm: return simulate_gmm(spec, rng);
  }
  throw ConfigError("unknown model kind");
}

}  // namespace orthant
