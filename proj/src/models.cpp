#include "orthant/models.hpp"

#include "orthant/errors.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace orthant {

namespace {

using Index = Eigen::Index;

// Observation blocks for the parallel kernels. The partition depends only on n
// (never on the thread count) and partial results are reduced in block order,
// so every kernel is bitwise deterministic under any OpenMP configuration.
struct Blocks {
  Index size;
  Index count;
  Index n;
  Index begin(Index b) const { return b * size; }
  Index end(Index b) const { return std::min(n, (b + 1) * size); }
};

Blocks make_blocks(Index n, Index max_blocks) {
  Index size = std::max<Index>(256, (n + max_blocks - 1) / max_blocks);
  return Blocks{size, (n + size - 1) / size, n};
}

constexpr Index kMaxBlocks = 64;
constexpr Index kMaxHessBlocks = 8;

Matrix symmetrize(const Matrix& h) { return 0.5 * (h + h.transpose()); }

bool is_integer(double v) { return std::abs(v - std::round(v)) <= 1e-9 * std::max(1.0, v); }

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::logistic: return "logistic";
    case ModelKind::poisson: return "poisson";
    case ModelKind::gmm: return "gmm";
  }
  return "unknown";
}

ModelKind parse_model_kind(const std::string& s) {
  if (s == "logistic") return ModelKind::logistic;
  if (s == "poisson") return ModelKind::poisson;
  if (s == "gmm") return ModelKind::gmm;
  throw ConfigError("unknown model kind '" + s + "' (expected logistic, poisson or gmm)");
}

double softplus(double eta) {
  return eta > 0.0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
}

double sigmoid(double eta) {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

double sigmoid_prime(double eta) {
  const double s = sigmoid(eta);
  return s * (1.0 - s);
}

double logsumexp(const double* values, std::size_t count) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < count; ++j) m = std::max(m, values[j]);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (std::size_t j = 0; j < count; ++j) s += std::exp(values[j] - m);
  return m + std::log(s);
}

double LikelihoodModel::log_lik_and_grad(const Vector& theta, Vector& grad) const {
  grad = grad_log_lik(theta);
  return log_lik(theta);
}

// ---------------------------------------------------------------------------
// Construction and validation

ModelInstance::ModelInstance(LogisticData data, Prior prior)
    : LikelihoodModel(std::move(prior)), kind_(ModelKind::logistic) {
  if (data.X.rows() < 1) throw ShapeError("logistic data needs n >= 1 rows");
  require_size(static_cast<std::size_t>(data.Y.size()), static_cast<std::size_t>(data.X.rows()),
               "logistic labels");
  for (Index i = 0; i < data.Y.size(); ++i) {
    if (data.Y[i] != 0.0 && data.Y[i] != 1.0) throw ConfigError("logistic labels must be 0 or 1");
  }
  n_ = static_cast<std::size_t>(data.X.rows());
  d_ = static_cast<std::size_t>(data.X.cols());
  data_ = std::move(data);
}

ModelInstance::ModelInstance(PoissonData data, Prior prior)
    : LikelihoodModel(std::move(prior)), kind_(ModelKind::poisson) {
  if (data.A.rows() < 1) throw ShapeError("poisson data needs n >= 1 rows");
  require_size(static_cast<std::size_t>(data.Y.size()), static_cast<std::size_t>(data.A.rows()),
               "poisson rates");
  if (!(data.T > 0.0)) throw ConfigError("poisson exposure T must be positive");
  if ((data.A.array() < 0.0).any()) throw ConfigError("poisson sensitivity matrix must be >= 0");
  bool any_positive = false;
  for (Index i = 0; i < data.Y.size(); ++i) {
    if (!(data.Y[i] >= 0.0)) throw ConfigError("poisson rates must be >= 0");
    if (!is_integer(data.T * data.Y[i])) throw ConfigError("poisson T * Y_i must be integers");
    any_positive = any_positive || data.Y[i] > 0.0;
  }
  if (!any_positive) throw ConfigError("poisson data needs at least one positive observation");
  n_ = static_cast<std::size_t>(data.A.rows());
  d_ = static_cast<std::size_t>(data.A.cols());
  data_ = std::move(data);
}

ModelInstance::ModelInstance(GmmData data, Prior prior)
    : LikelihoodModel(std::move(prior)), kind_(ModelKind::gmm) {
  const std::size_t k = data.components();
  const Index p = data.X.cols();
  if (data.X.rows() < 1 || p < 1) throw ShapeError("gmm data needs n >= 1 rows");
  if (k < 1) throw ConfigError("gmm needs at least one component");
  if (data.covariances.size() != k) throw ShapeError("gmm needs one covariance per component");
  if ((data.weights.array() <= 0.0).any()) throw ConfigError("gmm weights must be positive");
  if (std::abs(data.weights.sum() - 1.0) > 1e-12) throw ConfigError("gmm weights must sum to 1");

  auto cache = std::make_shared<GmmCache>();
  cache->log_norm.resize(static_cast<Index>(k));
  bool diagonal = true;
  for (std::size_t j = 0; j < k; ++j) {
    const Matrix& s = data.covariances[j];
    if (s.rows() != p || s.cols() != p) throw ShapeError("gmm covariance has wrong shape");
    if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, s.cwiseAbs().maxCoeff())) {
      throw ConfigError("gmm covariance must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
    if (!(eig.eigenvalues().minCoeff() > 0.0)) {
      throw ConfigError("gmm covariance must be positive definite");
    }
    Eigen::LLT<Matrix> llt(s);
    const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    cache->precisions.push_back(llt.solve(Matrix::Identity(p, p)));
    cache->log_norm[static_cast<Index>(j)] =
        std::log(data.weights[static_cast<Index>(j)]) -
        0.5 * (static_cast<double>(p) * std::log(2.0 * std::numbers::pi) + log_det);
    Matrix off = s;
    off.diagonal().setZero();
    diagonal = diagonal && off.cwiseAbs().maxCoeff() == 0.0;
  }
  cache->diagonal = diagonal;
  if (diagonal) {
    for (std::size_t j = 0; j < k; ++j) {
      cache->precision_diagonals.push_back(data.covariances[j].diagonal().cwiseInverse());
    }
  }
  gmm_cache_ = std::move(cache);
  n_ = static_cast<std::size_t>(data.X.rows());
  d_ = k * static_cast<std::size_t>(p);
  data_ = std::move(data);
}

const LogisticData& ModelInstance::logistic() const {
  if (kind_ != ModelKind::logistic) throw ConfigError("model is not logistic");
  return std::get<LogisticData>(data_);
}

const PoissonData& ModelInstance::poisson() const {
  if (kind_ != ModelKind::poisson) throw ConfigError("model is not poisson");
  return std::get<PoissonData>(data_);
}

const GmmData& ModelInstance::gmm() const {
  if (kind_ != ModelKind::gmm) throw ConfigError("model is not gmm");
  return std::get<GmmData>(data_);
}

void ModelInstance::check_theta(const Vector& theta) const {
  require_size(static_cast<std::size_t>(theta.size()), d_, "parameter");
}

// ---------------------------------------------------------------------------
// Logistic kernels

namespace {

double logistic_value(const LogisticData& m, const Vector& theta) {
  const Blocks blocks = make_blocks(m.X.rows(), kMaxBlocks);
  std::vector<double> partial(static_cast<std::size_t>(blocks.count), 0.0);
#pragma omp parallel for schedule(static)
  for (Index b = 0; b < blocks.count; ++b) {
    const Index lo = blocks.begin(b), len = blocks.end(b) - lo;
    const Vector eta = m.X.middleRows(lo, len) * theta;
    double s = 0.0;
    for (Index i = 0; i < len; ++i) s += m.Y[lo + i] * eta[i] - softplus(eta[i]);
    partial[static_cast<std::size_t>(b)] = s;
  }
  double total = 0.0;
  for (double v : partial) total += v;
  return total / static_cast<double>(m.X.rows());
}

double logistic_value_grad(const LogisticData& m, const Vector& theta, Vector* grad) {
  const Blocks blocks = make_blocks(m.X.rows(), kMaxBlocks);
  const Index d = m.X.cols();
  std::vector<double> partial(static_cast<std::size_t>(blocks.count), 0.0);
  Matrix grads = Matrix::Zero(d, blocks.count);
#pragma omp parallel for schedule(static)
  for (Index b = 0; b < blocks.count; ++b) {
    const Index lo = blocks.begin(b), len = blocks.end(b) - lo;
    const auto rows = m.X.middleRows(lo, len);
    const Vector eta = rows * theta;
    Vector resid(len);
    double s = 0.0;
    for (Index i = 0; i < len; ++i) {
      s += m.Y[lo + i] * eta[i] - softplus(eta[i]);
      resid[i] = m.Y[lo + i] - sigmoid(eta[i]);
    }
    partial[static_cast<std::size_t>(b)] = s;
    grads.col(b).noalias() = rows.transpose() * resid;
  }
  const double inv_n = 1.0 / static_cast<double>(m.X.rows());
  double total = 0.0;
  for (double v : partial) total += v;
  Vector g = Vector::Zero(d);
  for (Index b = 0; b < blocks.count; ++b) g += grads.col(b);
  *grad = g * inv_n;
  return total * inv_n;
}

Matrix logistic_hess(const LogisticData& m, const Vector& theta) {
  const Blocks blocks = make_blocks(m.X.rows(), kMaxHessBlocks);
  const Index d = m.X.cols();
  std::vector<Matrix> parts(static_cast<std::size_t>(blocks.count));
#pragma omp parallel for schedule(static)
  for (Index b = 0; b < blocks.count; ++b) {
    const Index lo = blocks.begin(b), len = blocks.end(b) - lo;
    const auto rows = m.X.middleRows(lo, len);
    const Vector eta = rows * theta;
    Vector w(len);
    for (Index i = 0; i < len; ++i) w[i] = sigmoid_prime(eta[i]);
    parts[static_cast<std::size_t>(b)].noalias() = rows.transpose() * w.asDiagonal() * rows;
  }
  Matrix h = Matrix::Zero(d, d);
  for (const Matrix& p : parts) h += p;
  return symmetrize(-h / static_cast<double>(m.X.rows()));
}

// ---------------------------------------------------------------------------
// Poisson kernels

[[noreturn]] void poisson_domain_error(Index i, double rate) {
  throw DomainError("poisson rate A_i theta = " + std::to_string(rate) + " <= 0 at observation " +
                    std::to_string(i) + " with positive count");
}

// Domain violations are collected per block and the first (lowest row) is
// reported after the parallel region.
double poisson_value_grad(const PoissonData& m, const Vector& theta, Vector* grad) {
  const Blocks blocks = make_blocks(m.A.rows(), kMaxBlocks);
  const Index d = m.A.cols();
  const double T = m.T;
  std::vector<double> partial(static_cast<std::size_t>(blocks.count), 0.0);
  std::vector<Index> bad(static_cast<std::size_t>(blocks.count), -1);
  std::vector<double> bad_rate(static_cast<std::size_t>(blocks.count), 0.0);
  Matrix grads;
  if (grad) grads = Matrix::Zero(d, blocks.count);
#pragma omp parallel for schedule(static)
  for (Index b = 0; b < blocks.count; ++b) {
    const Index lo = blocks.begin(b), len = blocks.end(b) - lo;
    const auto rows = m.A.middleRows(lo, len);
    const Vector rate = rows * theta;
    Vector coef(len);
    double s = 0.0;
    for (Index i = 0; i < len; ++i) {
      const double ty = T * m.Y[lo + i];
      const double tr = T * rate[i];
      s -= tr;
      coef[i] = -T;
      if (ty > 0.0) {
        if (!(rate[i] > 0.0)) {
          if (bad[static_cast<std::size_t>(b)] < 0) {
            bad[static_cast<std::size_t>(b)] = lo + i;
            bad_rate[static_cast<std::size_t>(b)] = rate[i];
          }
          continue;
        }
        s += ty * std::log(tr) - std::lgamma(ty + 1.0);
        coef[i] += ty / rate[i];
      }
    }
    partial[static_cast<std::size_t>(b)] = s;
    if (grad) grads.col(b).noalias() = rows.transpose() * coef;
  }
  for (Index b = 0; b < blocks.count; ++b) {
    if (bad[static_cast<std::size_t>(b)] >= 0) {
      poisson_domain_error(bad[static_cast<std::size_t>(b)], bad_rate[static_cast<std::size_t>(b)]);
    }
  }
  const double inv_n = 1.0 / static_cast<double>(m.A.rows());
  double total = 0.0;
  for (double v : partial) total += v;
  if (grad) {
    Vector g = Vector::Zero(d);
    for (Index b = 0; b < blocks.count; ++b) g += grads.col(b);
    *grad = g * inv_n;
  }
  return total * inv_n;
}

Matrix poisson_hess(const PoissonData& m, const Vector& theta) {
  const Blocks blocks = make_blocks(m.A.rows(), kMaxHessBlocks);
  const Index d = m.A.cols();
  std::vector<Matrix> parts(static_cast<std::size_t>(blocks.count));
  std::vector<Index> bad(static_cast<std::size_t>(blocks.count), -1);
  std::vector<double> bad_rate(static_cast<std::size_t>(blocks.count), 0.0);
#pragma omp parallel for schedule(static)
  for (Index b = 0; b < blocks.count; ++b) {
    const Index lo = blocks.begin(b), len = blocks.end(b) - lo;
    const auto rows = m.A.middleRows(lo, len);
    const Vector rate = rows * theta;
    Vector w = Vector::Zero(len);
    for (Index i = 0; i < len; ++i) {
      const double ty = m.T * m.Y[lo + i];
      if (ty > 0.0) {
        if (!(rate[i] > 0.0)) {
          if (bad[static_cast<std::size_t>(b)] < 0) {
            bad[static_cast<std::size_t>(b)] = lo + i;
            bad_rate[static_cast<std::size_t>(b)] = rate[i];
          }
          continue;
        }
        w[i] = ty / (rate[i] * rate[i]);
      }
    }
    parts[static_cast<std::size_t>(b)].noalias() = rows.transpose() * w.asDiagonal() * rows;
  }
  for (Index b = 0; b < blocks.count; ++b) {
    if (bad[static_cast<std::size_t>(b)] >= 0) {
      poisson_domain_error(bad[static_cast<std::size_t>(b)], bad_rate[static_cast<std::size_t>(b)]);
    }
  }
  Matrix h = Matrix::Zero(d, d);
  for (const Matrix& p : parts) h += p;
  return symmetrize(-h / static_cast<double>(m.A.rows()));
}

}  // namespace

// ---------------------------------------------------------------------------
// GMM kernels

struct GmmKernels {
  // For one observation: fills log-weighted densities, responsibilities and
  // whitened residuals g_j = Sigma_j^{-1} (x - mu_j); returns log p(x).
  static double observation(const ModelInstance& model, const GmmData& m, Index i,
                            const Vector& theta, double* logp, double* gamma, Matrix& g) {
    const auto& cache = *model.gmm_cache_;
    const Index p = m.X.cols();
    const Index k = static_cast<Index>(m.components());
    for (Index j = 0; j < k; ++j) {
      const Vector diff = m.X.row(i).transpose() - theta.segment(j * p, p);
      if (cache.diagonal) {
        g.col(j) = diff.cwiseProduct(cache.precision_diagonals[static_cast<std::size_t>(j)]);
      } else {
        g.col(j).noalias() = cache.precisions[static_cast<std::size_t>(j)] * diff;
      }
      logp[j] = cache.log_norm[j] - 0.5 * diff.dot(g.col(j));
    }
    const double lse = logsumexp(logp, static_cast<std::size_t>(k));
    for (Index j = 0; j < k; ++j) gamma[j] = std::exp(logp[j] - lse);
    return lse;
  }

  static double value_grad(const ModelInstance& model, const Vector& theta, Vector* grad) {
    const GmmData& m = model.gmm();
    const Index n = m.X.rows(), p = m.X.cols();
    const Index k = static_cast<Index>(m.components());
    const Blocks blocks = make_blocks(n, kMaxBlocks);
    std::vector<double> partial(static_cast<std::size_t>(blocks.count), 0.0);
    Matrix grads;
    if (grad) grads = Matrix::Zero(k * p, blocks.count);
#pragma omp parallel for schedule(static)
    for (Index b = 0; b < blocks.count; ++b) {
      std::vector<double> logp(static_cast<std::size_t>(k)), gamma(static_cast<std::size_t>(k));
      Matrix g(p, k);
      double s = 0.0;
      for (Index i = blocks.begin(b); i < blocks.end(b); ++i) {
        s += observation(model, m, i, theta, logp.data(), gamma.data(), g);
        if (grad) {
          for (Index j = 0; j < k; ++j) {
            grads.col(b).segment(j * p, p) += gamma[static_cast<std::size_t>(j)] * g.col(j);
          }
        }
      }
      partial[static_cast<std::size_t>(b)] = s;
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    double total = 0.0;
    for (double v : partial) total += v;
    if (grad) {
      Vector gsum = Vector::Zero(k * p);
      for (Index b = 0; b < blocks.count; ++b) gsum += grads.col(b);
      *grad = gsum * inv_n;
    }
    return total * inv_n;
  }

  static Matrix hess(const ModelInstance& model, const Vector& theta) {
    const GmmData& m = model.gmm();
    const auto& cache = *model.gmm_cache_;
    const Index n = m.X.rows(), p = m.X.cols();
    const Index k = static_cast<Index>(m.components());
    const Blocks blocks = make_blocks(n, kMaxHessBlocks);
    std::vector<Matrix> parts(static_cast<std::size_t>(blocks.count));
#pragma omp parallel for schedule(static)
    for (Index b = 0; b < blocks.count; ++b) {
      std::vector<double> logp(static_cast<std::size_t>(k)), gamma(static_cast<std::size_t>(k));
      Matrix g(p, k);
      Matrix h = Matrix::Zero(k * p, k * p);
      Vector gamma_sum = Vector::Zero(k);
      for (Index i = blocks.begin(b); i < blocks.end(b); ++i) {
        observation(model, m, i, theta, logp.data(), gamma.data(), g);
        for (Index j = 0; j < k; ++j) {
          const double gj = gamma[static_cast<std::size_t>(j)];
          gamma_sum[j] += gj;
          h.block(j * p, j * p, p, p).noalias() += gj * (1.0 - gj) * g.col(j) * g.col(j).transpose();
          for (Index l = j + 1; l < k; ++l) {
            const double gl = gamma[static_cast<std::size_t>(l)];
            h.block(j * p, l * p, p, p).noalias() -= gj * gl * g.col(j) * g.col(l).transpose();
          }
        }
      }
      for (Index j = 0; j < k; ++j) {
        h.block(j * p, j * p, p, p) -= gamma_sum[j] * cache.precisions[static_cast<std::size_t>(j)];
      }
      parts[static_cast<std::size_t>(b)] = std::move(h);
    }
    Matrix h = Matrix::Zero(k * p, k * p);
    for (const Matrix& part : parts) h += part;
    // Mirror the upper off-diagonal blocks before symmetrizing.
    for (Index j = 0; j < k; ++j) {
      for (Index l = j + 1; l < k; ++l) {
        h.block(l * p, j * p, p, p) = h.block(j * p, l * p, p, p).transpose();
      }
    }
    return symmetrize(h / static_cast<double>(n));
  }

  static Matrix responsibilities(const ModelInstance& model, const Vector& theta) {
    const GmmData& m = model.gmm();
    const Index n = m.X.rows(), p = m.X.cols();
    const Index k = static_cast<Index>(m.components());
    Matrix out(n, k);
#pragma omp parallel
    {
      std::vector<double> logp(static_cast<std::size_t>(k)), gamma(static_cast<std::size_t>(k));
      Matrix g(p, k);
#pragma omp for schedule(static)
      for (Index i = 0; i < n; ++i) {
        observation(model, m, i, theta, logp.data(), gamma.data(), g);
        for (Index j = 0; j < k; ++j) out(i, j) = gamma[static_cast<std::size_t>(j)];
      }
    }
    return out;
  }
};

// ---------------------------------------------------------------------------
// Dispatch

double ModelInstance::log_lik(const Vector& theta) const {
  check_theta(theta);
  switch (kind_) {
    case ModelKind::logistic: return logistic_value(logistic(), theta);
    case ModelKind::poisson: return poisson_value_grad(poisson(), theta, nullptr);
    case ModelKind::gmm: return GmmKernels::value_grad(*this, theta, nullptr);
  }
  return 0.0;
}

double ModelInstance::log_lik_and_grad(const Vector& theta, Vector& grad) const {
  check_theta(theta);
  switch (kind_) {
    case ModelKind::logistic: return logistic_value_grad(logistic(), theta, &grad);
    case ModelKind::poisson: return poisson_value_grad(poisson(), theta, &grad);
    case ModelKind::gmm: return GmmKernels::value_grad(*this, theta, &grad);
  }
  return 0.0;
}

Vector ModelInstance::grad_log_lik(const Vector& theta) const {
  Vector g;
  log_lik_and_grad(theta, g);
  return g;
}

Matrix ModelInstance::hess_log_lik(const Vector& theta) const {
  check_theta(theta);
  switch (kind_) {
    case ModelKind::logistic: return logistic_hess(logistic(), theta);
    case ModelKind::poisson: return poisson_hess(poisson(), theta);
    case ModelKind::gmm: return GmmKernels::hess(*this, theta);
  }
  return {};
}

Matrix ModelInstance::responsibilities(const Vector& theta) const {
  check_theta(theta);
  return GmmKernels::responsibilities(*this, theta);
}

// ---------------------------------------------------------------------------
// Function-backed objectives

FunctionModel::FunctionModel(std::size_t dim, std::size_t n, ValueFn value, GradFn grad,
                             HessFn hess, Prior prior)
    : LikelihoodModel(std::move(prior)),
      d_(dim),
      n_(n),
      value_(std::move(value)),
      grad_(std::move(grad)),
      hess_(std::move(hess)) {}

double FunctionModel::log_lik(const Vector& theta) const {
  require_size(static_cast<std::size_t>(theta.size()), d_, "parameter");
  return value_(theta);
}

Vector FunctionModel::grad_log_lik(const Vector& theta) const {
  require_size(static_cast<std::size_t>(theta.size()), d_, "parameter");
  return grad_(theta);
}

Matrix FunctionModel::hess_log_lik(const Vector& theta) const {
  require_size(static_cast<std::size_t>(theta.size()), d_, "parameter");
  return hess_(theta);
}

FunctionModel FunctionModel::quadratic(const Vector& center, std::size_t n,
                                       std::optional<Vector> curvature) {
  const Vector c = curvature.value_or(Vector::Ones(center.size()));
  return FunctionModel(
      static_cast<std::size_t>(center.size()), n,
      [=](const Vector& t) { return -0.5 * (c.array() * (t - center).array().square()).sum(); },
      [=](const Vector& t) { return Vector(-(c.array() * (t - center).array())); },
      [=](const Vector&) { return Matrix(-c.asDiagonal().toDenseMatrix()); });
}

FunctionModel FunctionModel::linear(const Vector& slope, std::size_t n) {
  const auto d = slope.size();
  return FunctionModel(
      static_cast<std::size_t>(d), n, [=](const Vector& t) { return slope.dot(t); },
      [=](const Vector&) { return slope; }, [=](const Vector&) { return Matrix::Zero(d, d).eval(); });
}

// ---------------------------------------------------------------------------

double log_prior(const Prior& prior, const Vector& theta) { return prior.log_density(theta); }

double log_posterior_unnorm(const LikelihoodModel& model, const Vector& theta) {
  return model.prior().log_density(theta) +
         static_cast<double>(model.n()) * model.log_lik(theta);
}

Vector grad_log_posterior(const LikelihoodModel& model, const Vector& theta) {
  Vector g;
  log_posterior_and_grad(model, theta, g);
  return g;
}

double log_posterior_and_grad(const LikelihoodModel& model, const Vector& theta, Vector& grad) {
  const double n = static_cast<double>(model.n());
  const double v = model.log_lik_and_grad(theta, grad);
  grad *= n;
  if (!model.prior().is_flat()) grad += model.prior().gradient(theta);
  return model.prior().log_density(theta) + n * v;
}

}  // namespace orthant
