#pragma once

#include "orthant/prior.hpp"
#include "orthant/types.hpp"

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace orthant {

enum class ModelKind { logistic, poisson, gmm };

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& s);

// Binary-response regression with the logistic link. Rows of X are features.
struct LogisticData {
  RowMatrix X;
  Vector Y;  // entries in {0, 1}
};

// T * Y_i ~ Poisson(T * A_i theta) with a non-negative sensitivity matrix A.
struct PoissonData {
  RowMatrix A;
  Vector Y;  // rates: T * Y_i are non-negative integers
  double T = 1.0;
};

// Mixture with known weights and covariances; the parameter is the stacked
// means theta = (mu_1, ..., mu_k), length k * p for ambient dimension p.
struct GmmData {
  RowMatrix X;
  Vector weights;
  std::vector<Matrix> covariances;

  std::size_t components() const { return static_cast<std::size_t>(weights.size()); }
  std::size_t ambient_dim() const { return static_cast<std::size_t>(X.cols()); }
};

// A normalized log-likelihood ell_n together with the prior and the inverse
// temperature n. The target density on the orthant is
// pi(theta) * exp(n * ell_n(theta)).
//
// Implementations must be reentrant: chains evaluate one instance concurrently.
class LikelihoodModel {
 public:
  explicit LikelihoodModel(Prior prior) : prior_(std::move(prior)) {}
  virtual ~LikelihoodModel() = default;

  virtual std::size_t dim() const = 0;
  virtual std::size_t n() const = 0;

  virtual double log_lik(const Vector& theta) const = 0;
  virtual Vector grad_log_lik(const Vector& theta) const = 0;
  virtual Matrix hess_log_lik(const Vector& theta) const = 0;
  // Value of ell_n and its gradient in one pass.
  virtual double log_lik_and_grad(const Vector& theta, Vector& grad) const;

  const Prior& prior() const { return prior_; }

 private:
  Prior prior_;
};

// One of the three statistical models bundled with its data. Immutable.
class ModelInstance final : public LikelihoodModel {
 public:
  ModelInstance(LogisticData data, Prior prior = Prior::flat());
  ModelInstance(PoissonData data, Prior prior = Prior::flat());
  ModelInstance(GmmData data, Prior prior = Prior::flat());

  ModelKind kind() const { return kind_; }
  std::size_t dim() const override { return d_; }
  std::size_t n() const override { return n_; }

  const LogisticData& logistic() const;
  const PoissonData& poisson() const;
  const GmmData& gmm() const;

  double log_lik(const Vector& theta) const override;
  Vector grad_log_lik(const Vector& theta) const override;
  Matrix hess_log_lik(const Vector& theta) const override;
  double log_lik_and_grad(const Vector& theta, Vector& grad) const override;

  // n x k matrix of GMM responsibilities gamma_ij (rows sum to one).
  Matrix responsibilities(const Vector& theta) const;

 private:
  struct GmmCache {
    std::vector<Matrix> precisions;
    std::vector<Vector> precision_diagonals;  // filled when every covariance is diagonal
    Vector log_norm;                          // log w_j - (p log 2pi + log det Sigma_j) / 2
    bool diagonal = false;
  };

  void check_theta(const Vector& theta) const;

  ModelKind kind_;
  std::variant<LogisticData, PoissonData, GmmData> data_;
  std::size_t d_ = 0;
  std::size_t n_ = 0;
  std::shared_ptr<const GmmCache> gmm_cache_;

  friend struct GmmKernels;
};

// Objective given by plain callables; used for synthetic targets and tests.
class FunctionModel final : public LikelihoodModel {
 public:
  using ValueFn = std::function<double(const Vector&)>;
  using GradFn = std::function<Vector(const Vector&)>;
  using HessFn = std::function<Matrix(const Vector&)>;

  FunctionModel(std::size_t dim, std::size_t n, ValueFn value, GradFn grad, HessFn hess,
                Prior prior = Prior::flat());

  std::size_t dim() const override { return d_; }
  std::size_t n() const override { return n_; }
  double log_lik(const Vector& theta) const override;
  Vector grad_log_lik(const Vector& theta) const override;
  Matrix hess_log_lik(const Vector& theta) const override;

  // ell(theta) = -1/2 sum_j curvature_j (theta_j - center_j)^2.
  static FunctionModel quadratic(const Vector& center, std::size_t n = 1,
                                 std::optional<Vector> curvature = std::nullopt);
  // ell(theta) = sum_j slope_j theta_j.
  static FunctionModel linear(const Vector& slope, std::size_t n = 1);

 private:
  std::size_t d_;
  std::size_t n_;
  ValueFn value_;
  GradFn grad_;
  HessFn hess_;
};

double log_prior(const Prior& prior, const Vector& theta);
// log pi(theta) + n * ell_n(theta).
double log_posterior_unnorm(const LikelihoodModel& model, const Vector& theta);
// grad log pi(theta) + n * grad ell_n(theta).
Vector grad_log_posterior(const LikelihoodModel& model, const Vector& theta);
// Both of the above in one model evaluation.
double log_posterior_and_grad(const LikelihoodModel& model, const Vector& theta, Vector& grad);

// c(eta) = log(1 + e^eta) and its first two derivatives, overflow-safe.
double softplus(double eta);
double sigmoid(double eta);
double sigmoid_prime(double eta);

double logsumexp(const double* values, std::size_t count);

}  // namespace orthant
