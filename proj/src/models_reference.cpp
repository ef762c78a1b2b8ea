#include "orthant/models_reference.hpp"

#include "orthant/errors.hpp"

#include <cmath>
#include <numbers>

namespace orthant::reference {

namespace {

using Index = Eigen::Index;

double dot_row(const RowMatrix& X, Index i, const Vector& theta) {
  double s = 0.0;
  for (Index j = 0; j < X.cols(); ++j) s += X(i, j) * theta[j];
  return s;
}

double logistic_c(double eta) { return std::log1p(std::exp(-std::abs(eta))) + std::max(eta, 0.0); }
double logistic_c1(double eta) { return 1.0 / (1.0 + std::exp(-eta)); }
double logistic_c2(double eta) {
  const double s = logistic_c1(eta);
  return s * (1.0 - s);
}

// Component densities N(x_i | mu_j, Sigma_j) via explicit inverse and
// determinant, with a common max shift so the ratio is finite.
struct GmmTerms {
  std::vector<double> log_terms;  // log w_j + log N(x_i | mu_j, Sigma_j)
  std::vector<Vector> g;          // Sigma_j^{-1} (x_i - mu_j)
};

GmmTerms gmm_terms(const GmmData& m, Index i, const Vector& theta) {
  const Index p = m.X.cols();
  GmmTerms t;
  for (std::size_t j = 0; j < m.components(); ++j) {
    const Matrix& s = m.covariances[j];
    const Matrix inv = s.inverse();
    const Vector diff = m.X.row(i).transpose() - theta.segment(static_cast<Index>(j) * p, p);
    const double quad = diff.dot(inv * diff);
    t.log_terms.push_back(std::log(m.weights[static_cast<Index>(j)]) -
                          0.5 * static_cast<double>(p) * std::log(2.0 * std::numbers::pi) -
                          0.5 * std::log(s.determinant()) - 0.5 * quad);
    t.g.push_back(inv * diff);
  }
  return t;
}

std::vector<double> gmm_gamma(const std::vector<double>& log_terms, double* log_total) {
  double mx = log_terms[0];
  for (double v : log_terms) mx = std::max(mx, v);
  double z = 0.0;
  for (double v : log_terms) z += std::exp(v - mx);
  std::vector<double> gamma;
  for (double v : log_terms) gamma.push_back(std::exp(v - mx) / z);
  if (log_total) *log_total = mx + std::log(z);
  return gamma;
}

}  // namespace

double log_lik(const ModelInstance& model, const Vector& theta) {
  double s = 0.0;
  switch (model.kind()) {
    case ModelKind::logistic: {
      const auto& m = model.logistic();
      for (Index i = 0; i < m.X.rows(); ++i) {
        const double eta = dot_row(m.X, i, theta);
        s += m.Y[i] * eta - logistic_c(eta);
      }
      return s / static_cast<double>(m.X.rows());
    }
    case ModelKind::poisson: {
      const auto& m = model.poisson();
      for (Index i = 0; i < m.A.rows(); ++i) {
        const double rate = dot_row(m.A, i, theta);
        const double ty = m.T * m.Y[i];
        s += -m.T * rate;
        if (ty > 0.0) {
          if (rate <= 0.0) throw DomainError("poisson rate <= 0");
          s += ty * std::log(m.T * rate) - std::lgamma(ty + 1.0);
        }
      }
      return s / static_cast<double>(m.A.rows());
    }
    case ModelKind::gmm: {
      const auto& m = model.gmm();
      for (Index i = 0; i < m.X.rows(); ++i) {
        double total = 0.0;
        gmm_gamma(gmm_terms(m, i, theta).log_terms, &total);
        s += total;
      }
      return s / static_cast<double>(m.X.rows());
    }
  }
  return s;
}

Vector grad_log_lik(const ModelInstance& model, const Vector& theta) {
  const Index d = static_cast<Index>(model.dim());
  Vector g = Vector::Zero(d);
  switch (model.kind()) {
    case ModelKind::logistic: {
      const auto& m = model.logistic();
      for (Index i = 0; i < m.X.rows(); ++i) {
        const double r = m.Y[i] - logistic_c1(dot_row(m.X, i, theta));
        for (Index j = 0; j < d; ++j) g[j] += r * m.X(i, j);
      }
      return g / static_cast<double>(m.X.rows());
    }
    case ModelKind::poisson: {
      const auto& m = model.poisson();
      for (Index i = 0; i < m.A.rows(); ++i) {
        const double rate = dot_row(m.A, i, theta);
        const double ty = m.T * m.Y[i];
        if (ty > 0.0 && rate <= 0.0) throw DomainError("poisson rate <= 0");
        for (Index j = 0; j < d; ++j) {
          g[j] += -m.T * m.A(i, j) + (ty > 0.0 ? ty * m.A(i, j) / rate : 0.0);
        }
      }
      return g / static_cast<double>(m.A.rows());
    }
    case ModelKind::gmm: {
      const auto& m = model.gmm();
      const Index p = m.X.cols();
      for (Index i = 0; i < m.X.rows(); ++i) {
        const GmmTerms t = gmm_terms(m, i, theta);
        const std::vector<double> gamma = gmm_gamma(t.log_terms, nullptr);
        for (std::size_t j = 0; j < m.components(); ++j) {
          g.segment(static_cast<Index>(j) * p, p) += gamma[j] * t.g[j];
        }
      }
      return g / static_cast<double>(m.X.rows());
    }
  }
  return g;
}

Matrix hess_log_lik(const ModelInstance& model, const Vector& theta) {
  const Index d = static_cast<Index>(model.dim());
  Matrix h = Matrix::Zero(d, d);
  switch (model.kind()) {
    case ModelKind::logistic: {
      const auto& m = model.logistic();
      for (Index i = 0; i < m.X.rows(); ++i) {
        const double w = logistic_c2(dot_row(m.X, i, theta));
        for (Index a = 0; a < d; ++a)
          for (Index b = 0; b < d; ++b) h(a, b) -= w * m.X(i, a) * m.X(i, b);
      }
      return h / static_cast<double>(m.X.rows());
    }
    case ModelKind::poisson: {
      const auto& m = model.poisson();
      for (Index i = 0; i < m.A.rows(); ++i) {
        const double ty = m.T * m.Y[i];
        if (ty <= 0.0) continue;
        const double rate = dot_row(m.A, i, theta);
        if (rate <= 0.0) throw DomainError("poisson rate <= 0");
        for (Index a = 0; a < d; ++a)
          for (Index b = 0; b < d; ++b) h(a, b) -= ty * m.A(i, a) * m.A(i, b) / (rate * rate);
      }
      return h / static_cast<double>(m.A.rows());
    }
    case ModelKind::gmm: {
      const auto& m = model.gmm();
      const Index p = m.X.cols();
      const std::size_t k = m.components();
      for (Index i = 0; i < m.X.rows(); ++i) {
        const GmmTerms t = gmm_terms(m, i, theta);
        const std::vector<double> gamma = gmm_gamma(t.log_terms, nullptr);
        for (std::size_t j = 0; j < k; ++j) {
          const Index oj = static_cast<Index>(j) * p;
          h.block(oj, oj, p, p) += gamma[j] * t.g[j] * t.g[j].transpose() -
                                   gamma[j] * gamma[j] * t.g[j] * t.g[j].transpose() -
                                   gamma[j] * m.covariances[j].inverse();
          for (std::size_t l = 0; l < k; ++l) {
            if (l == j) continue;
            const Index ol = static_cast<Index>(l) * p;
            h.block(oj, ol, p, p) -= gamma[j] * gamma[l] * t.g[j] * t.g[l].transpose();
          }
        }
      }
      return h / static_cast<double>(m.X.rows());
    }
  }
  return h;
}

}  // namespace orthant::reference
