#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

// E[X] for X ~ Exp(rate) truncated to [0, L].
inline double truncated_exponential_mean(double rate, double L) {
  return 1.0 / rate - L / std::expm1(rate * L);
}

// E||Z|| for Z ~ N(0, I_d).
inline double chi_mean(double d) {
  return std::sqrt(2.0) * std::exp(std::lgamma(0.5 * (d + 1.0)) - std::lgamma(0.5 * d));
}

// Integrated autocorrelation of AR(1): N (1 - rho) / (1 + rho).
inline double ar1_ess(double n, double rho) { return n * (1.0 - rho) / (1.0 + rho); }

// Standard normal quantile by bisection on erfc.
inline double normal_quantile(double p) {
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (0.5 * std::erfc(-mid / std::sqrt(2.0)) < p) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

// -T A theta + T y log(T A theta) - log((T y)!) for one scalar observation.
inline double poisson_scalar_loglik(double A, double theta, double T, double y) {
  const double rate = T * A * theta;
  return -rate + T * y * std::log(rate) - std::lgamma(T * y + 1.0);
}

// Stationary AR(1) with unit marginal variance.
inline Eigen::VectorXd ar1_series(std::size_t n, double rho, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::VectorXd x(static_cast<Eigen::Index>(n));
  x[0] = z(gen);
  const double s = std::sqrt(1.0 - rho * rho);
  for (std::size_t i = 1; i < n; ++i) x[i] = rho * x[i - 1] + s * z(gen);
  return x;
}

inline Eigen::VectorXd iid_normal(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::VectorXd x(static_cast<Eigen::Index>(n));
  for (auto& v : x) v = z(gen);
  return x;
}

// Median of a copy.
inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace oracle
