#include "orthant/ess.hpp"

#include "orthant/errors.hpp"

#include <boost/math/distributions/normal.hpp>
#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

namespace orthant {

namespace {

using Index = Eigen::Index;

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <class T>
FftwBuffer<T> fftw_buffer(std::size_t count) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * count));
  if (!p) throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

// Plans are created and destroyed under a lock; execution is reentrant.
class Plan {
 public:
  Plan(int m, double* in, fftw_complex* out) {
#pragma omp critical(orthant_fftw_plan)
    plan_ = fftw_plan_dft_r2c_1d(m, in, out, FFTW_ESTIMATE);
  }
  Plan(int m, fftw_complex* in, double* out) {
#pragma omp critical(orthant_fftw_plan)
    plan_ = fftw_plan_dft_c2r_1d(m, in, out, FFTW_ESTIMATE);
  }
  ~Plan() {
#pragma omp critical(orthant_fftw_plan)
    fftw_destroy_plan(plan_);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;

  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_ = nullptr;
};

void check_chains(const std::vector<Vector>& chains) {
  if (chains.empty()) throw ShapeError("ESS needs at least one chain");
  const Index n = chains.front().size();
  for (const Vector& c : chains) {
    if (c.size() != n) throw ShapeError("ESS chains must have equal length");
    if (!c.allFinite()) throw NonFiniteError("ESS input contains non-finite draws");
  }
  if (n < 8) throw ShapeError("ESS needs chains of length >= 8");
}

std::vector<Vector> split_chains(const std::vector<Vector>& chains) {
  std::vector<Vector> out;
  for (const Vector& c : chains) {
    const Index half = c.size() / 2;
    out.push_back(c.head(half));
    out.push_back(c.tail(half));
  }
  return out;
}

bool all_equal(const std::vector<Vector>& chains) {
  const double v = chains.front()[0];
  return std::all_of(chains.begin(), chains.end(),
                     [v](const Vector& c) { return (c.array() == v).all(); });
}

// Multi-chain ESS from within/between-chain variance and Geyer's initial
// monotone positive sequence.
double ess_core(const std::vector<Vector>& chains) {
  const std::size_t m = chains.size();
  const Index n = chains.front().size();
  const double nd = static_cast<double>(n);

  std::vector<Vector> acov;
  Vector means(static_cast<Index>(m));
  for (std::size_t c = 0; c < m; ++c) {
    acov.push_back(autocovariance(chains[c]));
    means[static_cast<Index>(c)] = chains[c].mean();
  }
  auto mean_acov = [&](Index t) {
    double s = 0.0;
    for (const Vector& a : acov) s += a[t];
    return s / static_cast<double>(m);
  };
  const double mean_var = mean_acov(0) * nd / (nd - 1.0);
  double var_plus = mean_var * (nd - 1.0) / nd;
  if (m > 1) {
    var_plus += (means.array() - means.mean()).square().sum() / static_cast<double>(m - 1);
  }
  if (!(var_plus > 0.0)) throw DegenerateChainError("chains have zero variance");

  std::vector<double> rho(static_cast<std::size_t>(n), 0.0);
  auto rho_at = [&](Index t) { return 1.0 - (mean_var - mean_acov(t)) / var_plus; };
  double rho_even = 1.0;
  double rho_odd = rho_at(1);
  rho[0] = rho_even;
  rho[1] = rho_odd;

  Index t = 1;
  while (t < n - 3 && rho_even + rho_odd > 0.0) {
    rho_even = rho_at(t + 1);
    rho_odd = rho_at(t + 2);
    if (rho_even + rho_odd >= 0.0) {
      rho[static_cast<std::size_t>(t + 1)] = rho_even;
      rho[static_cast<std::size_t>(t + 2)] = rho_odd;
    }
    t += 2;
  }
  const Index max_t = t - 2;
  if (rho_even > 0.0) rho[static_cast<std::size_t>(max_t + 1)] = rho_even;

  t = 1;
  while (t <= max_t - 2) {
    const auto i = static_cast<std::size_t>(t);
    if (rho[i + 1] + rho[i + 2] > rho[i - 1] + rho[i]) {
      rho[i + 1] = 0.5 * (rho[i - 1] + rho[i]);
      rho[i + 2] = rho[i + 1];
    }
    t += 2;
  }

  double total = static_cast<double>(m) * nd;
  double tau = -1.0;
  for (Index k = 0; k <= max_t; ++k) tau += 2.0 * rho[static_cast<std::size_t>(k)];
  tau += rho[static_cast<std::size_t>(max_t + 1)];
  tau = std::max(tau, 1.0 / std::log10(total));
  return std::min(total / tau, 1.5 * total);
}

}  // namespace

Vector autocovariance(const Vector& x) {
  const Index n = x.size();
  if (n < 1) throw ShapeError("autocovariance of an empty series");
  const int m = static_cast<int>(2 * n);
  auto in = fftw_buffer<double>(static_cast<std::size_t>(m));
  auto spec = fftw_buffer<fftw_complex>(static_cast<std::size_t>(m / 2 + 1));
  const Plan fwd(m, in.get(), spec.get());
  const Plan inv(m, spec.get(), in.get());

  const double mu = x.mean();
  for (Index i = 0; i < n; ++i) in[static_cast<std::size_t>(i)] = x[i] - mu;
  std::fill(in.get() + n, in.get() + m, 0.0);
  fwd.execute();
  for (int k = 0; k <= m / 2; ++k) {
    const double re = spec[static_cast<std::size_t>(k)][0];
    const double im = spec[static_cast<std::size_t>(k)][1];
    spec[static_cast<std::size_t>(k)][0] = re * re + im * im;
    spec[static_cast<std::size_t>(k)][1] = 0.0;
  }
  inv.execute();
  Vector out(n);
  const double scale = 1.0 / (static_cast<double>(m) * static_cast<double>(n));
  for (Index i = 0; i < n; ++i) out[i] = in[static_cast<std::size_t>(i)] * scale;
  return out;
}

std::vector<Vector> rank_normalize(const std::vector<Vector>& chains) {
  std::size_t total = 0;
  for (const Vector& c : chains) total += static_cast<std::size_t>(c.size());
  std::vector<double> pooled;
  pooled.reserve(total);
  for (const Vector& c : chains) pooled.insert(pooled.end(), c.data(), c.data() + c.size());

  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
  std::vector<double> rank(total);
  for (std::size_t i = 0; i < total;) {
    std::size_t j = i;
    while (j + 1 < total && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
    i = j + 1;
  }

  const boost::math::normal_distribution<double> std_normal;
  const double denom = static_cast<double>(total) + 0.25;
  std::vector<Vector> out;
  std::size_t pos = 0;
  for (const Vector& c : chains) {
    Vector z(c.size());
    for (Index i = 0; i < c.size(); ++i) {
      z[i] = boost::math::quantile(std_normal, (rank[pos++] - 0.375) / denom);
    }
    out.push_back(std::move(z));
  }
  return out;
}

double bulk_ess(const std::vector<Vector>& chains) {
  check_chains(chains);
  const std::vector<Vector> split = split_chains(chains);
  if (all_equal(split)) throw DegenerateChainError("bulk ESS of a constant chain");
  return ess_core(rank_normalize(split));
}

double bulk_ess(const Vector& chain) { return bulk_ess(std::vector<Vector>{chain}); }

double mean_ess(const std::vector<Vector>& chains) {
  check_chains(chains);
  const std::vector<Vector> split = split_chains(chains);
  if (all_equal(split)) throw DegenerateChainError("ESS of a constant chain");
  return ess_core(split);
}

}  // namespace orthant
