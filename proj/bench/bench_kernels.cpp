#include "orthant/models.hpp"
#include "orthant/models_reference.hpp"
#include "orthant/simulate.hpp"

#include <benchmark/benchmark.h>

#include <map>
#include <tuple>

using namespace orthant;

namespace {

ModelInstance make_model(ModelKind kind, std::size_t d, std::size_t n) {
  SimulationSpec s;
  s.kind = kind;
  s.n = n;
  s.boundary_shift = 1.0;
  if (kind == ModelKind::gmm) {
    const auto p = static_cast<Eigen::Index>(d / 2);
    s.theta_star = Vector::Ones(static_cast<Eigen::Index>(d));
    s.theta_star.head(p).setConstant(3.0);
    s.weights = Vector{{0.7, 0.3}};
    s.covariances.assign(2, Matrix::Identity(p, p));
  } else {
    s.theta_star = Vector::Constant(static_cast<Eigen::Index>(d), kind == ModelKind::poisson ? 1.0 : 0.1);
  }
  return simulate(s, 7);
}

const ModelInstance& cached(ModelKind kind, std::size_t d, std::size_t n) {
  static std::map<std::tuple<int, std::size_t, std::size_t>, ModelInstance> cache;
  const auto key = std::make_tuple(static_cast<int>(kind), d, n);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, make_model(kind, d, n)).first;
  return it->second;
}

ModelKind kind_arg(const benchmark::State& st) { return static_cast<ModelKind>(st.range(0)); }

void BM_GradParallel(benchmark::State& st) {
  const ModelInstance& m = cached(kind_arg(st), static_cast<std::size_t>(st.range(1)), 800);
  const Vector theta = Vector::Constant(static_cast<Eigen::Index>(m.dim()), 0.5);
  Vector g;
  for (auto _ : st) benchmark::DoNotOptimize(m.log_lik_and_grad(theta, g));
}

void BM_GradReference(benchmark::State& st) {
  const ModelInstance& m = cached(kind_arg(st), static_cast<std::size_t>(st.range(1)), 800);
  const Vector theta = Vector::Constant(static_cast<Eigen::Index>(m.dim()), 0.5);
  for (auto _ : st) {
    benchmark::DoNotOptimize(reference::log_lik(m, theta));
    benchmark::DoNotOptimize(reference::grad_log_lik(m, theta));
  }
}

void BM_HessParallel(benchmark::State& st) {
  const ModelInstance& m = cached(kind_arg(st), static_cast<std::size_t>(st.range(1)), 800);
  const Vector theta = Vector::Constant(static_cast<Eigen::Index>(m.dim()), 0.5);
  for (auto _ : st) benchmark::DoNotOptimize(m.hess_log_lik(theta));
}

void BM_HessReference(benchmark::State& st) {
  const ModelInstance& m = cached(kind_arg(st), static_cast<std::size_t>(st.range(1)), 800);
  const Vector theta = Vector::Constant(static_cast<Eigen::Index>(m.dim()), 0.5);
  for (auto _ : st) benchmark::DoNotOptimize(reference::hess_log_lik(m, theta));
}

// range(0): model kind, range(1): d
void kinds(benchmark::internal::Benchmark* b) {
  for (int k : {0, 1, 2}) {
    for (int d : {10, 200}) b->Args({k, d});
  }
}

}  // namespace

BENCHMARK(BM_GradParallel)->Apply(kinds);
BENCHMARK(BM_GradReference)->Apply(kinds);
BENCHMARK(BM_HessParallel)->Apply(kinds);
BENCHMARK(BM_HessReference)->Apply(kinds);

BENCHMARK_MAIN();
