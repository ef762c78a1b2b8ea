#include "fixtures.hpp"
#include "oracles/closed_forms.hpp"
#include "oracles/spectral_2d.hpp"

#include "orthant/diagnostics.hpp"
#include "orthant/errors.hpp"
#include "orthant/ess.hpp"

#include <doctest.h>

#include <cmath>

using namespace orthant;

namespace {

Chain chain_from(const RowMatrix& samples) {
  Chain c;
  c.samples = samples;
  c.log_post = Vector::LinSpaced(samples.rows(), 0.0, 1.0);
  return c;
}

double log_gauss(double x) { return -0.5 * x * x; }

}  // namespace

TEST_CASE("bulk ESS of independent draws") {
  std::vector<double> ratios;
  for (std::uint64_t s = 0; s < 11; ++s) {
    std::vector<Vector> chains;
    for (std::uint64_t c = 0; c < 4; ++c) chains.push_back(oracle::iid_normal(1000, 100 * s + c));
    ratios.push_back(bulk_ess(chains) / 4000.0);
  }
  CHECK(std::abs(oracle::median(ratios) - 1.0) <= 0.2);
}

TEST_CASE("bulk ESS of an AR(1) chain") {
  std::vector<double> ess;
  for (std::uint64_t s = 0; s < 5; ++s) ess.push_back(bulk_ess(oracle::ar1_series(20000, 0.9, s)));
  const double truth = oracle::ar1_ess(20000.0, 0.9);
  CHECK(truth == doctest::Approx(1052.6).epsilon(1e-4));
  CHECK(std::abs(oracle::median(ess) - truth) <= 0.25 * truth);
}

TEST_CASE("bulk ESS edge cases") {
  CHECK_THROWS_AS(bulk_ess(Vector::Constant(100, 2.0)), DegenerateChainError);
  CHECK_THROWS_AS(bulk_ess(Vector::Ones(5)), ShapeError);
  CHECK_THROWS_AS(bulk_ess(std::vector<Vector>{Vector::Ones(20), Vector::Ones(30)}), ShapeError);
  Vector alt(1000);
  for (Eigen::Index i = 0; i < alt.size(); ++i) alt[i] = (i % 2 ? 1.0 : -1.0) * (1.0 + 0.01 * i);
  const double e = bulk_ess(alt);
  CHECK(e > 0.0);
  CHECK(e <= 1.5 * 1000.0);
  const Vector x = oracle::ar1_series(3000, 0.5, 9);
  CHECK(bulk_ess(x) > 0.0);
  CHECK(bulk_ess(x) <= 4500.0);
}

TEST_CASE("bulk ESS ignores strictly monotone transforms") {
  const Vector x = oracle::ar1_series(4000, 0.7, 1);
  const Vector y = x.array().exp();
  const Vector z = (-3.0 * x.array().cube()).matrix();
  CHECK(std::abs(bulk_ess(x) - bulk_ess(y)) <= 1e-10);
  CHECK(std::abs(bulk_ess(x) - bulk_ess(z)) <= 1e-10);
}

TEST_CASE("rank normalization uses the pinned offsets") {
  Vector a(8);
  a << 3.0, 1.0, 2.0, 2.0, 5.0, 4.0, 7.0, 6.0;
  const auto z = rank_normalize({a});
  // value 1 has rank 1; the tied 2s share rank 2.5
  CHECK(z[0][1] == doctest::Approx(oracle::normal_quantile((1.0 - 0.375) / 8.25)).epsilon(1e-10));
  CHECK(z[0][2] == doctest::Approx(oracle::normal_quantile((2.5 - 0.375) / 8.25)).epsilon(1e-10));
  CHECK(z[0][2] == z[0][3]);
}

TEST_CASE("autocovariance matches the direct sum") {
  const Vector x = oracle::ar1_series(257, 0.3, 4);
  const Vector ac = autocovariance(x);
  const double m = x.mean();
  for (int lag : {0, 1, 5, 100}) {
    double s = 0.0;
    for (Eigen::Index i = 0; i + lag < x.size(); ++i) s += (x[i] - m) * (x[i + lag] - m);
    CHECK(ac[lag] == doctest::Approx(s / x.size()).epsilon(1e-10));
  }
}

TEST_CASE("credible intervals") {
  const Interval c = credible_interval(Vector::Constant(10, 3.5), 0.9);
  CHECK(c.lo == 3.5);
  CHECK(c.hi == 3.5);

  const Interval k = credible_interval(Vector::LinSpaced(101, 0.0, 100.0), 0.9);
  CHECK(k.lo == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(k.hi == doctest::Approx(95.0).epsilon(1e-12));

  const Interval g = credible_interval(oracle::iid_normal(100000, 3), 0.95);
  const double q = oracle::normal_quantile(0.975);
  CHECK(q == doctest::Approx(1.959964).epsilon(1e-6));
  CHECK(std::abs(g.lo + q) <= 0.05);
  CHECK(std::abs(g.hi - q) <= 0.05);

  const Vector x = oracle::iid_normal(999, 8);
  for (double l1 = 0.05; l1 < 0.95; l1 += 0.1) {
    const Interval a = credible_interval(x, l1);
    const Interval b = credible_interval(x, l1 + 0.04);
    CHECK(b.lo <= a.lo);
    CHECK(a.hi <= b.hi);
  }
  CHECK_THROWS_AS(credible_interval(Vector::Ones(1), 0.9), ShapeError);
  CHECK_THROWS_AS(credible_interval(Vector::Ones(4), 1.0), ConfigError);
}

TEST_CASE("coverage counting") {
  const Vector truth = Vector::Constant(3, 1.0);
  std::vector<std::vector<Interval>> whole(5, std::vector<Interval>(3, {-INFINITY, INFINITY}));
  const CoverageReport all = coverage_from_intervals(whole, truth, 0.95, {});
  CHECK(all.per_coordinate_coverage == Vector::Ones(3));
  CHECK(all.n_trials == 5);

  std::vector<std::vector<Interval>> point(4, std::vector<Interval>(3, {2.0, 2.0}));
  CHECK(coverage_from_intervals(point, truth, 0.95, {}).per_coordinate_coverage == Vector::Zero(3));

  point[0][1] = {0.0, 1.0};
  point[2][1] = {1.0, 1.0};
  CHECK(coverage_from_intervals(point, truth, 0.95, {}).per_coordinate_coverage[1] == 0.5);

  CHECK_THROWS_AS(coverage_from_intervals(point, Vector::Ones(2), 0.95, {}), ShapeError);
}

TEST_CASE("coverage of an exact posterior sampler") {
  const std::size_t n = 500, d = 4;
  const Vector theta = Vector::Constant(d, 2.0);
  Rng rng(21);
  std::vector<Chain> chains;
  for (int t = 0; t < 20; ++t) {
    const Vector centre = theta + rng.normal_vector(d) / std::sqrt(double(n));
    RowMatrix s(4000, d);
    for (Eigen::Index i = 0; i < s.rows(); ++i)
      s.row(i) = (centre + rng.normal_vector(d) / std::sqrt(double(n))).transpose();
    chains.push_back(chain_from(s));
  }
  std::vector<const Chain*> ptrs;
  for (const auto& c : chains) ptrs.push_back(&c);
  CoordinateSplit split;
  split.regular = {0, 1, 2};
  split.boundary = {3};
  split.center = theta;
  const CoverageReport r = coverage_experiment(ptrs, theta, 0.95, split);
  CHECK(r.boundary_flags == std::vector<bool>{false, false, false, true});
  for (Eigen::Index j = 0; j < 4; ++j) {
    CHECK(r.per_coordinate_coverage[j] >= 0.8);
    CHECK(r.per_coordinate_coverage[j] <= 1.0);
  }
}

TEST_CASE("expectations of bounded functions") {
  RowMatrix s(5000, 1);
  const Vector x = oracle::ar1_series(5000, 0.6, 2);
  s.col(0) = x;
  const Chain c = chain_from(s);

  const Expectation one = estimate_expectation(c, [](const Vector&) { return 1.0; });
  CHECK(one.estimate == 1.0);
  CHECK(one.mc_stderr == 0.0);
  CHECK(estimate_expectation(c, [](const Vector& t) { return std::isfinite(t[0]) ? 1.0 : 0.0; }).estimate == 1.0);

  std::vector<double> v(x.data(), x.data() + x.size());
  const double med = oracle::median(v);
  const Expectation half = estimate_expectation(c, [med](const Vector& t) { return t[0] > med ? 1.0 : 0.0; });
  CHECK(half.mc_stderr > 0.0);
  CHECK(std::abs(half.estimate - 0.5) <= 3.0 * half.mc_stderr);
  CHECK(half.ess < 5000.0);

  CHECK_THROWS_AS(estimate_expectation(c, [](const Vector&) { return 1.5; }), RangeError);
}

TEST_CASE("good-set mass") {
  const CoordinateSplit split = split_coordinates(Eigen::Vector3d(1.0, 1.0, 0.0));
  const GoodSet gs = build_good_set(split, 1.0, 1.0, 8);  // r0 = 0.5, r1 = 0.125
  RowMatrix s(4, 3);
  s << 1.0, 1.0, 0.0, 1.2, 0.9, 0.1, 1.0, 1.0, 0.5, 3.0, 1.0, 0.0;
  CHECK(good_set_mass(s.topRows(2), gs) == 1.0);
  CHECK(good_set_mass(s, gs) == 0.5);
  CHECK_THROWS_AS(good_set_mass(RowMatrix(3, 2), gs), ShapeError);

  Rng rng(4);
  RowMatrix cloud(2000, 3);
  for (Eigen::Index i = 0; i < cloud.rows(); ++i) {
    cloud(i, 0) = 1.0 + 0.4 * rng.normal();
    cloud(i, 1) = 1.0 + 0.4 * rng.normal();
    cloud(i, 2) = std::abs(0.2 * rng.normal());
  }
  double prev = 0.0;
  for (double d0 = 0.2; d0 <= 3.0; d0 += 0.2) {
    const double m = good_set_mass(cloud, build_good_set(split, d0, 1.0, 8));
    CHECK(m >= prev);
    CHECK(m <= 1.0);
    prev = m;
  }
  prev = 0.0;
  for (double d1 = 0.2; d1 <= 3.0; d1 += 0.2) {
    const double m = good_set_mass(cloud, build_good_set(split, 1.0, d1, 8));
    CHECK(m >= prev);
    prev = m;
  }
}

TEST_CASE("ESS report skips constant coordinates") {
  RowMatrix s(200, 2);
  s.col(0) = oracle::ar1_series(200, 0.2, 1);
  s.col(1).setZero();
  Chain c = chain_from(s);
  c.log_post = oracle::ar1_series(200, 0.2, 2);
  const EssReport r = ess_report(c);
  CHECK(std::isnan(r.per_coordinate[1]));
  CHECK(r.degenerate == std::vector<std::size_t>{1});
  CHECK(r.median() == r.per_coordinate[0]);
  CHECK(r.n_kept == 200);
  const Json j = r;
  CHECK(j.at("per_coordinate")[1].is_null());
  c.log_post.setZero();
  CHECK_THROWS_AS(ess_report(c), DegenerateChainError);
}

TEST_CASE("spectral gap benchmarks") {
  const auto u = spectral_gap_1d([](double) { return 0.0; }, 0.0, 1.0, 10000);
  CHECK(std::abs(u.gap - M_PI * M_PI) <= 0.01 * M_PI * M_PI);
  CHECK(u.implied_C_PI == doctest::Approx(1.0 / u.gap));

  const auto g = spectral_gap_1d(log_gauss, -8.0, 8.0, 10000);
  CHECK(std::abs(g.gap - 1.0) <= 0.01);

  const auto e = spectral_gap_1d([](double t) { return -t; }, 0.0, 20.0, 10000);
  CHECK(e.gap >= 0.25);
  CHECK(e.implied_C_PI <= 4.0);

  CHECK_THROWS_AS(spectral_gap_1d(log_gauss, 0.0, 1.0, 99), ConfigError);
  CHECK_THROWS_AS(spectral_gap_1d([](double) { return NAN; }, 0.0, 1.0, 200), ConfigError);
  CHECK_THROWS_AS(spectral_gap_1d(log_gauss, 1.0, 0.0, 200), ConfigError);
}

TEST_CASE("spectral gap converges monotonically under refinement") {
  struct Case {
    std::function<double(double)> f;
    double a, b;
  };
  // Second order for the uniform and exponential targets: successive
  // differences keep their sign and shrink by 4.
  for (const auto& [f, a, b] :
       std::vector<Case>{{[](double) { return 0.0; }, 0.0, 1.0}, {[](double t) { return -t; }, 0.0, 20.0}}) {
    std::vector<double> gaps;
    for (std::size_t m : {250, 500, 1000, 2000}) gaps.push_back(spectral_gap_1d(f, a, b, m).gap);
    const double d1 = gaps[1] - gaps[0], d2 = gaps[2] - gaps[1], d3 = gaps[3] - gaps[2];
    CHECK(d1 * d2 > 0.0);
    CHECK(d2 * d3 > 0.0);
    CHECK(std::abs(d2 / d3) == doctest::Approx(4.0).epsilon(0.1));
  }
  // The Gaussian error falls much faster, by about 16 per halving.
  double prev = INFINITY;
  for (std::size_t m : {125, 250, 500}) {
    const double err = std::abs(spectral_gap_1d(log_gauss, -8.0, 8.0, m).gap - 1.0);
    CHECK(err < prev / 10.0);
    prev = err;
  }
  CHECK(prev < 1e-8);
}

TEST_CASE("tensorization: product gap is the smaller factor gap") {
  struct Pair {
    std::function<double(double)> f1, f2;
    double a1, b1, a2, b2;
  };
  const std::vector<Pair> pairs = {
      {[](double) { return 0.0; }, log_gauss, 0.0, 1.0, -6.0, 6.0},
      {[](double t) { return -t; }, log_gauss, 0.0, 12.0, -6.0, 6.0},
      {[](double t) { return -0.5 * t * t - 0.3 * std::cos(3.0 * t); }, [](double) { return 0.0; }, -6.0, 6.0, 0.0, 2.0},
  };
  const int m = 160;
  for (const auto& p : pairs) {
    const double g1 = spectral_gap_1d(p.f1, p.a1, p.b1, m).gap;
    const double g2 = spectral_gap_1d(p.f2, p.a2, p.b2, m).gap;
    const double g12 = oracle::spectral_gap_2d([&](double x, double y) { return p.f1(x) + p.f2(y); },
                                               p.a1, p.b1, p.a2, p.b2, m, m);
    CHECK(std::abs(g12 - std::min(g1, g2)) <= 0.02 * std::min(g1, g2));
  }
}

TEST_CASE("Holley-Stroock: bounded perturbations") {
  Rng rng(13);
  const std::size_t m = 2000;
  const double a = -6.0, b = 6.0;
  const double base = spectral_gap_1d(log_gauss, a, b, m).implied_C_PI;
  for (int t = 0; t < 20; ++t) {
    const double amp = rng.uniform(0.05, 1.5), freq = rng.uniform(0.5, 4.0), phase = rng.uniform(0.0, 6.3);
    const double amp2 = rng.uniform(0.0, 0.5), freq2 = rng.uniform(4.0, 9.0);
    auto phi = [=](double x) { return amp * std::sin(freq * x + phase) + amp2 * std::cos(freq2 * x); };
    double lo = INFINITY, hi = -INFINITY;
    const double dx = (b - a) / static_cast<double>(m);
    for (std::size_t i = 0; i <= 2 * m; ++i) {
      const double v = phi(a + 0.5 * dx * static_cast<double>(i));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double osc = hi - lo;
    const double pert = spectral_gap_1d([&](double x) { return log_gauss(x) + phi(x); }, a, b, m).implied_C_PI;
    CHECK(pert <= std::exp(osc) * base);
    CHECK(pert >= std::exp(-osc) * base);
  }
}

TEST_CASE("reports serialize") {
  const auto g = spectral_gap_1d(log_gauss, -8.0, 8.0, 200);
  const Json j = g;
  CHECK(j.at("domain")[0] == -8.0);
  CHECK(j.contains("implied_C_PI"));
  const CoverageReport c =
      coverage_from_intervals({{Interval{0.0, 1.0}}}, Vector::Constant(1, 0.5), 0.9, {true});
  const Json jc = c;
  CHECK(jc.at("boundary_flags")[0] == true);
}
