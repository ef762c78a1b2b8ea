#include <doctest.h>

#include "orthant/errors.hpp"
#include "orthant/experiment.hpp"
#include "orthant/rng.hpp"

#include <cmath>

using namespace orthant;

TEST_CASE("preset values") {
  for (ModelKind m : {ModelKind::logistic, ModelKind::poisson, ModelKind::gmm}) {
    const ExperimentConfig pre = preset_config(Preset::pre_asymptotic, m);
    CHECK(pre.d == 200);
    CHECK(pre.n == 800);
    CHECK(pre.n_trials == 20);
    CHECK(pre.sampler.n_steps == 30000);
    CHECK(pre.sampler.burn_in == 20000);
    CHECK(pre.sampler.step_scaling == StepScaling::per_observation);
    CHECK(pre.sampler.init == InitKind::warm_start_noise);
    CHECK(pre.sampler.projection == ProjectionKind::orthant);
    CHECK(pre.sampler.step_size == (m == ModelKind::logistic ? 0.5 : 0.1));
    CHECK(pre.boundary_shift == 1.0);
    CHECK_NOTHROW(pre.validate());

    const ExperimentConfig as = preset_config(Preset::asymptotic, m);
    CHECK(as.d == 10);
    CHECK(as.n == 1000);
    CHECK(as.sampler.step_size == 0.001);
    CHECK(as.sampler.step_scaling == StepScaling::absolute);
    CHECK(as.sampler.init == InitKind::mode);
    CHECK_NOTHROW(as.validate());
  }
}

TEST_CASE("validate rejects changes to pinned values") {
  auto pre = preset_config(Preset::pre_asymptotic, ModelKind::logistic);
  pre.d = 100;
  CHECK_THROWS_AS(pre.validate(), ConfigError);
  pre = preset_config(Preset::pre_asymptotic, ModelKind::logistic);
  pre.n_trials = 5;
  CHECK_THROWS_AS(pre.validate(), ConfigError);
  pre = preset_config(Preset::pre_asymptotic, ModelKind::logistic);
  pre.sampler.step_size = 0.7;
  CHECK_THROWS_AS(pre.validate(), ConfigError);
  pre = preset_config(Preset::pre_asymptotic, ModelKind::logistic);
  pre.sampler.step_scaling = StepScaling::absolute;
  CHECK_THROWS_AS(pre.validate(), ConfigError);

  auto as = preset_config(Preset::asymptotic, ModelKind::poisson);
  as.n = 500;
  CHECK_THROWS_AS(as.validate(), ConfigError);
  as = preset_config(Preset::asymptotic, ModelKind::poisson);
  as.sampler.step_size = 0.02;
  CHECK_THROWS_AS(as.validate(), ConfigError);
  as = preset_config(Preset::asymptotic, ModelKind::poisson);
  as.sampler.burn_in = 100;
  CHECK_THROWS_AS(as.validate(), ConfigError);
  as = preset_config(Preset::asymptotic, ModelKind::poisson);
  as.sampler.step_size = 0.01;
  as.n_trials = 3;
  CHECK_NOTHROW(as.validate());

  auto custom = preset_config(Preset::custom, ModelKind::poisson);
  custom.d = 3;
  custom.n = 50;
  custom.sampler.step_size = 0.4;
  CHECK_NOTHROW(custom.validate());
  custom.sampler.burn_in = custom.sampler.n_steps;
  CHECK_THROWS_AS(custom.validate(), ConfigError);

  auto gmm = preset_config(Preset::custom, ModelKind::gmm);
  gmm.d = 9;
  gmm.k = 2;
  CHECK_THROWS_AS(gmm.validate(), ConfigError);
}

TEST_CASE("boundary indices") {
  CHECK(boundary_indices(ModelKind::logistic, 10) == std::vector<std::size_t>{5});
  CHECK(boundary_indices(ModelKind::poisson, 10) == std::vector<std::size_t>{9});
  CHECK(boundary_indices(ModelKind::gmm, 10) == std::vector<std::size_t>{7});
  CHECK(boundary_indices(ModelKind::poisson, 5).empty());
  const auto b = boundary_indices(ModelKind::logistic, 200);
  REQUIRE(b.size() == 10);
  for (std::size_t i = 0; i < b.size(); ++i) CHECK(b[i] == 5 + 20 * i);
}

TEST_CASE("preset theta_star") {
  const Vector lg = preset_theta_star(ModelKind::logistic, 10);
  for (Eigen::Index j = 0; j < 10; ++j) CHECK(lg[j] == doctest::Approx(j == 5 ? 0.0 : 2.0 / 3.0));
  const Vector lg200 = preset_theta_star(ModelKind::logistic, 200);
  CHECK(lg200[0] == doctest::Approx(2.0 / std::sqrt(190.0)));
  CHECK(lg200[25] == 0.0);

  const Vector po = preset_theta_star(ModelKind::poisson, 10);
  for (Eigen::Index j = 0; j < 10; ++j) CHECK(po[j] == (j == 9 ? 0.0 : 1.0));

  const Vector gm = preset_theta_star(ModelKind::gmm, 10, 2);
  const Vector want{{3, 3, 3, 3, 3, 1, 1, 0, 1, 1}};
  CHECK(gm.isApprox(want));
  CHECK_THROWS_AS(preset_theta_star(ModelKind::gmm, 10, 3), ConfigError);
}

TEST_CASE("simulation spec follows the config") {
  auto c = preset_config(Preset::asymptotic, ModelKind::gmm);
  const SimulationSpec s = simulation_spec(c);
  CHECK(s.n == 1000);
  REQUIRE(s.weights.size() == 2);
  CHECK(s.weights[0] == doctest::Approx(0.7));
  CHECK(s.covariances.size() == 2);
  CHECK(s.covariances[0].isIdentity());
  CHECK(s.boundary_shift == 1.0);
}

TEST_CASE("trial seeds") {
  const TrialSeeds a = trial_seeds(42, 3);
  CHECK(a.data == derive_seed(42, {3, kStreamData}));
  CHECK(a.chain == derive_seed(42, {3, kStreamChain}));
  CHECK(a.data != a.chain);
  CHECK(trial_seeds(42, 4).data != a.data);
  CHECK(trial_seeds(43, 3).data != a.data);
}

TEST_CASE("run directory") {
  auto c = preset_config(Preset::pre_asymptotic, ModelKind::poisson);
  c.output_dir = "out";
  c.seed = 17;
  CHECK(run_directory(c) == std::filesystem::path("out") / "pre_asymptotic_poisson_seed17");
}

TEST_CASE("config JSON") {
  auto c = preset_config(Preset::custom, ModelKind::poisson);
  c.d = 4;
  c.seed = 99;
  c.sampler.thin = 3;
  c.deltas.cbar1 = 2.5;
  const Json j = c;
  const ExperimentConfig back = experiment_from_json(j, preset_config(Preset::asymptotic, ModelKind::logistic));
  CHECK(Json(back) == j);
  CHECK(config_hash(j) == config_hash(Json(back)));
  CHECK(config_hash(j).size() == 16);

  Json other = j;
  other["seed"] = 100;
  CHECK(config_hash(other) != config_hash(j));

  SUBCASE("unknown fields") {
    Json bad = j;
    bad["stepsize"] = 1;
    CHECK_THROWS_AS(experiment_from_json(bad, c), ConfigError);
    bad = j;
    bad["sampler"]["warmup"] = 1;
    CHECK_THROWS_AS(experiment_from_json(bad, c), ConfigError);
  }
  SUBCASE("type errors name the field") {
    Json bad = j;
    bad["d"] = "ten";
    try {
      experiment_from_json(bad, c);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("'d'") != std::string::npos);
    }
  }
  SUBCASE("preset resets pinned fields before overrides") {
    const ExperimentConfig p = experiment_from_json(Json{{"preset", "pre_asymptotic"}, {"model", "gmm"}}, c);
    CHECK(p.d == 200);
    CHECK(p.sampler.step_size == 0.1);
    CHECK(p.sampler.init == InitKind::warm_start_noise);
    const ExperimentConfig q = experiment_from_json(Json{{"preset", "custom"}, {"d", 6}}, c);
    CHECK(q.d == 6);
  }
  CHECK_THROWS_AS(parse_preset("fast"), ConfigError);
}

TEST_CASE("run_ess_study respects only_trials and validates") {
  auto c = preset_config(Preset::custom, ModelKind::poisson);
  c.d = 3;
  c.n = 200;
  c.n_trials = 4;
  c.sampler.n_steps = 600;
  c.sampler.burn_in = 100;
  StudyOptions opts;
  opts.only_trials = {2};
  const auto rows = run_ess_study(c, opts);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].trial == 2);
  CHECK(rows[0].error.empty());
  CHECK(rows[0].seeds.data == trial_seeds(c.seed, 2).data);
  CHECK(rows[0].per_coordinate.size() == 3);

  opts.only_trials = {4};
  CHECK_THROWS_AS(run_ess_study(c, opts), ConfigError);
  c.sampler.burn_in = c.sampler.n_steps;
  CHECK_THROWS_AS(run_ess_study(c), ConfigError);
}

TEST_CASE("coverage study flags boundary coordinates") {
  auto c = preset_config(Preset::custom, ModelKind::poisson);
  c.n_trials = 2;
  c.sampler.n_steps = 800;
  c.sampler.burn_in = 200;
  const CoverageStudy s = run_coverage_study(c);
  CHECK(s.report.n_trials == 2);
  REQUIRE(s.report.boundary_flags.size() == 10);
  for (std::size_t j = 0; j < 10; ++j) CHECK(s.report.boundary_flags[j] == (j == 9));
  CHECK(s.theta_star.isApprox(preset_theta_star(ModelKind::poisson, 10)));
  for (Eigen::Index j = 0; j < 10; ++j) {
    CHECK(s.report.per_coordinate_coverage[j] >= 0.0);
    CHECK(s.report.per_coordinate_coverage[j] <= 1.0);
  }
}
