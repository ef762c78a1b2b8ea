#include "orthant/experiment.hpp"

#include "orthant/errors.hpp"
#include "orthant/rng.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstdio>

namespace orthant {

namespace {

using Index = Eigen::Index;

std::vector<std::size_t> trial_list(const ExperimentConfig& cfg, const StudyOptions& opts) {
  if (!opts.only_trials.empty()) {
    for (std::size_t t : opts.only_trials) {
      if (t >= cfg.n_trials) throw ConfigError("trial index out of range");
    }
    return opts.only_trials;
  }
  std::vector<std::size_t> all(cfg.n_trials);
  for (std::size_t t = 0; t < cfg.n_trials; ++t) all[t] = t;
  return all;
}

std::size_t boundary_residue(ModelKind m) {
  switch (m) {
    case ModelKind::logistic: return 5;
    case ModelKind::poisson: return 9;
    case ModelKind::gmm: return 7;
  }
  return 0;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

Vector gmm_weights(std::size_t k) {
  if (k == 2) return Vector{{0.7, 0.3}};
  return Vector::Constant(static_cast<Index>(k), 1.0 / static_cast<double>(k));
}

SamplerConfig prepare_trial(const ExperimentConfig& cfg, const Vector& theta_star,
                            const ModelInstance& model, SamplerConfig c) {
  const bool need_mode = c.init == InitKind::mode || c.projection == ProjectionKind::good_set;
  if (!need_mode) return c;
  const ModeResult mode = locate_mode(model, theta_star, c.seed);
  if (c.init == InitKind::mode) c.init_point = mode.theta_hat;
  if (c.projection == ProjectionKind::good_set) {
    c.good_set = build_good_set(split_coordinates(mode.theta_hat), model.n(), cfg.deltas);
  }
  return c;
}

}  // namespace

std::string to_string(Preset p) {
  switch (p) {
    case Preset::pre_asymptotic: return "pre_asymptotic";
    case Preset::asymptotic: return "asymptotic";
    case Preset::custom: return "custom";
  }
  return "?";
}

Preset parse_preset(const std::string& s) {
  if (s == "pre_asymptotic") return Preset::pre_asymptotic;
  if (s == "asymptotic") return Preset::asymptotic;
  if (s == "custom") return Preset::custom;
  throw ConfigError("unknown preset '" + s + "' (expected pre_asymptotic, asymptotic or custom)");
}

ExperimentConfig preset_config(Preset preset, ModelKind model) {
  ExperimentConfig c;
  c.preset = preset;
  c.model = model;
  c.n_trials = 20;
  c.sampler.n_steps = 30000;
  c.sampler.burn_in = 20000;
  c.sampler.thin = 1;
  c.sampler.projection = ProjectionKind::orthant;
  if (preset == Preset::pre_asymptotic) {
    c.d = 200;
    c.n = 800;
    c.sampler.step_size = model == ModelKind::logistic ? 0.5 : 0.1;
    c.sampler.step_scaling = StepScaling::per_observation;
    c.sampler.init = InitKind::warm_start_noise;
    c.sampler.init_scale = 1.0;
  } else {
    c.d = 10;
    c.n = 1000;
    c.sampler.step_size = 0.001;
    c.sampler.step_scaling = StepScaling::absolute;
    c.sampler.init = InitKind::mode;
  }
  return c;
}

void ExperimentConfig::validate() const {
  require(d >= 1 && n >= 1, "d and n must be >= 1");
  require(n_trials >= 1, "n_trials must be >= 1");
  require(level > 0.0 && level < 1.0, "level must lie in (0, 1)");
  require(boundary_shift >= 0.0, "boundary_shift must be >= 0");
  require(jobs >= 1, "jobs must be >= 1");
  if (model == ModelKind::gmm) {
    require(k >= 1 && d % k == 0, "gmm d must be a multiple of k");
  }
  require(sampler.step_size > 0.0, "step size must be positive");
  require(sampler.burn_in < sampler.n_steps, "burn_in must be smaller than n_steps");
  require(sampler.thin >= 1, "thin must be >= 1");
  if (preset == Preset::pre_asymptotic) {
    require(d == 200 && n == 800, "pre_asymptotic preset pins d=200, n=800 (use preset custom)");
    require(n_trials == 20, "pre_asymptotic preset pins n_trials=20");
    require(sampler.n_steps == 30000 && sampler.burn_in == 20000,
            "pre_asymptotic preset pins n_steps=30000, burn_in=20000");
    require(sampler.step_size >= 0.1 && sampler.step_size <= 0.5,
            "pre_asymptotic step size must lie in [0.1, 0.5]");
    require(sampler.step_scaling == StepScaling::per_observation,
            "pre_asymptotic step sizes are per observation");
  } else if (preset == Preset::asymptotic) {
    require(d == 10 && n == 1000, "asymptotic preset pins d=10, n=1000 (use preset custom)");
    require(sampler.n_steps == 30000 && sampler.burn_in == 20000,
            "asymptotic preset pins n_steps=30000, burn_in=20000");
    require(sampler.step_size >= 0.001 && sampler.step_size <= 0.01,
            "asymptotic step size must lie in [0.001, 0.01]");
    require(sampler.step_scaling == StepScaling::absolute, "asymptotic step sizes are absolute");
  }
}

std::vector<std::size_t> boundary_indices(ModelKind model, std::size_t d) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < d; ++j) {
    if (j % 20 == boundary_residue(model)) out.push_back(j);
  }
  return out;
}

Vector preset_theta_star(ModelKind model, std::size_t d, std::size_t k) {
  const std::vector<std::size_t> zero = boundary_indices(model, d);
  Vector t(static_cast<Index>(d));
  switch (model) {
    case ModelKind::logistic:
      t.setConstant(2.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(d - zero.size(), 1))));
      break;
    case ModelKind::poisson:
      t.setOnes();
      break;
    case ModelKind::gmm: {
      if (k < 1 || d % k != 0) throw ConfigError("gmm d must be a multiple of k");
      const std::size_t p = d / k;
      for (std::size_t c = 0; c < k; ++c) {
        t.segment(static_cast<Index>(c * p), static_cast<Index>(p))
            .setConstant(1.0 + 2.0 * static_cast<double>(k - 1 - c));
      }
      break;
    }
  }
  for (std::size_t j : zero) t[static_cast<Index>(j)] = 0.0;
  return t;
}

SimulationSpec simulation_spec(const ExperimentConfig& cfg) {
  SimulationSpec s;
  s.kind = cfg.model;
  s.n = cfg.n;
  s.theta_star = preset_theta_star(cfg.model, cfg.d, cfg.k);
  s.boundary_shift = cfg.boundary_shift;
  if (cfg.model == ModelKind::gmm) {
    s.weights = gmm_weights(cfg.k);
    const auto p = static_cast<Index>(cfg.d / cfg.k);
    s.covariances.assign(cfg.k, Matrix::Identity(p, p));
  }
  return s;
}

std::filesystem::path run_directory(const ExperimentConfig& cfg) {
  return cfg.output_dir /
         (to_string(cfg.preset) + "_" + to_string(cfg.model) + "_seed" + std::to_string(cfg.seed));
}

Vector gmm_search_box(const GmmData& data) {
  const double top = data.X.cwiseAbs().maxCoeff() + 1.0;
  return Vector::Constant(static_cast<Index>(data.components() * data.ambient_dim()), top);
}

ModeResult locate_mode(const ModelInstance& model, const Vector& theta_star, std::uint64_t seed) {
  if (model.kind() == ModelKind::gmm) {
    AnnealOptions a;
    a.upper = gmm_search_box(model.gmm());
    return find_mode_global(model, a, derive_seed(seed, {kStreamAnneal}));
  }
  return find_mode_local(model, project_orthant(theta_star));
}

std::vector<TrialEss> run_ess_study(const ExperimentConfig& cfg, const StudyOptions& opts) {
  cfg.validate();
  const SimulationSpec spec = simulation_spec(cfg);
  const std::vector<std::size_t> trials = trial_list(cfg, opts);
  std::vector<TrialEss> out(cfg.n_trials);
  auto prepare = [&](const ModelInstance& m, SamplerConfig c) {
    return prepare_trial(cfg, spec.theta_star, m, std::move(c));
  };
  auto visit = [&](TrialResult& r, const ModelInstance&) {
    if (!opts.chain_dir.empty()) {
      write_chain(*r.chain, opts.chain_dir / (std::to_string(r.trial) + ".csv"));
    }
    const EssReport rep = ess_report(*r.chain);
    TrialEss& e = out[r.trial];
    e.per_coordinate = rep.per_coordinate;
    e.llr_ess = rep.llr_ess;
    e.median = rep.median();
    e.runtime_ms = r.chain->runtime_ms;
    r.chain.reset();
  };
  const auto results = run_trials(spec, trials, cfg.sampler, cfg.seed, prepare, visit, cfg.jobs);
  std::vector<TrialEss> ran;
  for (const TrialResult& r : results) {
    TrialEss e = out[r.trial];
    e.trial = r.trial;
    e.seeds = r.seeds;
    e.error = r.error;
    ran.push_back(std::move(e));
  }
  return ran;
}

CoverageStudy run_coverage_study(const ExperimentConfig& cfg, const StudyOptions& opts) {
  cfg.validate();
  const SimulationSpec spec = simulation_spec(cfg);
  CoverageStudy study;
  study.theta_star = spec.theta_star;
  const std::vector<std::size_t> trials = trial_list(cfg, opts);
  std::vector<TrialIntervals> slots(cfg.n_trials);
  auto prepare = [&](const ModelInstance& m, SamplerConfig c) {
    return prepare_trial(cfg, spec.theta_star, m, std::move(c));
  };
  auto visit = [&](TrialResult& r, const ModelInstance&) {
    if (!opts.chain_dir.empty()) {
      write_chain(*r.chain, opts.chain_dir / (std::to_string(r.trial) + ".csv"));
    }
    slots[r.trial].intervals = chain_intervals(*r.chain, cfg.level);
    r.chain.reset();
  };
  const auto results = run_trials(spec, trials, cfg.sampler, cfg.seed, prepare, visit, cfg.jobs);
  std::vector<std::vector<Interval>> intervals;
  for (const TrialResult& r : results) {
    TrialIntervals t = slots[r.trial];
    t.trial = r.trial;
    t.seeds = r.seeds;
    t.error = r.error;
    if (r.ok()) intervals.push_back(t.intervals);
    study.trials.push_back(std::move(t));
  }
  if (intervals.empty()) throw Error("every coverage trial failed: " + results.front().error);
  std::vector<bool> flags(cfg.d, false);
  for (std::size_t j : boundary_indices(cfg.model, cfg.d)) flags[j] = true;
  study.report = coverage_from_intervals(intervals, spec.theta_star, cfg.level, std::move(flags));
  return study;
}

void to_json(Json& j, const ExperimentConfig& c) {
  j = Json{{"preset", to_string(c.preset)},
           {"model", to_string(c.model)},
           {"d", c.d},
           {"n", c.n},
           {"k", c.k},
           {"n_trials", c.n_trials},
           {"level", c.level},
           {"boundary_shift", c.boundary_shift},
           {"output_dir", c.output_dir.string()},
           {"seed", c.seed},
           {"jobs", c.jobs},
           {"deltas", {{"cbar0", c.deltas.cbar0}, {"cbar1", c.deltas.cbar1}, {"eps", c.deltas.eps}}},
           {"sampler",
            {{"step_size", c.sampler.step_size},
             {"step_scaling", to_string(c.sampler.step_scaling)},
             {"n_steps", c.sampler.n_steps},
             {"burn_in", c.sampler.burn_in},
             {"thin", c.sampler.thin},
             {"projection", to_string(c.sampler.projection)},
             {"init", to_string(c.sampler.init)},
             {"init_scale", c.sampler.init_scale}}}};
}

ExperimentConfig experiment_from_json(const Json& j, ExperimentConfig base) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  std::string field;
  try {
    if (j.contains("preset") || j.contains("model")) {
      const Preset p = j.contains("preset") ? parse_preset(j.at("preset").get<std::string>()) : base.preset;
      const ModelKind m = j.contains("model") ? parse_model_kind(j.at("model").get<std::string>()) : base.model;
      const ExperimentConfig fresh = preset_config(p, m);
      base.preset = fresh.preset;
      base.model = fresh.model;
      base.d = fresh.d;
      base.n = fresh.n;
      base.n_trials = fresh.n_trials;
      base.sampler = fresh.sampler;
    }
    for (const auto& [key, value] : j.items()) {
      field = key;
      if (key == "preset" || key == "model") continue;
      if (key == "d") base.d = value.get<std::size_t>();
      else if (key == "n") base.n = value.get<std::size_t>();
      else if (key == "k") base.k = value.get<std::size_t>();
      else if (key == "n_trials") base.n_trials = value.get<std::size_t>();
      else if (key == "level") base.level = value.get<double>();
      else if (key == "boundary_shift") base.boundary_shift = value.get<double>();
      else if (key == "output_dir") base.output_dir = value.get<std::string>();
      else if (key == "seed") base.seed = value.get<std::uint64_t>();
      else if (key == "jobs") base.jobs = value.get<int>();
      else if (key == "deltas") {
        for (const auto& [dk, dv] : value.items()) {
          field = "deltas." + dk;
          if (dk == "cbar0") base.deltas.cbar0 = dv.get<double>();
          else if (dk == "cbar1") base.deltas.cbar1 = dv.get<double>();
          else if (dk == "eps") base.deltas.eps = dv.get<double>();
          else throw ConfigError("unknown field '" + field + "'");
        }
      } else if (key == "sampler") {
        SamplerConfig& s = base.sampler;
        for (const auto& [sk, sv] : value.items()) {
          field = "sampler." + sk;
          if (sk == "step_size") s.step_size = sv.get<double>();
          else if (sk == "step_scaling") s.step_scaling = parse_step_scaling(sv.get<std::string>());
          else if (sk == "n_steps") s.n_steps = sv.get<std::size_t>();
          else if (sk == "burn_in") s.burn_in = sv.get<std::size_t>();
          else if (sk == "thin") s.thin = sv.get<std::size_t>();
          else if (sk == "projection") s.projection = parse_projection(sv.get<std::string>());
          else if (sk == "init") s.init = parse_init(sv.get<std::string>());
          else if (sk == "init_scale") s.init_scale = sv.get<double>();
          else throw ConfigError("unknown field '" + field + "'");
        }
      } else {
        throw ConfigError("unknown field '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("field '" + field + "': " + e.what());
  }
  return base;
}

std::string config_hash(const Json& j) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json version_info() {
  return Json{{"orthant", "0.1.0"},
              {"compiler", __VERSION__},
              {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                            "." + std::to_string(EIGEN_MINOR_VERSION)},
              {"fftw", std::string(fftw_version)},
              {"openmp", static_cast<long>(_OPENMP)},
              {"rng", "mt19937_64 + splitmix64 stream keys"}};
}

}  // namespace orthant
