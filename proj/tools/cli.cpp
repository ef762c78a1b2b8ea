#include "cli.hpp"

#include "orthant/assumptions.hpp"
#include "orthant/dataset_io.hpp"
#include "orthant/diagnostics.hpp"
#include "orthant/errors.hpp"
#include "orthant/experiment.hpp"
#include "orthant/rng.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

namespace orthant::cli {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Options {
  std::string config_path;
  std::string preset;
  std::string model;
  std::size_t d = 0, n = 0, k = 0, trials = 0, steps = 0, burn_in = 0, thin = 0;
  std::uint64_t seed = 0;
  std::string out = "runs";
  int jobs = 1;
  double step = 0.0, init_scale = 0.0, level = 0.0, boundary_shift = 0.0;
  double cbar0 = 0.0, cbar1 = 0.0, eps = 0.0;
  std::string projection, init, step_scaling;

  std::size_t trial = 0;
  std::vector<std::size_t> only_trials;
  std::string data;
  std::vector<std::string> chains;
  std::size_t grid = 256;
  std::size_t outside = 2000;
  double min_curvature = 0.0;
  double min_slope = 0.0;
  int factor = 4;
  std::string benchmark = "exponential";
  double rate = 1.0, a = 0.0, b = 0.0;
  std::size_t gap_grid = 10000;
};

class Flags {
 public:
  explicit Flags(CLI::App* app) : app_(app) {}
  bool set(const std::string& name) const { return app_->count(name) > 0; }

 private:
  CLI::App* app_;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config_path, "JSON config file (flags win)");
  sub->add_option("--preset", o.preset, "pre_asymptotic | asymptotic | custom");
  sub->add_option("--model", o.model, "logistic | poisson | gmm");
  sub->add_option("--d", o.d, "parameter dimension");
  sub->add_option("--n", o.n, "sample size");
  sub->add_option("--k", o.k, "GMM components");
  sub->add_option("--trials", o.trials, "number of trials");
  sub->add_option("--seed", o.seed, "master seed (ORTHANT_GIBBS_SEED overrides)");
  sub->add_option("--out", o.out, "output root directory");
  sub->add_option("--jobs", o.jobs, "concurrent trials");
  sub->add_option("--step", o.step, "step size");
  sub->add_option("--step-scaling", o.step_scaling, "absolute | per_observation");
  sub->add_option("--steps", o.steps, "total chain steps");
  sub->add_option("--burn-in", o.burn_in, "discarded steps");
  sub->add_option("--thin", o.thin, "thinning interval");
  sub->add_option("--projection", o.projection, "orthant | good_set");
  sub->add_option("--init", o.init, "warm | explicit | mode");
  sub->add_option("--init-scale", o.init_scale, "warm-start noise scale");
  sub->add_option("--level", o.level, "credible level");
  sub->add_option("--boundary-shift", o.boundary_shift, "boundary misspecification strength");
  sub->add_option("--cbar0", o.cbar0, "delta0 multiplier");
  sub->add_option("--cbar1", o.cbar1, "delta1 multiplier");
  sub->add_option("--eps", o.eps, "concentration level epsilon");
}

Json read_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t upto = std::min(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw ConfigError(path.string() + ":" + std::to_string(line) + ": " + e.what());
  }
}

ExperimentConfig load_config(const Options& o, const Flags& f) {
  Json j = Json::object();
  if (!o.config_path.empty()) j = read_config_file(o.config_path);
  if (!j.is_object()) throw ConfigError(o.config_path + ": config must be a JSON object");
  if (f.set("--preset")) j["preset"] = o.preset;
  if (f.set("--model")) j["model"] = o.model;
  if (!j.contains("preset")) j["preset"] = "asymptotic";

  ExperimentConfig c = experiment_from_json(j, preset_config(Preset::asymptotic, ModelKind::logistic));
  if (f.set("--d")) c.d = o.d;
  if (f.set("--n")) c.n = o.n;
  if (f.set("--k")) c.k = o.k;
  if (f.set("--trials")) c.n_trials = o.trials;
  if (f.set("--seed")) c.seed = o.seed;
  if (f.set("--out")) c.output_dir = o.out;
  if (f.set("--jobs")) c.jobs = o.jobs;
  if (f.set("--step")) c.sampler.step_size = o.step;
  if (f.set("--step-scaling")) c.sampler.step_scaling = parse_step_scaling(o.step_scaling);
  if (f.set("--steps")) c.sampler.n_steps = o.steps;
  if (f.set("--burn-in")) c.sampler.burn_in = o.burn_in;
  if (f.set("--thin")) c.sampler.thin = o.thin;
  if (f.set("--projection")) c.sampler.projection = parse_projection(o.projection);
  if (f.set("--init")) c.sampler.init = parse_init(o.init);
  if (f.set("--init-scale")) c.sampler.init_scale = o.init_scale;
  if (f.set("--level")) c.level = o.level;
  if (f.set("--boundary-shift")) c.boundary_shift = o.boundary_shift;
  if (f.set("--cbar0")) c.deltas.cbar0 = o.cbar0;
  if (f.set("--cbar1")) c.deltas.cbar1 = o.cbar1;
  if (f.set("--eps")) c.deltas.eps = o.eps;
  if (const char* env = std::getenv("ORTHANT_GIBBS_SEED")) {
    try {
      std::size_t used = 0;
      c.seed = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
    } catch (const std::exception&) {
      throw ConfigError(std::string("ORTHANT_GIBBS_SEED is not an unsigned integer: ") + env);
    }
  }
  c.validate();
  return c;
}

class Manifest {
 public:
  Manifest(std::string command, const ExperimentConfig& cfg) : start_(Clock::now()) {
    j_["command"] = std::move(command);
    j_["config"] = cfg;
    j_["config_hash"] = config_hash(j_["config"]);
    j_["seeds"] = {{"master", cfg.seed}, {"trials", Json::array()}};
    j_["versions"] = version_info();
    j_["failures"] = Json::array();
    j_["outputs"] = Json::array();
  }

  void trial(std::size_t t, const TrialSeeds& s) {
    j_["seeds"]["trials"].push_back({{"trial", t}, {"data", s.data}, {"chain", s.chain}});
  }
  void failure(std::size_t t, const std::string& what) {
    j_["failures"].push_back({{"trial", t}, {"error", what}});
  }
  void output(const fs::path& p) { j_["outputs"].push_back(p.filename().string()); }
  Json& extra() { return j_; }

  void write(const fs::path& dir) {
    j_["wall_time_ms"] = std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
    fs::create_directories(dir);
    std::ofstream(dir / "manifest.json") << j_.dump(2) << "\n";
  }

 private:
  Json j_;
  Clock::time_point start_;
};

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw ConfigError("cannot write " + p.string());
  return out;
}

void write_json(const fs::path& p, const Json& j) { open_out(p) << j.dump(2) << "\n"; }

struct LoadedModel {
  std::optional<ModelInstance> model;
  Vector theta_star;  // empty when the data were read from disk
  TrialSeeds seeds;
};

LoadedModel obtain_model(const Options& o, const ExperimentConfig& cfg) {
  LoadedModel m;
  if (!o.data.empty()) {
    m.model.emplace(read_dataset(cfg.model, o.data));
    return m;
  }
  const SimulationSpec spec = simulation_spec(cfg);
  m.seeds = trial_seeds(cfg.seed, o.trial);
  m.model.emplace(simulate(spec, m.seeds.data));
  m.theta_star = spec.theta_star;
  return m;
}

ModeResult mode_for(const LoadedModel& m, std::uint64_t seed) {
  Vector init = m.theta_star;
  if (init.size() == 0) init = Vector::Ones(static_cast<Eigen::Index>(m.model->dim()));
  return locate_mode(*m.model, init, seed);
}

int cmd_simulate(const Options& o, const Flags& f) {
  const ExperimentConfig cfg = load_config(o, f);
  const SimulationSpec spec = simulation_spec(cfg);
  const TrialSeeds seeds = trial_seeds(cfg.seed, o.trial);
  const ModelInstance model = simulate(spec, seeds.data);
  const fs::path dir = run_directory(cfg);
  Manifest man("simulate", cfg);
  man.trial(o.trial, seeds);
  for (const fs::path& p : write_dataset(model, dir / "data" / ("trial_" + std::to_string(o.trial) + ".csv"))) {
    man.output(p);
  }
  write_json(dir / "data" / ("model_" + std::to_string(o.trial) + ".json"),
             Json{{"kind", to_string(cfg.model)},
                  {"d", model.dim()},
                  {"n", model.n()},
                  {"seed", seeds.data},
                  {"master_seed", cfg.seed},
                  {"trial", o.trial},
                  {"theta_star", to_json_array(spec.theta_star)},
                  {"boundary_shift", cfg.boundary_shift},
                  {"prior", model.prior().describe()}});
  man.write(dir);
  std::cout << "wrote " << (dir / "data").string() << "\n";
  return kOk;
}

int cmd_mode(const Options& o, const Flags& f) {
  const ExperimentConfig cfg = load_config(o, f);
  const LoadedModel m = obtain_model(o, cfg);
  const ModeResult r = mode_for(m, m.seeds.chain);
  const fs::path dir = run_directory(cfg);
  Manifest man("mode", cfg);
  if (o.data.empty()) man.trial(o.trial, m.seeds);
  write_json(dir / "mode.json", r);
  man.output(dir / "mode.json");
  man.write(dir);
  std::printf("objective %.17g  grad_norm %.3g  iterations %zu  converged %s\n", r.objective, r.grad_norm,
              r.iterations, r.converged ? "yes" : "no");
  return kOk;
}

int cmd_check(const Options& o, const Flags& f) {
  const ExperimentConfig cfg = load_config(o, f);
  const LoadedModel m = obtain_model(o, cfg);
  const ModeResult mode = mode_for(m, m.seeds.chain);
  const CoordinateSplit split = split_coordinates(mode.theta_hat);
  const GoodSet gs = build_good_set(split, m.model->n(), cfg.deltas);
  const RegionSpec region = RegionSpec::from_good_set(gs, o.grid, cfg.seed);
  if (o.factor != 4 && o.factor != 16) throw ConfigError("--factor must be 4 or 16");
  AssumptionReport rep = estimate_constants(
      *m.model, region, NormMethod::power_with_fallback,
      o.factor == 16 ? PoincareFactor::random_gibbs : PoincareFactor::deterministic);

  Vector box = m.model->kind() == ModelKind::gmm ? gmm_search_box(m.model->gmm())
                                                 : Vector(mode.theta_hat.array() + 1.0);
  const WellSeparation ws = check_well_separation(*m.model, mode, region, box, o.outside, cfg.seed);
  rep.zeta_hat = ws.zeta_hat;

  const fs::path dir = run_directory(cfg);
  Manifest man("check", cfg);
  if (o.data.empty()) man.trial(o.trial, m.seeds);
  write_json(dir / "assumptions.json",
             Json{{"report", rep}, {"good_set", gs}, {"mode", mode}, {"well_separation", ws}});
  man.output(dir / "assumptions.json");

  std::vector<std::string> failed;
  if (rep.c_S0_hat && !(*rep.c_S0_hat > o.min_curvature)) failed.push_back("local strong concavity");
  if (rep.C_S1_hat && !(*rep.C_S1_hat > o.min_slope)) failed.push_back("negative boundary gradient");
  if (!ws.separated()) failed.push_back("well-separated mode");
  man.extra()["failed_checks"] = failed;
  man.write(dir);

  auto show = [](const std::optional<double>& v) {
    char buf[32];
    if (!v) return std::string("n/a");
    std::snprintf(buf, sizeof buf, "%.6g", *v);
    return std::string(buf);
  };
  std::printf("%-22s %s\n", "d0 / d1", (std::to_string(rep.d0) + " / " + std::to_string(rep.d1)).c_str());
  std::printf("%-22s %.6g / %.6g\n", "r0 / r1", gs.r0, gs.r1);
  std::printf("%-22s %s\n", "c_S0_hat", show(rep.c_S0_hat).c_str());
  std::printf("%-22s %s\n", "C_S1_hat", show(rep.C_S1_hat).c_str());
  std::printf("%-22s %.6g\n", "s2_hat", rep.s2_hat);
  std::printf("%-22s %.6g\n", "osc_bound", rep.osc_bound);
  std::printf("%-22s %.6g\n", "C_PI_bound", rep.C_PI_bound);
  std::printf("%-22s %.6g (heuristic)\n", "zeta_hat", ws.zeta_hat);
  std::printf("%-22s %zu points, seed %llu\n", "grid", rep.grid, static_cast<unsigned long long>(rep.seed));
  for (const std::string& w : gs.warnings) std::printf("warning: %s\n", w.c_str());
  for (const std::string& fname : failed) std::printf("FAILED: %s\n", fname.c_str());
  return failed.empty() ? kOk : kAssumptionFailure;
}

void write_ess_tables(const fs::path& dir, const std::vector<TrialEss>& rows, Manifest& man) {
  auto per = open_out(dir / "ess_per_coordinate.csv");
  auto llr = open_out(dir / "llr_ess.csv");
  per << "trial,coordinate,ess\n";
  llr << "trial,ess\n";
  for (const TrialEss& t : rows) {
    man.trial(t.trial, t.seeds);
    if (!t.error.empty()) {
      man.failure(t.trial, t.error);
      continue;
    }
    for (Eigen::Index j = 0; j < t.per_coordinate.size(); ++j) {
      per << t.trial << "," << j << "," << format_double(t.per_coordinate[j]) << "\n";
    }
    llr << t.trial << "," << format_double(t.llr_ess) << "\n";
  }
  man.output(dir / "ess_per_coordinate.csv");
  man.output(dir / "llr_ess.csv");
}

void print_ess_summary(const std::vector<TrialEss>& rows) {
  for (const TrialEss& t : rows) {
    if (t.error.empty()) {
      std::printf("trial %2zu  median ESS %9.1f  LLR ESS %9.1f  %.0f ms\n", t.trial, t.median, t.llr_ess,
                  t.runtime_ms);
    } else {
      std::printf("trial %2zu  FAILED: %s\n", t.trial, t.error.c_str());
    }
  }
}

int cmd_sample(const Options& o, const Flags& f) {
  const ExperimentConfig cfg = load_config(o, f);
  const fs::path dir = run_directory(cfg);
  StudyOptions opts;
  opts.chain_dir = dir / "chains";
  opts.only_trials = o.only_trials;
  Manifest man("sample", cfg);
  const auto rows = run_ess_study(cfg, opts);
  write_ess_tables(dir, rows, man);
  man.write(dir);
  print_ess_summary(rows);
  return kOk;
}

Chain read_chain_csv(const fs::path& path) {
  const CsvTable t = read_csv(path);
  if (t.header.size() < 2 || t.header.back() != "log_post") {
    throw ConfigError(path.string() + ": expected columns theta_0..theta_{d-1},log_post");
  }
  Chain c;
  const auto d = static_cast<Eigen::Index>(t.header.size() - 1);
  c.samples.resize(static_cast<Eigen::Index>(t.rows.size()), d);
  c.log_post.resize(static_cast<Eigen::Index>(t.rows.size()));
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    for (Eigen::Index j = 0; j < d; ++j) c.samples(static_cast<Eigen::Index>(i), j) = t.rows[i][static_cast<std::size_t>(j)];
    c.log_post[static_cast<Eigen::Index>(i)] = t.rows[i].back();
  }
  return c;
}

int cmd_ess(const Options& o, const Flags& f) {
  const ExperimentConfig cfg = load_config(o, f);
  const fs::path dir = run_directory(cfg);
  Manifest man("ess", cfg);
  std::vector<TrialEss> rows;
  if (!o.chains.empty()) {
    for (std::size_t t = 0; t < o.chains.size(); ++t) {
      TrialEss e;
      e.trial = t;
      try {
        const EssReport r = ess_report(read_chain_csv(o.chains[t]));
        e.per_coordinate = r.per_coordinate;
        e.llr_ess = r.llr_ess;
        e.median = r.median();
      } catch (const Error& err) {
        e.error = err.what();
      }
      rows.push_back(std::move(e));
    }
    man.extra()["chains"] = o.chains;
  } else {
    StudyOptions opts;
    opts.only_trials = o.only_trials;
    rows = run_ess_study(cfg, opts);
  }
  write_ess_tables(dir, rows, man);
  man.write(dir);
  print_ess_summary(rows);
  return kOk;
}

int cmd_coverage(const Options& o, const Flags& f) {
  const ExperimentConfig cfg = load_config(o, f);
  const fs::path dir = run_directory(cfg);
  StudyOptions opts;
  opts.only_trials = o.only_trials;
  Manifest man("coverage", cfg);
  const CoverageStudy study = run_coverage_study(cfg, opts);
  for (const TrialIntervals& t : study.trials) {
    man.trial(t.trial, t.seeds);
    if (!t.error.empty()) man.failure(t.trial, t.error);
  }
  {
    auto out = open_out(dir / "coverage.csv");
    out << "coordinate,coverage,is_boundary\n";
    const CoverageReport& r = study.report;
    for (Eigen::Index j = 0; j < r.per_coordinate_coverage.size(); ++j) {
      out << j << "," << format_double(r.per_coordinate_coverage[j]) << ","
          << (r.boundary_flags[static_cast<std::size_t>(j)] ? 1 : 0) << "\n";
    }
  }
  write_json(dir / "coverage.json", Json{{"report", study.report}, {"theta_star", to_json_array(study.theta_star)}});
  man.output(dir / "coverage.csv");
  man.output(dir / "coverage.json");
  man.write(dir);
  const CoverageReport& r = study.report;
  for (Eigen::Index j = 0; j < r.per_coordinate_coverage.size(); ++j) {
    std::printf("coordinate %3td  coverage %.2f%s\n", j, r.per_coordinate_coverage[j],
                r.boundary_flags[static_cast<std::size_t>(j)] ? "  [boundary]" : "");
  }
  return kOk;
}

int cmd_gap(const Options& o, const Flags& f) {
  std::function<double(double)> logd;
  double a = 0.0, b = 1.0;
  std::optional<double> bound;
  if (o.benchmark == "uniform") {
    logd = [](double) { return 0.0; };
  } else if (o.benchmark == "gaussian") {
    logd = [](double x) { return -0.5 * x * x; };
    a = -8.0;
    b = 8.0;
  } else if (o.benchmark == "exponential") {
    if (!(o.rate > 0.0)) throw ConfigError("--rate must be positive");
    const double rate = o.rate;
    logd = [rate](double x) { return -rate * x; };
    b = 20.0 / rate;
    bound = 4.0 / (rate * rate);
  } else {
    throw ConfigError("unknown benchmark '" + o.benchmark + "' (expected uniform, gaussian or exponential)");
  }
  if (f.set("--a")) a = o.a;
  if (f.set("--b")) b = o.b;
  const SpectralGapResult r = spectral_gap_1d(logd, a, b, o.gap_grid);

  const fs::path dir = fs::path(o.out) / ("gap_" + o.benchmark);
  Json j = r;
  j["benchmark"] = o.benchmark;
  if (bound) {
    j["C_PI_bound"] = *bound;
    j["within_bound"] = r.implied_C_PI <= *bound;
  }
  write_json(dir / "gap.json", j);
  {
    auto out = open_out(dir / "gap.csv");
    out << "benchmark,grid_points,a,b,gap,implied_C_PI\n";
    out << o.benchmark << "," << r.grid_points << "," << format_double(r.a) << "," << format_double(r.b) << ","
        << format_double(r.gap) << "," << format_double(r.implied_C_PI) << "\n";
  }
  std::printf("gap %.10g  implied_C_PI %.10g\n", r.gap, r.implied_C_PI);
  return bound && r.implied_C_PI > *bound ? kAssumptionFailure : kOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Projected Langevin sampling on the non-negative orthant"};
  app.require_subcommand(1);
  Options o;

  std::map<std::string, std::function<int(const Options&, const Flags&)>> handlers{
      {"simulate", cmd_simulate}, {"mode", cmd_mode},         {"check", cmd_check}, {"sample", cmd_sample},
      {"ess", cmd_ess},           {"coverage", cmd_coverage}, {"gap", cmd_gap}};
  std::map<std::string, CLI::App*> subs;
  subs["simulate"] = app.add_subcommand("simulate", "draw a synthetic dataset");
  subs["mode"] = app.add_subcommand("mode", "locate the mode on the orthant");
  subs["check"] = app.add_subcommand("check", "estimate local constants and bounds");
  subs["sample"] = app.add_subcommand("sample", "run the chains of a study and export them");
  subs["ess"] = app.add_subcommand("ess", "bulk ESS per coordinate and of the log posterior");
  subs["coverage"] = app.add_subcommand("coverage", "frequentist coverage of credible intervals");
  subs["gap"] = app.add_subcommand("gap", "1-D spectral gap benchmark");

  for (const char* name : {"simulate", "mode", "check", "sample", "ess", "coverage"}) add_common(subs[name], o);
  for (const char* name : {"simulate", "mode", "check"}) {
    subs[name]->add_option("--trial", o.trial, "trial index whose dataset is simulated");
  }
  for (const char* name : {"mode", "check"}) subs[name]->add_option("--data", o.data, "dataset CSV instead of simulation");
  for (const char* name : {"sample", "ess", "coverage"}) {
    subs[name]->add_option("--only-trial", o.only_trials, "run only these trial indices");
  }
  subs["ess"]->add_option("--chains", o.chains, "chain CSV files (one per trial)");
  subs["check"]->add_option("--grid", o.grid, "region grid size");
  subs["check"]->add_option("--outside-samples", o.outside, "samples for the well-separation check");
  subs["check"]->add_option("--min-curvature", o.min_curvature, "required c_S0_hat");
  subs["check"]->add_option("--min-boundary-slope", o.min_slope, "required C_S1_hat");
  subs["check"]->add_option("--factor", o.factor, "4 (deterministic) or 16 (random Gibbs)");
  CLI::App* gap = subs["gap"];
  gap->add_option("--benchmark", o.benchmark, "uniform | gaussian | exponential");
  gap->add_option("--rate", o.rate, "exponential rate");
  gap->add_option("--a", o.a, "left end");
  gap->add_option("--b", o.b, "right end");
  gap->add_option("--grid", o.gap_grid, "grid points");
  gap->add_option("--out", o.out, "output root directory");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kHardError;
  }
  try {
    for (auto& [name, sub] : subs) {
      if (sub->parsed()) return handlers.at(name)(o, Flags(sub));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kHardError;
  }
  return kHardError;
}

}  // namespace orthant::cli
