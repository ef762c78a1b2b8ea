#include "orthant/sampler.hpp"

#include "orthant/dataset_io.hpp"
#include "orthant/errors.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

namespace orthant {

namespace {

using Index = Eigen::Index;

std::string describe_state(const Vector& x) {
  std::ostringstream os;
  os << "[";
  const Index shown = std::min<Index>(x.size(), 8);
  for (Index j = 0; j < shown; ++j) os << (j ? ", " : "") << x[j];
  if (shown < x.size()) os << ", ...";
  os << "]";
  return os.str();
}

double drift(const LikelihoodModel& model, const Vector& x, Vector& g) {
  const double v = log_posterior_and_grad(model, x, g);
  if (!g.allFinite()) throw NonFiniteError("non-finite drift at state " + describe_state(x));
  return v;
}

void euler_step(Vector& x, const Vector& g, double h, const Vector& xi, const Projection& proj) {
  x += h * g + std::sqrt(2.0 * h) * xi;
  proj.apply(x);
}

}  // namespace

std::string to_string(ProjectionKind k) { return k == ProjectionKind::orthant ? "orthant" : "good_set"; }

std::string to_string(InitKind k) {
  switch (k) {
    case InitKind::warm_start_noise: return "warm_start_noise";
    case InitKind::explicit_point: return "explicit";
    case InitKind::mode: return "mode";
  }
  return "?";
}

std::string to_string(StepScaling k) {
  return k == StepScaling::absolute ? "absolute" : "per_observation";
}

ProjectionKind parse_projection(const std::string& s) {
  if (s == "orthant") return ProjectionKind::orthant;
  if (s == "good_set") return ProjectionKind::good_set;
  throw ConfigError("unknown projection '" + s + "' (expected orthant or good_set)");
}

InitKind parse_init(const std::string& s) {
  if (s == "warm_start_noise" || s == "warm") return InitKind::warm_start_noise;
  if (s == "explicit") return InitKind::explicit_point;
  if (s == "mode") return InitKind::mode;
  throw ConfigError("unknown init '" + s + "' (expected warm, explicit or mode)");
}

StepScaling parse_step_scaling(const std::string& s) {
  if (s == "absolute") return StepScaling::absolute;
  if (s == "per_observation") return StepScaling::per_observation;
  throw ConfigError("unknown step scaling '" + s + "' (expected absolute or per_observation)");
}

double SamplerConfig::effective_step(std::size_t n) const {
  return step_scaling == StepScaling::absolute ? step_size : step_size / static_cast<double>(n);
}

void SamplerConfig::validate(std::size_t dim) const {
  if (!(step_size > 0.0) || !std::isfinite(step_size)) throw ConfigError("step size must be positive");
  if (n_steps < 1) throw ConfigError("n_steps must be >= 1");
  if (burn_in >= n_steps) throw ConfigError("burn_in must be smaller than n_steps");
  if (thin < 1) throw ConfigError("thin must be >= 1");
  if (!(init_scale >= 0.0)) throw ConfigError("init scale must be >= 0");
  if (projection == ProjectionKind::good_set) {
    if (!good_set) throw ConfigError("good_set projection needs a good set");
    require_size(good_set->dim(), dim, "good set");
  }
  require_size(static_cast<std::size_t>(init_point.size()), dim, "initial point");
}

Projection Projection::from_config(const SamplerConfig& c) {
  if (c.projection == ProjectionKind::good_set) return Projection(&*c.good_set);
  return Projection();
}

void Projection::apply(Vector& x) const {
  if (gs_) {
    project_good_set_inplace(*gs_, x);
  } else {
    project_orthant_inplace(x);
  }
}

bool Projection::contains(const Vector& x) const {
  return gs_ ? orthant::contains(*gs_, x) : in_orthant(x);
}

Vector plmc_step(const LikelihoodModel& model, const Vector& x, double h, const Vector& xi,
                 const Projection& projection) {
  require_size(static_cast<std::size_t>(x.size()), model.dim(), "state");
  require_size(static_cast<std::size_t>(xi.size()), model.dim(), "noise");
  if (!(h > 0.0)) throw ConfigError("step size must be positive");
  Vector g(x.size());
  drift(model, x, g);
  Vector y = x;
  euler_step(y, g, h, xi, projection);
  return y;
}

Vector plmc_step(const LikelihoodModel& model, const Vector& x, double h, Rng& rng,
                 const Projection& projection) {
  return plmc_step(model, x, h, rng.normal_vector(model.dim()), projection);
}

Vector initial_state(const SamplerConfig& config, std::size_t dim) {
  require_size(static_cast<std::size_t>(config.init_point.size()), dim, "initial point");
  Vector x = config.init_point;
  if (config.init == InitKind::warm_start_noise && config.init_scale > 0.0) {
    Rng rng(config.seed, {kStreamInit});
    x += config.init_scale * rng.normal_vector(dim);
  }
  Projection::from_config(config).apply(x);
  return x;
}

Chain run_chain(const LikelihoodModel& model, SamplerConfig config) {
  const std::size_t d = model.dim();
  config.validate(d);
  const auto t0 = std::chrono::steady_clock::now();

  Chain chain;
  chain.config = config;
  const Projection proj = Projection::from_config(chain.config);
  const double h = config.effective_step(model.n());
  const std::size_t rows = config.kept_rows();
  chain.samples.resize(static_cast<Index>(rows), static_cast<Index>(d));
  chain.log_post.resize(static_cast<Index>(rows));

  Rng rng(config.seed, {kStreamChain});
  Vector x = initial_state(config, d);
  Vector g(static_cast<Index>(d));
  Vector xi(static_cast<Index>(d));
  std::size_t row = 0;
  bool pending = false;  // previous step stored a row whose log_post is not yet known
  for (std::size_t t = 1; t <= config.n_steps + 1; ++t) {
    double lp;
    try {
      lp = drift(model, x, g);
    } catch (const NonFiniteError& e) {
      throw NonFiniteError("step " + std::to_string(t) + ": " + e.what());
    } catch (const DomainError& e) {
      throw DomainError("step " + std::to_string(t) + ": " + e.what());
    }
    if (pending) {
      chain.log_post[static_cast<Index>(row - 1)] = lp;
      pending = false;
    }
    if (t > config.n_steps) break;
    for (std::size_t j = 0; j < d; ++j) xi[static_cast<Index>(j)] = rng.normal();
    euler_step(x, g, h, xi, proj);
    if (t > config.burn_in && (t - config.burn_in) % config.thin == 0 && row < rows) {
      chain.samples.row(static_cast<Index>(row)) = x.transpose();
      ++row;
      pending = true;
    }
  }
  chain.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return chain;
}

TrialSeeds trial_seeds(std::uint64_t master, std::size_t trial) {
  return {derive_seed(master, {trial, kStreamData}), derive_seed(master, {trial, kStreamChain})};
}

std::vector<TrialResult> run_trials(const SimulationSpec& model_template,
                                    const std::vector<std::size_t>& trials,
                                    const SamplerConfig& config, std::uint64_t seed,
                                    const TrialPrepare& prepare, const TrialVisitor& visit,
                                    int jobs) {
  if (trials.empty()) throw ConfigError("run_trials needs at least one trial");
  std::vector<TrialResult> results(trials.size());
  const int threads = jobs > 0 ? jobs : 1;
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::size_t k = 0; k < trials.size(); ++k) {
    TrialResult& r = results[k];
    r.trial = trials[k];
    r.seeds = trial_seeds(seed, r.trial);
    try {
      const ModelInstance model = simulate(model_template, r.seeds.data);
      SamplerConfig c = config;
      c.seed = r.seeds.chain;
      if (c.init_point.size() == 0) c.init_point = model_template.theta_star;
      if (prepare) c = prepare(model, c);
      r.chain = run_chain(model, c);
      if (visit) visit(r, model);
    } catch (const std::exception& e) {
      r.error = e.what();
      r.chain.reset();
    }
  }
  return results;
}

std::vector<TrialResult> run_trials(const SimulationSpec& model_template, std::size_t n_trials,
                                    const SamplerConfig& config, std::uint64_t seed,
                                    const TrialPrepare& prepare, const TrialVisitor& visit,
                                    int jobs) {
  if (n_trials < 1) throw ConfigError("run_trials needs n_trials >= 1");
  std::vector<std::size_t> trials(n_trials);
  for (std::size_t t = 0; t < n_trials; ++t) trials[t] = t;
  return run_trials(model_template, trials, config, seed, prepare, visit, jobs);
}

void to_json(Json& j, const SamplerConfig& c) {
  j = Json{{"step_size", c.step_size},
           {"step_scaling", to_string(c.step_scaling)},
           {"n_steps", c.n_steps},
           {"burn_in", c.burn_in},
           {"thin", c.thin},
           {"projection", to_string(c.projection)},
           {"init", to_string(c.init)},
           {"init_scale", c.init_scale},
           {"init_point", to_json_array(c.init_point)},
           {"seed", c.seed}};
  if (c.good_set) j["good_set"] = *c.good_set;
}

Json chain_metadata(const Chain& chain) {
  return Json{{"config", chain.config},
              {"seed", chain.config.seed},
              {"runtime_ms", chain.runtime_ms},
              {"rows", chain.rows()},
              {"dim", chain.dim()},
              {"accept_all", chain.accept_all}};
}

void write_chain(const Chain& chain, const std::filesystem::path& csv_path) {
  if (csv_path.has_parent_path()) std::filesystem::create_directories(csv_path.parent_path());
  std::ofstream out(csv_path);
  if (!out) throw ConfigError("cannot write " + csv_path.string());
  for (std::size_t j = 0; j < chain.dim(); ++j) out << "theta_" << j << ",";
  out << "log_post\n";
  for (Index i = 0; i < chain.samples.rows(); ++i) {
    for (Index j = 0; j < chain.samples.cols(); ++j) out << format_double(chain.samples(i, j)) << ",";
    out << format_double(chain.log_post[i]) << "\n";
  }
  std::filesystem::path meta = csv_path;
  meta.replace_extension(".json");
  std::ofstream(meta) << chain_metadata(chain).dump(2) << "\n";
}

}  // namespace orthant
