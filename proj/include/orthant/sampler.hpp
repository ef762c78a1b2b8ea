#pragma once

#include "orthant/geometry.hpp"
#include "orthant/json_io.hpp"
#include "orthant/models.hpp"
#include "orthant/rng.hpp"
#include "orthant/simulate.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace orthant {

enum class ProjectionKind { orthant, good_set };
enum class InitKind {
  warm_start_noise,  // init_point + init_scale * N(0, I), then projected
  explicit_point,    // init_point, projected
  mode,              // init_point taken as the mode, projected
};
// How the configured step size maps to the Euler step: `absolute` uses h as
// given, `per_observation` uses h / n.
enum class StepScaling { absolute, per_observation };

std::string to_string(ProjectionKind k);
std::string to_string(InitKind k);
std::string to_string(StepScaling k);
ProjectionKind parse_projection(const std::string& s);
InitKind parse_init(const std::string& s);
StepScaling parse_step_scaling(const std::string& s);

struct SamplerConfig {
  double step_size = 1e-3;
  StepScaling step_scaling = StepScaling::absolute;
  std::size_t n_steps = 30000;
  std::size_t burn_in = 20000;
  std::size_t thin = 1;
  ProjectionKind projection = ProjectionKind::orthant;
  std::optional<GoodSet> good_set;  // required for ProjectionKind::good_set
  InitKind init = InitKind::warm_start_noise;
  double init_scale = 1.0;
  Vector init_point;
  std::uint64_t seed = 0;

  double effective_step(std::size_t n) const;
  std::size_t kept_rows() const { return (n_steps - burn_in) / thin; }
  // Throws ConfigError on an inconsistent configuration.
  void validate(std::size_t dim) const;
};

// The set a chain is projected onto.
class Projection {
 public:
  Projection() = default;
  explicit Projection(const GoodSet* gs) : gs_(gs) {}
  static Projection from_config(const SamplerConfig& c);

  void apply(Vector& x) const;
  bool contains(const Vector& x) const;

 private:
  const GoodSet* gs_ = nullptr;
};

// One step X <- P(X + h grad log mu(X) + sqrt(2h) xi) with the supplied
// standard normal vector xi.
Vector plmc_step(const LikelihoodModel& model, const Vector& x, double h, const Vector& xi,
                 const Projection& projection);
Vector plmc_step(const LikelihoodModel& model, const Vector& x, double h, Rng& rng,
                 const Projection& projection);

struct Chain {
  RowMatrix samples;  // kept steps x d
  Vector log_post;    // log pi + n ell_n at each kept state
  SamplerConfig config;
  bool accept_all = true;
  double runtime_ms = 0.0;

  std::size_t rows() const { return static_cast<std::size_t>(samples.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(samples.cols()); }
};

Vector initial_state(const SamplerConfig& config, std::size_t dim);

Chain run_chain(const LikelihoodModel& model, SamplerConfig config);

struct TrialSeeds {
  std::uint64_t data = 0;
  std::uint64_t chain = 0;
};
TrialSeeds trial_seeds(std::uint64_t master, std::size_t trial);

struct TrialResult {
  std::size_t trial = 0;
  TrialSeeds seeds;
  std::optional<Chain> chain;
  std::string error;  // empty on success

  bool ok() const { return error.empty(); }
};

// Adjusts the per-trial sampler configuration once the trial's dataset exists
// (e.g. to locate the mode or build a good set).
using TrialPrepare = std::function<SamplerConfig(const ModelInstance&, SamplerConfig)>;
// Called once per trial after its chain finishes; may consume and drop the
// samples. Runs concurrently for different trials.
using TrialVisitor = std::function<void(TrialResult&, const ModelInstance&)>;

// Simulates a fresh dataset per trial and runs one chain on it. The warm
// start defaults to the simulation's theta_star. Failures are recorded per
// trial; remaining trials still run.
std::vector<TrialResult> run_trials(const SimulationSpec& model_template, std::size_t n_trials,
                                    const SamplerConfig& config, std::uint64_t seed,
                                    const TrialPrepare& prepare = {},
                                    const TrialVisitor& visit = {}, int jobs = 0);
// Same, for an explicit list of trial indices (seeds depend only on the index).
std::vector<TrialResult> run_trials(const SimulationSpec& model_template,
                                    const std::vector<std::size_t>& trials,
                                    const SamplerConfig& config, std::uint64_t seed,
                                    const TrialPrepare& prepare = {},
                                    const TrialVisitor& visit = {}, int jobs = 0);

void to_json(Json& j, const SamplerConfig& c);
Json chain_metadata(const Chain& chain);
// CSV columns theta_0..theta_{d-1},log_post plus a .json sidecar of metadata.
void write_chain(const Chain& chain, const std::filesystem::path& csv_path);

}  // namespace orthant
