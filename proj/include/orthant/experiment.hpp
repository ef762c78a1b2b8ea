#pragma once

#include "orthant/diagnostics.hpp"
#include "orthant/geometry.hpp"
#include "orthant/json_io.hpp"
#include "orthant/mode.hpp"
#include "orthant/models.hpp"
#include "orthant/sampler.hpp"
#include "orthant/simulate.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace orthant {

enum class Preset { pre_asymptotic, asymptotic, custom };

std::string to_string(Preset p);
Preset parse_preset(const std::string& s);

struct ExperimentConfig {
  Preset preset = Preset::custom;
  ModelKind model = ModelKind::logistic;
  std::size_t d = 10;
  std::size_t n = 1000;
  std::size_t k = 2;  // GMM components
  std::size_t n_trials = 20;
  SamplerConfig sampler;
  DeltaDefaults deltas;
  double level = 0.95;
  double boundary_shift = 1.0;
  std::filesystem::path output_dir = "runs";
  std::uint64_t seed = 0;
  int jobs = 1;

  // Throws ConfigError when a preset's pinned values were changed.
  void validate() const;
};

// Pinned values of a preset for one model; `custom` starts from the
// asymptotic values.
ExperimentConfig preset_config(Preset preset, ModelKind model);

// Coordinates whose true value is 0: every j with j % 20 equal to 5
// (logistic), 9 (Poisson) or 7 (GMM).
std::vector<std::size_t> boundary_indices(ModelKind model, std::size_t d);
Vector preset_theta_star(ModelKind model, std::size_t d, std::size_t k = 2);
SimulationSpec simulation_spec(const ExperimentConfig& cfg);

// <output_dir>/<preset>_<model>_seed<seed>
std::filesystem::path run_directory(const ExperimentConfig& cfg);

// Box searched by the GMM annealer: [0, max |x| + 1] per coordinate.
Vector gmm_search_box(const GmmData& data);

// Mode for a simulated dataset: local ascent from theta_star for the
// log-concave models, annealing plus polish for the GMM.
ModeResult locate_mode(const ModelInstance& model, const Vector& theta_star, std::uint64_t seed);

struct TrialEss {
  std::size_t trial = 0;
  TrialSeeds seeds;
  Vector per_coordinate;
  double llr_ess = 0.0;
  double median = 0.0;
  double runtime_ms = 0.0;
  std::string error;
};

struct TrialIntervals {
  std::size_t trial = 0;
  TrialSeeds seeds;
  std::vector<Interval> intervals;
  std::string error;
};

struct StudyOptions {
  // When set, every chain is written to <dir>/<trial>.csv.
  std::filesystem::path chain_dir;
  // When non-empty, only these trial indices run.
  std::vector<std::size_t> only_trials;
};

std::vector<TrialEss> run_ess_study(const ExperimentConfig& cfg, const StudyOptions& opts = {});

struct CoverageStudy {
  CoverageReport report;
  std::vector<TrialIntervals> trials;
  Vector theta_star;
};
CoverageStudy run_coverage_study(const ExperimentConfig& cfg, const StudyOptions& opts = {});

void to_json(Json& j, const ExperimentConfig& c);
// Fields present in `j` override `base`; unknown fields raise ConfigError.
ExperimentConfig experiment_from_json(const Json& j, ExperimentConfig base);

// FNV-1a of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const Json& j);

// Library, compiler and dependency versions for run manifests.
Json version_info();

}  // namespace orthant
