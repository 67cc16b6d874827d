#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "infoteacher/mi.hpp"
#include "infoteacher/regressors.hpp"
#include "infoteacher/teacher.hpp"

namespace infoteacher::experiment {

enum class Scenario {
  synthetic_favorable,
  synthetic_unfavorable,
  real_ccpp,
  mc_theorem2,
};

Scenario scenario_from_string(const std::string& name);
std::string to_string(Scenario scenario);

/// One experiment sweep. For mc_theorem2 the n_train_grid doubles as the
/// validation-size grid and `trials` controls the Monte-Carlo repetitions.
struct ExperimentConfig {
  Scenario scenario = Scenario::synthetic_favorable;
  std::vector<int> n_train_grid;
  int n_val = 2000;
  std::vector<std::uint64_t> seeds;
  mi::ScheduleParams schedule;
  regressors::MLPConfig mlp;
  std::string data_path;
  std::vector<std::string> metric_set;  // subset of mi, mse, rmse, oracle, decision
  int trials = 50;
  std::string cache_dir;  // empty disables per-cell caching
};

/// Paper-style defaults per scenario: log-spaced grids, 20 seeds,
/// scenario-specific network configs, validation size 2000.
ExperimentConfig default_config(Scenario scenario);

/// CI profile: 5 seeds and a 4-point subsample of the grid.
void apply_fast_profile(ExperimentConfig& cfg);

/// Applies flat `key = value` overrides; unknown keys raise ConfigError.
void apply_overrides(ExperimentConfig& cfg,
                     const std::map<std::string, std::string>& kv);

/// Reads a flat key-value file ('#' comments). The scenario comes from the
/// file's `scenario` key or, if absent, from `fallback`.
ExperimentConfig load_config_file(const std::string& path,
                                  std::optional<Scenario> fallback = {});

std::string config_to_string(const ExperimentConfig& cfg);

struct CurvePoint {
  int n_train = 0;
  double median = 0;
  double q25 = 0;
  double q75 = 0;
};

struct ExperimentCurve {
  std::string metric;
  std::vector<CurvePoint> points;
};

struct ExperimentResult {
  std::vector<ExperimentCurve> curves;
  int diverged_cells = 0;  // cells dropped from aggregation
};

/// Runs every (n_train, seed) cell of a sweep scenario and aggregates each
/// metric into median/IQR curves. Cells are independently seeded; with a
/// cache_dir, previously computed cells are reused verbatim.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// The Monte-Carlo validation harness: sine-model target as the null
/// student, the zero function as the alternative.
teacher::ErrorRateCurve run_mc_validation(const ExperimentConfig& cfg);

enum class Format { csv, json };

/// Writes curves sorted by (metric, n_train); byte-stable for identical
/// inputs. CSV columns: metric, n_train, median, q25, q75.
void emit(const std::vector<ExperimentCurve>& curves, const std::string& path,
          Format format);

std::string curves_to_csv(std::vector<ExperimentCurve> curves);
std::string curves_to_json(std::vector<ExperimentCurve> curves);
std::vector<ExperimentCurve> curves_from_csv_text(const std::string& text);

/// The sine additive model used by the synthetic scenarios.
data::AdditiveModelSpec sine_model_spec();

/// Interpolated quartiles (q25, median, q75) of an unsorted sample.
CurvePoint summarize(int n_train, std::vector<double> values);

}  // namespace infoteacher::experiment
