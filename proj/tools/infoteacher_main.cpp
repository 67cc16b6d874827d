// Command-line front end: model assessment, experiment sweeps, the
// Monte-Carlo validation harness and standalone MI estimation.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime/training error.
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "infoteacher/ccpp.hpp"
#include "infoteacher/csv.hpp"
#include "infoteacher/errors.hpp"
#include "infoteacher/experiment.hpp"
#include "infoteacher/mi.hpp"
#include "infoteacher/regressors.hpp"
#include "infoteacher/teacher.hpp"
#include "json.hpp"

namespace {

using namespace infoteacher;

nlohmann::ordered_json verdict_json(const teacher::TeacherVerdict& v) {
  return {{"kind", teacher::to_string(v.kind)},
          {"decision", v.decision},
          {"statistic", v.statistic},
          {"threshold", v.threshold},
          {"m", v.m}};
}

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw IngestionError("cannot open for writing: " + out_path);
  out << text;
}

struct ScheduleFlags {
  std::optional<double> ell, b_scale, lambda, a_scale, a_exp;

  void attach(CLI::App* cmd) {
    cmd->add_option("--ell", ell, "Partition exponent in (0, 1/3)");
    cmd->add_option("--b-scale", b_scale, "Minimum-cell-mass multiplier");
    cmd->add_option("--lambda", lambda, "Pruning penalty weight");
    cmd->add_option("--a-scale", a_scale, "Threshold scale");
    cmd->add_option("--a-exp", a_exp, "Threshold exponent in (0, 1/3)");
  }
  mi::ScheduleParams resolve(mi::ScheduleParams params = {}) const {
    if (ell) params.partition.ell = *ell;
    if (b_scale) params.partition.b_scale = *b_scale;
    if (lambda) params.partition.lambda = *lambda;
    if (a_scale) params.a_scale = *a_scale;
    if (a_exp) params.a_exp = *a_exp;
    return params;
  }
};

int run_assess(const std::string& model_path, const std::string& data_path,
               const std::vector<std::string>& targets,
               const ScheduleFlags& schedule, std::optional<double> naive_a,
               const std::string& out_path) {
  const regressors::ModelPipeline pipeline = regressors::load_model_json(model_path);
  const data::Dataset val = data::load_csv(data_path, targets);
  const mi::ScheduleParams params = schedule.resolve();

  nlohmann::ordered_json j;
  j["information"] =
      verdict_json(teacher::information_teacher(pipeline.predictor(), val, params));
  if (naive_a) {
    j["naive"] =
        verdict_json(teacher::naive_mse_teacher(pipeline.predictor(), val, *naive_a));
  }
  write_output(j.dump(2) + "\n", out_path);
  return 0;
}

int run_estimate_mi(const std::string& data_path, const ScheduleFlags& schedule,
                    const std::string& out_path) {
  const data::CsvTable table = data::read_csv(data_path);
  if (table.values.cols() != 2) {
    throw ConfigError("estimate-mi expects a two-column CSV, got " +
                      std::to_string(table.values.cols()) + " columns");
  }
  const mi::ScheduleParams params = schedule.resolve();
  const tsp::JointSamples samples(table.values.col(0), table.values.col(1));
  const mi::MIEstimate est = mi::estimate_mi(samples, params);
  const double a_m = mi::threshold(est.m, params);

  nlohmann::ordered_json j{{"mi_nats", est.value},
                           {"threshold", a_m},
                           {"m", est.m},
                           {"leaf_count", est.leaf_count},
                           {"decision", est.value < a_m ? 1 : 0}};
  write_output(j.dump(2) + "\n", out_path);
  return 0;
}

experiment::ExperimentConfig build_config(
    const std::string& scenario_name, const std::string& config_path,
    bool fast, std::optional<std::uint64_t> seed, const std::string& data_path,
    const std::string& cache_dir, const std::vector<std::string>& overrides) {
  const experiment::Scenario scenario =
      experiment::scenario_from_string(scenario_name);
  experiment::ExperimentConfig cfg =
      config_path.empty()
          ? experiment::default_config(scenario)
          : experiment::load_config_file(config_path, scenario);
  if (cfg.scenario != scenario) {
    throw ConfigError("config file scenario '" +
                      experiment::to_string(cfg.scenario) +
                      "' does not match requested '" + scenario_name + "'");
  }
  if (fast) experiment::apply_fast_profile(cfg);
  if (seed) {
    // Re-key every per-seed stream while keeping the seed count.
    const std::size_t count = std::max<std::size_t>(1, cfg.seeds.size());
    cfg.seeds.clear();
    for (std::size_t i = 0; i < count; ++i) cfg.seeds.push_back(*seed + i);
  }
  if (!data_path.empty()) cfg.data_path = data_path;
  if (!cache_dir.empty()) cfg.cache_dir = cache_dir;

  std::map<std::string, std::string> kv;
  for (const std::string& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("--set expects key=value, got '" + item + "'");
    }
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  experiment::apply_overrides(cfg, kv);
  return cfg;
}

int run_experiment_cmd(const experiment::ExperimentConfig& cfg,
                       std::string out_path, const std::string& format_name) {
  const experiment::Format format = format_name == "json"
                                        ? experiment::Format::json
                                        : experiment::Format::csv;
  if (out_path.empty()) {
    out_path = experiment::to_string(cfg.scenario) + "_curves." + format_name;
  }

  if (cfg.scenario == experiment::Scenario::mc_theorem2) {
    teacher::save_csv(experiment::run_mc_validation(cfg), out_path);
    std::cerr << "wrote " << out_path << "\n";
    return 0;
  }

  const experiment::ExperimentResult result = experiment::run_experiment(cfg);
  experiment::emit(result.curves, out_path, format);
  std::cerr << "wrote " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regression optimality assessment via input-residual "
               "mutual information"};
  app.require_subcommand(1);

  // assess
  auto* assess = app.add_subcommand(
      "assess", "Assess one saved model against one CSV dataset");
  std::string assess_model, assess_data, assess_out;
  std::vector<std::string> assess_targets{"PE"};
  std::optional<double> naive_a;
  ScheduleFlags assess_schedule;
  assess->add_option("--model", assess_model, "Model pipeline JSON")->required();
  assess->add_option("--data", assess_data, "Validation CSV")->required();
  assess->add_option("--target", assess_targets,
                     "Target column name(s); default PE");
  assess->add_option("--naive-threshold", naive_a,
                     "Also report the naive MSE verdict at this threshold");
  assess->add_option("--out", assess_out, "Write the verdict JSON here");
  assess_schedule.attach(assess);

  // experiment
  auto* exp = app.add_subcommand("experiment", "Run an experiment sweep");
  std::string exp_scenario, exp_config, exp_out, exp_data, exp_cache;
  std::string exp_format = "csv";
  std::vector<std::string> exp_sets;
  bool exp_fast = false;
  std::optional<std::uint64_t> exp_seed;
  exp->add_option("scenario", exp_scenario,
                  "synthetic-favorable | synthetic-unfavorable | real-ccpp | "
                  "mc-theorem2")
      ->required();
  exp->add_option("--config", exp_config, "Flat key=value config file");
  exp->add_option("--out", exp_out, "Output curve file");
  exp->add_option("--format", exp_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  exp->add_flag("--fast", exp_fast, "CI profile: 5 seeds, truncated grid");
  exp->add_option("--seed", exp_seed, "Base seed; replaces the seed list");
  exp->add_option("--data", exp_data, "Dataset CSV (real-ccpp)");
  exp->add_option("--cache-dir", exp_cache, "Per-cell result cache directory");
  exp->add_option("--set", exp_sets, "Extra key=value config overrides");

  // mc-validate
  auto* mc = app.add_subcommand(
      "mc-validate", "Monte-Carlo error-rate harness (sine model)");
  std::string mc_config, mc_out = "error_rates.csv";
  std::vector<int> mc_grid;
  std::optional<int> mc_trials;
  std::optional<std::uint64_t> mc_seed;
  ScheduleFlags mc_schedule;
  mc->add_option("--config", mc_config, "Flat key=value config file");
  mc->add_option("--m-grid", mc_grid, "Validation sizes (increasing)");
  mc->add_option("--trials", mc_trials, "Trials per grid point");
  mc->add_option("--seed", mc_seed, "Base seed");
  mc->add_option("--out", mc_out, "Output CSV path");
  mc_schedule.attach(mc);

  // estimate-mi
  auto* est = app.add_subcommand(
      "estimate-mi", "Estimate MI from a two-column CSV (x, r)");
  std::string est_data, est_out;
  ScheduleFlags est_schedule;
  est->add_option("data", est_data, "Two-column CSV")->required();
  est->add_option("--out", est_out, "Write the result JSON here");
  est_schedule.attach(est);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 1;
  }

  try {
    if (*assess) {
      return run_assess(assess_model, assess_data, assess_targets,
                        assess_schedule, naive_a, assess_out);
    }
    if (*exp) {
      return run_experiment_cmd(
          build_config(exp_scenario, exp_config, exp_fast, exp_seed, exp_data,
                       exp_cache, exp_sets),
          exp_out, exp_format);
    }
    if (*mc) {
      experiment::ExperimentConfig cfg =
          mc_config.empty()
              ? experiment::default_config(experiment::Scenario::mc_theorem2)
              : experiment::load_config_file(
                    mc_config, experiment::Scenario::mc_theorem2);
      cfg.schedule = mc_schedule.resolve(cfg.schedule);
      if (!mc_grid.empty()) cfg.n_train_grid = mc_grid;
      if (mc_trials) cfg.trials = *mc_trials;
      if (mc_seed) cfg.seeds = {*mc_seed};
      teacher::save_csv(experiment::run_mc_validation(cfg), mc_out);
      std::cerr << "wrote " << mc_out << "\n";
      return 0;
    }
    if (*est) {
      return run_estimate_mi(est_data, est_schedule, est_out);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
