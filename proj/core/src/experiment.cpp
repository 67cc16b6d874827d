#include "infoteacher/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "infoteacher/csv.hpp"
#include "infoteacher/errors.hpp"
#include "infoteacher/rng.hpp"
#include "json.hpp"

namespace infoteacher::experiment {

namespace {

const std::vector<std::string> kKnownMetrics = {"mi", "mse", "rmse", "oracle",
                                                "decision"};

constexpr std::uint64_t kValStream = 0x1aULL;
constexpr std::uint64_t kTrainStream = 0x2bULL;
constexpr std::uint64_t kModelStream = 0x3cULL;

}  // namespace

Scenario scenario_from_string(const std::string& name) {
  if (name == "synthetic-favorable") return Scenario::synthetic_favorable;
  if (name == "synthetic-unfavorable") return Scenario::synthetic_unfavorable;
  if (name == "real-ccpp") return Scenario::real_ccpp;
  if (name == "mc-theorem2") return Scenario::mc_theorem2;
  throw ConfigError("unknown scenario: '" + name + "'");
}

std::string to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::synthetic_favorable: return "synthetic-favorable";
    case Scenario::synthetic_unfavorable: return "synthetic-unfavorable";
    case Scenario::real_ccpp: return "real-ccpp";
    case Scenario::mc_theorem2: return "mc-theorem2";
  }
  return "?";
}

data::AdditiveModelSpec sine_model_spec() {
  data::AdditiveModelSpec spec;
  spec.target.f_id = "sine10";
  spec.noise = {data::NoiseFamily::gaussian, 0.25};
  spec.input_law = {data::InputFamily::uniform, 0.0, 1.0, 1};
  return spec;
}

ExperimentConfig default_config(Scenario scenario) {
  ExperimentConfig cfg;
  cfg.scenario = scenario;
  for (std::uint64_t s = 1; s <= 20; ++s) cfg.seeds.push_back(s);

  switch (scenario) {
    case Scenario::synthetic_favorable:
      cfg.n_train_grid = {100, 200, 400, 790, 1580, 3160, 6300, 12570, 25070, 50000};
      cfg.mlp.hidden_layers = {128, 128};
      cfg.mlp.optimizer = regressors::Optimizer::adam;
      cfg.metric_set = {"mi", "mse", "oracle", "decision"};
      break;
    case Scenario::synthetic_unfavorable:
      cfg.n_train_grid = {100, 200, 400, 790, 1580, 3160, 6300, 12570, 25070, 50000};
      cfg.mlp.hidden_layers = {32};
      cfg.mlp.optimizer = regressors::Optimizer::sgd;
      cfg.metric_set = {"mi", "mse", "oracle", "decision"};
      break;
    case Scenario::real_ccpp:
      cfg.n_train_grid = {100, 160, 260, 410, 660, 1060, 1700, 2720, 4370, 7000};
      cfg.mlp.hidden_layers = {256};
      cfg.mlp.optimizer = regressors::Optimizer::adam;
      cfg.mlp.max_epochs = 300;
      cfg.metric_set = {"mi", "rmse", "decision"};
      break;
    case Scenario::mc_theorem2:
      cfg.n_train_grid = {500, 2000, 8000, 20000};
      cfg.metric_set = {};
      cfg.seeds = {1};
      break;
  }
  return cfg;
}

void apply_fast_profile(ExperimentConfig& cfg) {
  if (cfg.seeds.size() > 5) cfg.seeds.resize(5);
  if (cfg.scenario != Scenario::mc_theorem2 && cfg.n_train_grid.size() > 4) {
    const std::vector<int> grid = cfg.n_train_grid;
    const std::size_t last = grid.size() - 1;
    // Keep the anchor sizes: first, two interior points, and a large one.
    std::vector<std::size_t> pick = {0, last / 3, 2 * last / 3,
                                     std::min(last, std::size_t(8))};
    cfg.n_train_grid.clear();
    for (std::size_t i : pick) cfg.n_train_grid.push_back(grid[i]);
    std::sort(cfg.n_train_grid.begin(), cfg.n_train_grid.end());
    cfg.n_train_grid.erase(
        std::unique(cfg.n_train_grid.begin(), cfg.n_train_grid.end()),
        cfg.n_train_grid.end());
  }
}

namespace {

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    const auto e = item.find_last_not_of(" \t");
    out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    return std::stoi(value);
  } catch (...) {
    throw ConfigError(key + ": expected an integer, got '" + value + "'");
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    return std::stod(value);
  } catch (...) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
}

}  // namespace

void apply_overrides(ExperimentConfig& cfg,
                     const std::map<std::string, std::string>& kv) {
  for (const auto& [key, value] : kv) {
    if (key == "scenario") {
      cfg.scenario = scenario_from_string(value);
    } else if (key == "n_train_grid") {
      cfg.n_train_grid.clear();
      for (const auto& item : split_list(value)) {
        cfg.n_train_grid.push_back(parse_int(key, item));
      }
    } else if (key == "n_val") {
      cfg.n_val = parse_int(key, value);
    } else if (key == "seeds") {
      cfg.seeds.clear();
      for (const auto& item : split_list(value)) {
        cfg.seeds.push_back(std::stoull(item));
      }
    } else if (key == "metric_set") {
      cfg.metric_set = split_list(value);
    } else if (key == "data_path") {
      cfg.data_path = value;
    } else if (key == "trials") {
      cfg.trials = parse_int(key, value);
    } else if (key == "cache_dir") {
      cfg.cache_dir = value;
    } else if (key == "schedule.ell") {
      cfg.schedule.partition.ell = parse_double(key, value);
    } else if (key == "schedule.b_scale") {
      cfg.schedule.partition.b_scale = parse_double(key, value);
    } else if (key == "schedule.lambda") {
      cfg.schedule.partition.lambda = parse_double(key, value);
    } else if (key == "schedule.a_scale") {
      cfg.schedule.a_scale = parse_double(key, value);
    } else if (key == "schedule.a_exp") {
      cfg.schedule.a_exp = parse_double(key, value);
    } else if (key == "mlp.hidden_layers") {
      cfg.mlp.hidden_layers.clear();
      for (const auto& item : split_list(value)) {
        cfg.mlp.hidden_layers.push_back(parse_int(key, item));
      }
    } else if (key == "mlp.activation") {
      cfg.mlp.activation = value;
    } else if (key == "mlp.optimizer") {
      cfg.mlp.optimizer = regressors::optimizer_from_string(value);
    } else if (key == "mlp.learning_rate") {
      cfg.mlp.learning_rate = parse_double(key, value);
    } else if (key == "mlp.batch_size") {
      cfg.mlp.batch_size = parse_int(key, value);
    } else if (key == "mlp.max_epochs") {
      cfg.mlp.max_epochs = parse_int(key, value);
    } else if (key == "mlp.early_stop_tol") {
      cfg.mlp.early_stop_tol = parse_double(key, value);
    } else if (key == "mlp.patience") {
      cfg.mlp.patience = parse_int(key, value);
    } else if (key == "mlp.seed") {
      cfg.mlp.seed = std::stoull(value);
    } else {
      throw ConfigError("unknown config key: '" + key + "'");
    }
  }
}

ExperimentConfig load_config_file(const std::string& path,
                                  std::optional<Scenario> fallback) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);

  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected 'key = value'");
    }
    auto trim = [](std::string s) {
      const auto x = s.find_first_not_of(" \t\r");
      if (x == std::string::npos) return std::string();
      const auto y = s.find_last_not_of(" \t\r");
      return s.substr(x, y - x + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
    }
    kv[key] = value;
  }

  Scenario scenario;
  if (const auto it = kv.find("scenario"); it != kv.end()) {
    scenario = scenario_from_string(it->second);
  } else if (fallback) {
    scenario = *fallback;
  } else {
    throw ConfigError(path + ": missing 'scenario'");
  }

  ExperimentConfig cfg = default_config(scenario);
  apply_overrides(cfg, kv);
  return cfg;
}

std::string config_to_string(const ExperimentConfig& cfg) {
  std::string out;
  auto line = [&out](const std::string& k, const std::string& v) {
    out += k + " = " + v + "\n";
  };
  auto join_ints = [](const auto& values) {
    std::string s;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(values[i]);
    }
    return s;
  };
  auto join_strings = [](const std::vector<std::string>& values) {
    std::string s;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) s += ',';
      s += values[i];
    }
    return s;
  };

  line("scenario", to_string(cfg.scenario));
  line("n_train_grid", join_ints(cfg.n_train_grid));
  line("n_val", std::to_string(cfg.n_val));
  line("seeds", join_ints(cfg.seeds));
  line("metric_set", join_strings(cfg.metric_set));
  if (!cfg.data_path.empty()) line("data_path", cfg.data_path);
  line("trials", std::to_string(cfg.trials));
  if (!cfg.cache_dir.empty()) line("cache_dir", cfg.cache_dir);
  line("schedule.ell", data::format_double(cfg.schedule.partition.ell));
  line("schedule.b_scale", data::format_double(cfg.schedule.partition.b_scale));
  line("schedule.lambda", data::format_double(cfg.schedule.partition.lambda));
  line("schedule.a_scale", data::format_double(cfg.schedule.a_scale));
  line("schedule.a_exp", data::format_double(cfg.schedule.a_exp));
  line("mlp.hidden_layers", join_ints(cfg.mlp.hidden_layers));
  line("mlp.activation", cfg.mlp.activation);
  line("mlp.optimizer", regressors::to_string(cfg.mlp.optimizer));
  line("mlp.learning_rate", data::format_double(cfg.mlp.learning_rate));
  line("mlp.batch_size", std::to_string(cfg.mlp.batch_size));
  line("mlp.max_epochs", std::to_string(cfg.mlp.max_epochs));
  line("mlp.early_stop_tol", data::format_double(cfg.mlp.early_stop_tol));
  line("mlp.patience", std::to_string(cfg.mlp.patience));
  line("mlp.seed", std::to_string(cfg.mlp.seed));
  return out;
}

CurvePoint summarize(int n_train, std::vector<double> values) {
  if (values.empty()) throw SizeError("summarize: no values");
  std::sort(values.begin(), values.end());
  auto quantile = [&](double prob) {
    const double h = prob * double(values.size() - 1);
    const std::size_t i = static_cast<std::size_t>(h);
    if (i + 1 >= values.size()) return values.back();
    return values[i] + (h - double(i)) * (values[i + 1] - values[i]);
  };
  return {n_train, quantile(0.5), quantile(0.25), quantile(0.75)};
}

namespace {

void validate_metrics(const ExperimentConfig& cfg) {
  for (const auto& metric : cfg.metric_set) {
    if (std::find(kKnownMetrics.begin(), kKnownMetrics.end(), metric) ==
        kKnownMetrics.end()) {
      throw ConfigError("unknown metric: '" + metric + "'");
    }
    if (metric == "oracle" && cfg.scenario == Scenario::real_ccpp) {
      throw ConfigError("the oracle metric needs the true model; it is only "
                        "available for synthetic scenarios");
    }
  }
}

std::uint64_t config_digest(const ExperimentConfig& cfg) {
  // FNV-1a over the canonical rendering of everything that affects a cell.
  std::string repr = to_string(cfg.scenario) + "|" +
                     std::to_string(cfg.n_val) + "|" + cfg.data_path + "|" +
                     data::format_double(cfg.schedule.partition.ell) + "|" +
                     data::format_double(cfg.schedule.partition.b_scale) + "|" +
                     data::format_double(cfg.schedule.partition.lambda) + "|" +
                     data::format_double(cfg.schedule.a_scale) + "|" +
                     data::format_double(cfg.schedule.a_exp) + "|";
  for (int h : cfg.mlp.hidden_layers) repr += std::to_string(h) + ",";
  repr += "|" + to_string(cfg.mlp.optimizer) + "|" +
          data::format_double(cfg.mlp.learning_rate) + "|" +
          std::to_string(cfg.mlp.batch_size) + "|" +
          std::to_string(cfg.mlp.max_epochs) + "|" +
          data::format_double(cfg.mlp.early_stop_tol) + "|" +
          std::to_string(cfg.mlp.patience);

  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : repr) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string cell_cache_path(const ExperimentConfig& cfg, int n_train,
                            std::uint64_t seed, std::uint64_t digest) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(digest));
  return cfg.cache_dir + "/" + to_string(cfg.scenario) + "_n" +
         std::to_string(n_train) + "_s" + std::to_string(seed) + "_" + buf +
         ".json";
}

using MetricMap = std::map<std::string, double>;

std::optional<MetricMap> load_cell_cache(const std::string& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    nlohmann::json j;
    in >> j;
    MetricMap metrics;
    for (const auto& [k, v] : j.at("metrics").items()) {
      metrics[k] = v.get<double>();
    }
    return metrics;
  } catch (...) {
    return std::nullopt;  // unreadable cache entries are recomputed
  }
}

void store_cell_cache(const std::string& path, const MetricMap& metrics) {
  nlohmann::ordered_json j;
  for (const auto& [k, v] : metrics) j["metrics"][k] = v;
  std::ofstream out(path);
  if (out) out << j.dump(2);
}

/// Trains the scenario's student on one (n_train, seed) cell and evaluates
/// every metric the scenario can provide.
MetricMap run_cell(const ExperimentConfig& cfg, const data::Dataset* full,
                   int n_train, std::uint64_t seed) {
  using data::Dataset;

  std::optional<Dataset> train, val;
  regressors::ModelPipeline pipeline;
  Predictor f_true;

  if (cfg.scenario == Scenario::real_ccpp) {
    data::SplitSpec split_spec{n_train, cfg.n_val, rng::derive(seed, n_train)};
    auto [tr, va] = data::split(*full, split_spec);

    pipeline.standardize = data::Standardizer::fit(tr.xs());
    const Eigen::MatrixXd z_train = pipeline.standardize->transform(tr.xs());
    pipeline.pca = data::pca_fit(z_train, 2);

    regressors::MLPConfig mlp_cfg = cfg.mlp;
    mlp_cfg.seed = rng::derive(seed, kModelStream, n_train);
    pipeline.model = regressors::fit_mlp(
        Dataset(data::pca_transform(*pipeline.pca, z_train), tr.ys()),
        Dataset(data::pca_transform(*pipeline.pca,
                                    pipeline.standardize->transform(va.xs())),
                va.ys()),
        mlp_cfg);
    train.emplace(std::move(tr));
    val.emplace(std::move(va));
  } else {
    const data::AdditiveModelSpec model = sine_model_spec();
    f_true = data::target_predictor(model.target, model.p());
    val.emplace(data::sample_additive(model, cfg.n_val,
                                      rng::derive(seed, kValStream)));
    train.emplace(data::sample_additive(model, n_train,
                                        rng::derive(seed, kTrainStream, n_train)));

    pipeline.standardize = data::Standardizer::fit(train->xs());
    regressors::MLPConfig mlp_cfg = cfg.mlp;
    mlp_cfg.seed = rng::derive(seed, kModelStream, n_train);
    pipeline.model = regressors::fit_mlp(
        Dataset(pipeline.standardize->transform(train->xs()), train->ys()),
        Dataset(pipeline.standardize->transform(val->xs()), val->ys()),
        mlp_cfg);
  }

  const Predictor predict = pipeline.predictor();
  const mi::MIEstimate est =
      mi::estimate_mi(mi::residuals(*val, predict), cfg.schedule);
  const double threshold = mi::threshold(val->n(), cfg.schedule);
  const double mse_value = regressors::mse(predict, *val);

  MetricMap metrics;
  metrics["mi"] = est.value;
  metrics["mse"] = mse_value;
  metrics["rmse"] = std::sqrt(mse_value);
  metrics["decision"] = est.value < threshold ? 1.0 : 0.0;
  if (cfg.scenario != Scenario::real_ccpp) {
    metrics["oracle"] =
        teacher::oracle_teacher(f_true, predict, val->xs(), 1e-3).statistic;
  }
  return metrics;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  if (cfg.scenario == Scenario::mc_theorem2) {
    throw ConfigError("mc-theorem2 runs through run_mc_validation");
  }
  if (cfg.n_train_grid.empty()) throw ConfigError("empty n_train_grid");
  if (!std::is_sorted(cfg.n_train_grid.begin(), cfg.n_train_grid.end()) ||
      std::adjacent_find(cfg.n_train_grid.begin(), cfg.n_train_grid.end()) !=
          cfg.n_train_grid.end()) {
    throw ConfigError("n_train_grid must be strictly increasing");
  }
  if (cfg.seeds.empty()) throw ConfigError("seeds must be nonempty");
  validate_metrics(cfg);

  std::optional<data::Dataset> full;
  if (cfg.scenario == Scenario::real_ccpp) {
    if (cfg.data_path.empty()) {
      throw ConfigError("real-ccpp needs data_path");
    }
    full.emplace(data::load_csv(cfg.data_path, {"PE"}));
  }

  const std::uint64_t digest = config_digest(cfg);
  if (!cfg.cache_dir.empty()) {
    std::filesystem::create_directories(cfg.cache_dir);
  }

  // metric -> n_train -> per-seed values
  std::map<std::string, std::map<int, std::vector<double>>> table;
  int diverged = 0;

  for (const int n_train : cfg.n_train_grid) {
    for (const std::uint64_t seed : cfg.seeds) {
      MetricMap metrics;
      std::string cache_path;
      bool cached = false;
      if (!cfg.cache_dir.empty()) {
        cache_path = cell_cache_path(cfg, n_train, seed, digest);
        if (auto hit = load_cell_cache(cache_path)) {
          metrics = std::move(*hit);
          cached = true;
        }
      }
      if (!cached) {
        try {
          metrics = run_cell(cfg, full ? &*full : nullptr, n_train, seed);
        } catch (const TrainingError& e) {
          ++diverged;
          std::cerr << "warning: cell (n_train=" << n_train << ", seed=" << seed
                    << ") diverged: " << e.what() << "\n";
          continue;
        }
        if (!cfg.cache_dir.empty()) store_cell_cache(cache_path, metrics);
      }
      for (const auto& metric : cfg.metric_set) {
        const auto it = metrics.find(metric);
        if (it == metrics.end()) {
          throw ConfigError("metric '" + metric + "' missing from cell result");
        }
        table[metric][n_train].push_back(it->second);
      }
    }
  }

  ExperimentResult result;
  result.diverged_cells = diverged;
  for (auto& [metric, by_size] : table) {
    ExperimentCurve curve;
    curve.metric = metric;
    for (auto& [n_train, values] : by_size) {
      curve.points.push_back(summarize(n_train, std::move(values)));
    }
    result.curves.push_back(std::move(curve));
  }
  if (diverged > 0) {
    std::cerr << "warning: " << diverged << " cell(s) excluded from aggregation\n";
  }
  return result;
}

teacher::ErrorRateCurve run_mc_validation(const ExperimentConfig& cfg) {
  const data::AdditiveModelSpec model = sine_model_spec();
  const Predictor student_null = data::target_predictor(model.target, model.p());
  const Predictor student_alt = zero_predictor(model.q());
  const std::uint64_t seed = cfg.seeds.empty() ? 1 : cfg.seeds.front();
  return teacher::monte_carlo_error_rates(model, student_null, student_alt,
                                          cfg.n_train_grid, cfg.trials,
                                          cfg.schedule, seed);
}

namespace {

void sort_curves(std::vector<ExperimentCurve>& curves) {
  for (auto& curve : curves) {
    std::sort(curve.points.begin(), curve.points.end(),
              [](const CurvePoint& a, const CurvePoint& b) {
                return a.n_train < b.n_train;
              });
  }
  std::sort(curves.begin(), curves.end(),
            [](const ExperimentCurve& a, const ExperimentCurve& b) {
              return a.metric < b.metric;
            });
}

}  // namespace

std::string curves_to_csv(std::vector<ExperimentCurve> curves) {
  sort_curves(curves);
  std::string out = "metric,n_train,median,q25,q75\n";
  for (const auto& curve : curves) {
    for (const auto& pt : curve.points) {
      out += curve.metric + ',' + std::to_string(pt.n_train) + ',' +
             data::format_double(pt.median) + ',' +
             data::format_double(pt.q25) + ',' + data::format_double(pt.q75) +
             '\n';
    }
  }
  return out;
}

std::string curves_to_json(std::vector<ExperimentCurve> curves) {
  sort_curves(curves);
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& curve : curves) {
    nlohmann::ordered_json points = nlohmann::ordered_json::array();
    for (const auto& pt : curve.points) {
      points.push_back({{"n_train", pt.n_train},
                        {"median", pt.median},
                        {"q25", pt.q25},
                        {"q75", pt.q75}});
    }
    j.push_back({{"metric", curve.metric}, {"points", std::move(points)}});
  }
  return j.dump(2) + "\n";
}

std::vector<ExperimentCurve> curves_from_csv_text(const std::string& text) {
  std::vector<ExperimentCurve> curves;
  std::stringstream ss(text);
  std::string line;
  if (!std::getline(ss, line) || line != "metric,n_train,median,q25,q75") {
    throw IngestionError("curve csv: bad header");
  }
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string metric, field;
    std::getline(row, metric, ',');
    CurvePoint pt;
    std::getline(row, field, ',');
    pt.n_train = std::stoi(field);
    std::getline(row, field, ',');
    pt.median = std::stod(field);
    std::getline(row, field, ',');
    pt.q25 = std::stod(field);
    std::getline(row, field, ',');
    pt.q75 = std::stod(field);
    if (curves.empty() || curves.back().metric != metric) {
      curves.push_back({metric, {}});
    }
    curves.back().points.push_back(pt);
  }
  return curves;
}

void emit(const std::vector<ExperimentCurve>& curves, const std::string& path,
          Format format) {
  std::ofstream out(path);
  if (!out) throw IngestionError("cannot open for writing: " + path);
  out << (format == Format::csv ? curves_to_csv(curves)
                                : curves_to_json(curves));
}

}  // namespace infoteacher::experiment
