#include "infoteacher/dataset.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <vector>

#include "infoteacher/errors.hpp"
#include "infoteacher/rng.hpp"
#include "json.hpp"

namespace infoteacher::data {

Dataset::Dataset(Eigen::MatrixXd xs, Eigen::MatrixXd ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
  if (xs_.rows() != ys_.rows()) {
    throw SizeError("dataset: xs has " + std::to_string(xs_.rows()) +
                    " rows but ys has " + std::to_string(ys_.rows()));
  }
  if (xs_.rows() < 1) {
    throw SizeError("dataset: needs at least one row");
  }
  if (!xs_.allFinite() || !ys_.allFinite()) {
    throw IngestionError("dataset: non-finite entry");
  }
}

std::pair<Dataset, Dataset> split(const Dataset& ds, const SplitSpec& spec) {
  if (spec.n_val < 1) {
    throw ConfigError("split: n_val must be >= 1");
  }
  if (spec.n_train < 0) {
    throw ConfigError("split: n_train must be >= 0");
  }
  if (spec.n_train + spec.n_val > ds.n()) {
    throw SizeError("split: n_train + n_val = " +
                    std::to_string(spec.n_train + spec.n_val) + " exceeds " +
                    std::to_string(ds.n()) + " rows");
  }

  std::vector<int> perm(ds.n());
  std::iota(perm.begin(), perm.end(), 0);
  rng::Engine eng(rng::mix(spec.seed));
  eng.shuffle(perm);

  auto take = [&](int offset, int count) {
    Eigen::MatrixXd xs(count, ds.p());
    Eigen::MatrixXd ys(count, ds.q());
    for (int i = 0; i < count; ++i) {
      xs.row(i) = ds.xs().row(perm[offset + i]);
      ys.row(i) = ds.ys().row(perm[offset + i]);
    }
    return Dataset(std::move(xs), std::move(ys));
  };
  return {take(0, spec.n_train), take(spec.n_train, spec.n_val)};
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& xs) {
  Standardizer s;
  s.mean = xs.colwise().mean();
  const Eigen::MatrixXd centered = xs.rowwise() - s.mean;
  const double denom = std::max<double>(1, xs.rows() - 1);
  s.scale = (centered.array().square().colwise().sum() / denom).sqrt();
  for (int j = 0; j < s.scale.size(); ++j) {
    if (s.scale(j) < 1e-12) s.scale(j) = 1.0;
  }
  return s;
}

Eigen::MatrixXd Standardizer::transform(const Eigen::MatrixXd& xs) const {
  return (xs.rowwise() - mean).array().rowwise() / scale.array();
}

namespace {

nlohmann::ordered_json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& rows, int cols) {
  Eigen::MatrixXd m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (static_cast<int>(rows[i].size()) != cols) {
      throw IngestionError("dataset json: row " + std::to_string(i) +
                           " has wrong width");
    }
    for (int j = 0; j < cols; ++j) m(i, j) = rows[i][j].get<double>();
  }
  return m;
}

}  // namespace

std::string dataset_to_json(const Dataset& ds) {
  nlohmann::ordered_json j;
  j["p"] = ds.p();
  j["q"] = ds.q();
  j["xs"] = matrix_to_json(ds.xs());
  j["ys"] = matrix_to_json(ds.ys());
  return j.dump();
}

Dataset dataset_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IngestionError(std::string("dataset json: ") + e.what());
  }
  const int p = j.at("p").get<int>();
  const int q = j.at("q").get<int>();
  return Dataset(matrix_from_json(j.at("xs"), p), matrix_from_json(j.at("ys"), q));
}

void save_dataset_json(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IngestionError("cannot open for writing: " + path);
  out << dataset_to_json(ds);
}

Dataset load_dataset_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return dataset_from_json(buf.str());
}

}  // namespace infoteacher::data
