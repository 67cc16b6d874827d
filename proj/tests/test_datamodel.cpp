#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "infoteacher/additive.hpp"
#include "infoteacher/ccpp.hpp"
#include "infoteacher/csv.hpp"
#include "infoteacher/dataset.hpp"
#include "infoteacher/errors.hpp"
#include "infoteacher/pca.hpp"
#include "infoteacher/rng.hpp"

using namespace infoteacher;
using data::Dataset;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

data::AdditiveModelSpec sine_spec() {
  data::AdditiveModelSpec spec;
  spec.target.f_id = "sine10";
  spec.noise = {data::NoiseFamily::gaussian, 0.25};
  spec.input_law = {data::InputFamily::uniform, 0.0, 1.0, 1};
  return spec;
}

}  // namespace

TEST_CASE("dataset validates shape and finiteness") {
  Eigen::MatrixXd xs(2, 1), ys(2, 1);
  xs << 0, 1;
  ys << 2, 3;
  const Dataset ds(xs, ys);
  CHECK(ds.n() == 2);
  CHECK(ds.p() == 1);
  CHECK(ds.q() == 1);

  CHECK_THROWS_AS(Dataset(xs, Eigen::MatrixXd::Zero(3, 1)), SizeError);
  Eigen::MatrixXd bad = ys;
  bad(0, 0) = std::nan("");
  CHECK_THROWS_AS(Dataset(xs, bad), IngestionError);
}

TEST_CASE("sine sampling matches the declared noise level") {
  const Dataset ds = data::sample_additive(sine_spec(), 2000, 7);
  const Eigen::ArrayXd resid =
      ds.ys().col(0).array() - (10.0 * ds.xs().col(0).array()).sin();
  const double mean = resid.mean();
  const double var = (resid - mean).square().sum() / (resid.size() - 1);
  CHECK(var == doctest::Approx(0.25).epsilon(0.12));  // 0.25 +- 0.03
  CHECK(std::abs(var - 0.25) < 0.03);
}

TEST_CASE("zero function with degenerate noise gives exact zeros") {
  data::AdditiveModelSpec spec;
  spec.target.f_id = "zero";
  spec.noise = {data::NoiseFamily::none, 0.0};
  spec.input_law = {data::InputFamily::uniform, 0.0, 1.0, 1};
  const Dataset ds = data::sample_additive(spec, 10, 3);
  CHECK(ds.ys().isZero(0.0));
}

TEST_CASE("identity target reproduces E[Y] = E[X] = 0.5") {
  // Oracle: E[Y] = int_0^1 x dx + E[noise] = 0.5.
  data::AdditiveModelSpec spec;
  spec.target.f_id = "identity";
  spec.noise = {data::NoiseFamily::gaussian, 1.0};
  spec.input_law = {data::InputFamily::uniform, 0.0, 1.0, 1};
  const Dataset ds = data::sample_additive(spec, 100000, 11);
  CHECK(std::abs(ds.ys().col(0).mean() - 0.5) < 0.02);
}

TEST_CASE("sampling is bit-identical per (spec, n, seed)") {
  const Dataset a = data::sample_additive(sine_spec(), 500, 42);
  const Dataset b = data::sample_additive(sine_spec(), 500, 42);
  const Dataset c = data::sample_additive(sine_spec(), 500, 43);
  CHECK(a.xs() == b.xs());
  CHECK(a.ys() == b.ys());
  CHECK(a.xs() != c.xs());
}

TEST_CASE("unknown target or noise family raises ConfigError") {
  data::AdditiveModelSpec spec = sine_spec();
  spec.target.f_id = "cubic";
  CHECK_THROWS_AS(data::sample_additive(spec, 10, 1), ConfigError);
  CHECK_THROWS_AS(data::noise_family_from_string("cauchy"), ConfigError);
}

TEST_CASE("every registered noise family is centered") {
  // Monte-Carlo mean over 1e6 draws stays within 4*sigma/1000.
  const std::vector<data::NoiseSpec> families = {
      {data::NoiseFamily::gaussian, 0.25},
      {data::NoiseFamily::uniform, 0.7},
      {data::NoiseFamily::laplace, 0.4},
  };
  for (const auto& noise : families) {
    rng::Engine eng(rng::mix(99));
    const int n = 1000000;
    double sum = 0;
    for (int i = 0; i < n; ++i) sum += noise.sample(eng.open01());
    CHECK(std::abs(sum / n) < 4.0 * noise.stddev() / 1000.0);
  }
}

TEST_CASE("noise variances match their parameterization") {
  for (const auto& noise :
       {data::NoiseSpec{data::NoiseFamily::gaussian, 0.25},
        data::NoiseSpec{data::NoiseFamily::uniform, 0.9},
        data::NoiseSpec{data::NoiseFamily::laplace, 0.5}}) {
    rng::Engine eng(rng::mix(7));
    const int n = 200000;
    double sum = 0, sq = 0;
    for (int i = 0; i < n; ++i) {
      const double v = noise.sample(eng.open01());
      sum += v;
      sq += v * v;
    }
    const double var = sq / n - (sum / n) * (sum / n);
    CHECK(var == doctest::Approx(noise.stddev() * noise.stddev()).epsilon(0.03));
  }
}

TEST_CASE("split produces disjoint deterministic index sets") {
  const Dataset ds = data::sample_additive(sine_spec(), 9568, 1);
  const data::SplitSpec spec{7000, 2000, 7};
  auto [train, val] = data::split(ds, spec);
  CHECK(train.n() == 7000);
  CHECK(val.n() == 2000);

  // Disjointness via x values (continuous draws collide with probability 0).
  std::set<double> train_x(train.xs().col(0).begin(), train.xs().col(0).end());
  int overlap = 0;
  for (const double v : val.xs().col(0)) overlap += train_x.count(v);
  CHECK(overlap == 0);

  auto [train2, val2] = data::split(ds, spec);
  CHECK(train.xs() == train2.xs());
  CHECK(val.ys() == val2.ys());

  auto [train3, _] = data::split(ds, {7000, 2000, 8});
  CHECK(train.xs() != train3.xs());
}

TEST_CASE("split covers all rows when sizes add up") {
  Eigen::MatrixXd xs(3, 1), ys(3, 1);
  xs << 1, 2, 3;
  ys << 4, 5, 6;
  const Dataset ds(xs, ys);
  auto [train, val] = data::split(ds, {2, 1, 0});
  std::multiset<double> seen;
  for (double v : train.xs().col(0)) seen.insert(v);
  for (double v : val.xs().col(0)) seen.insert(v);
  CHECK(seen == std::multiset<double>{1, 2, 3});
}

TEST_CASE("split rejects oversized requests") {
  const Dataset ds = data::sample_additive(sine_spec(), 10, 1);
  CHECK_THROWS_AS(data::split(ds, {9, 2, 0}), SizeError);
  CHECK_THROWS_AS(data::split(ds, {5, 0, 0}), ConfigError);
}

TEST_CASE("standardizer centers and scales per feature") {
  const Dataset ds = data::sample_additive(sine_spec(), 4000, 5);
  const auto std = data::Standardizer::fit(ds.xs());
  const Eigen::MatrixXd z = std.transform(ds.xs());
  CHECK(std::abs(z.col(0).mean()) < 1e-12);
  const double var = z.col(0).squaredNorm() / (z.rows() - 1);
  CHECK(var == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("dataset json round-trip is exact") {
  const Dataset ds = data::sample_additive(sine_spec(), 50, 9);
  const Dataset back = data::dataset_from_json(data::dataset_to_json(ds));
  CHECK(back.xs() == ds.xs());
  CHECK(back.ys() == ds.ys());
}

TEST_CASE("csv loader handles the hand-written case exactly") {
  const std::string path = temp_path("it_tiny.csv");
  {
    std::ofstream out(path);
    out << "a,b,y\n1,2,3\n4,5,6\n7,8,9\n";
  }
  const Dataset ds = data::load_csv(path, {"y"});
  CHECK(ds.n() == 3);
  CHECK(ds.p() == 2);
  CHECK(ds.q() == 1);
  CHECK(ds.xs()(1, 1) == 5.0);
  CHECK(ds.ys()(2, 0) == 9.0);
  std::remove(path.c_str());
}

TEST_CASE("csv loader names the offending cell") {
  const std::string path = temp_path("it_bad.csv");
  {
    std::ofstream out(path);
    out << "a,y\n1,2\nx,4\n";
  }
  CHECK_THROWS_WITH_AS(data::load_csv(path, {"y"}),
                       doctest::Contains("column 'a'"), IngestionError);
  std::remove(path.c_str());

  {
    std::ofstream out(path);
    out << "a,y\n";  // header only
  }
  CHECK_THROWS_AS(data::load_csv(path, {"y"}), IngestionError);
  std::remove(path.c_str());

  CHECK_THROWS_AS(data::load_csv(temp_path("it_missing_9ac4.csv"), {"y"}),
                  IngestionError);
}

TEST_CASE("csv round-trip through write_dataset_csv") {
  const Dataset ds = data::sample_additive(sine_spec(), 25, 3);
  const std::string path = temp_path("it_roundtrip.csv");
  data::write_dataset_csv(path, ds, {"x"}, {"y"});
  const Dataset back = data::load_csv(path, {"y"});
  CHECK(back.xs() == ds.xs());
  CHECK(back.ys() == ds.ys());
  std::remove(path.c_str());
}

TEST_CASE("ccpp surrogate matches the published schema") {
  const data::CsvTable table = data::make_ccpp_surrogate(9568, 1);
  CHECK(table.columns == data::kCcppColumns);
  CHECK(table.values.rows() == 9568);
  CHECK(table.values.cols() == 5);
  CHECK(table.values.col(0).minCoeff() >= 1.8);   // AT range
  CHECK(table.values.col(0).maxCoeff() <= 37.1);
  CHECK(table.values.col(4).minCoeff() > 380.0);  // PE stays plausible
  CHECK(table.values.col(4).maxCoeff() < 540.0);

  const std::string path = temp_path("it_ccpp.csv");
  data::write_csv(path, table);
  const Dataset ds = data::load_csv(path, {"PE"});
  CHECK(ds.n() == 9568);
  CHECK(ds.p() == 4);
  CHECK(ds.q() == 1);
  std::remove(path.c_str());
}

TEST_CASE("pca captures rank-1 structure") {
  rng::Engine eng(rng::mix(21));
  Eigen::MatrixXd xs(300, 2);
  for (int i = 0; i < 300; ++i) {
    const double t = eng.normal();
    xs(i, 0) = 2.0 * t + 1.0;
    xs(i, 1) = -3.0 * t + 0.5;
  }
  const data::PCAModel model = data::pca_fit(xs, 1);
  const Eigen::MatrixXd centered = xs.rowwise() - xs.colwise().mean();
  const double total = centered.squaredNorm() / (xs.rows() - 1);
  CHECK(model.explained_variance(0) / total > 0.999);
}

TEST_CASE("full-rank pca reconstructs exactly") {
  rng::Engine eng(rng::mix(22));
  Eigen::MatrixXd xs(100, 4);
  for (int i = 0; i < 100; ++i) {
    for (int j = 0; j < 4; ++j) xs(i, j) = eng.normal(0, 1 + j);
  }
  const data::PCAModel model = data::pca_fit(xs, 4);
  const Eigen::MatrixXd back =
      data::pca_inverse_transform(model, data::pca_transform(model, xs));
  CHECK((back - xs).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("pca rejects k > p and handles zero variance") {
  Eigen::MatrixXd xs = Eigen::MatrixXd::Ones(10, 2);
  CHECK_THROWS_AS(data::pca_fit(xs, 3), SizeError);
  const data::PCAModel model = data::pca_fit(xs, 2);
  CHECK(model.explained_variance(0) == doctest::Approx(0.0));
  CHECK(model.explained_variance(1) >= 0.0);
}

TEST_CASE("pca orthonormality and ordering hold on random matrices") {
  rng::Engine eng(rng::mix(23));
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 20 + static_cast<int>(eng.below(80));
    const int p = 2 + static_cast<int>(eng.below(5));
    const int k = 1 + static_cast<int>(eng.below(p));
    Eigen::MatrixXd xs(n, p);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < p; ++j) xs(i, j) = eng.normal(0, 1 + (j % 3));
    }
    const data::PCAModel model = data::pca_fit(xs, k);

    const Eigen::MatrixXd gram =
        model.components * model.components.transpose();
    CHECK((gram - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff() <
          1e-8);
    for (int j = 0; j + 1 < k; ++j) {
      CHECK(model.explained_variance(j) >= model.explained_variance(j + 1));
    }
    CHECK(model.explained_variance.minCoeff() >= 0.0);
  }
}
