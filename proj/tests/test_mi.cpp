#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "infoteacher/additive.hpp"
#include "infoteacher/errors.hpp"
#include "infoteacher/mi.hpp"
#include "infoteacher/rng.hpp"

using namespace infoteacher;
using tsp::JointSamples;

namespace {

// Bivariate normal with the given correlation; closed-form MI is
// -0.5 * ln(1 - rho^2).
JointSamples bivariate_gaussian(int m, double rho, std::uint64_t seed) {
  rng::Engine eng(rng::mix(seed));
  Eigen::MatrixXd x(m, 1), r(m, 1);
  for (int i = 0; i < m; ++i) {
    const double u = eng.normal();
    x(i, 0) = u;
    r(i, 0) = rho * u + std::sqrt(1.0 - rho * rho) * eng.normal();
  }
  return JointSamples(std::move(x), std::move(r));
}

JointSamples independent_pair(int m, std::uint64_t seed) {
  rng::Engine eng(rng::mix(seed));
  Eigen::MatrixXd x(m, 1), r(m, 1);
  for (int i = 0; i < m; ++i) {
    x(i, 0) = eng.canonical();
    r(i, 0) = eng.normal();
  }
  return JointSamples(std::move(x), std::move(r));
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST_CASE("threshold follows the power-law schedule") {
  mi::ScheduleParams params;
  params.a_scale = 1.0;
  params.a_exp = 0.2;
  CHECK(mi::threshold(1, params) == doctest::Approx(1.0));
  CHECK(mi::threshold(100000, params) == doctest::Approx(0.1));
  for (int m = 1; m < 2000; m += 37) {
    CHECK(mi::threshold(m, params) > mi::threshold(m + 1, params));
  }
  params.a_exp = 0.4;
  CHECK_THROWS_AS(mi::threshold(10, params), ConfigError);
}

TEST_CASE("residuals subtract predictions row by row") {
  data::AdditiveModelSpec spec;
  spec.target.f_id = "sine10";
  spec.noise = {data::NoiseFamily::gaussian, 0.25};
  spec.input_law = {data::InputFamily::uniform, 0.0, 1.0, 1};
  const data::Dataset ds = data::sample_additive(spec, 4000, 3);
  const Predictor truth = data::target_predictor(spec.target, 1);

  SUBCASE("true function leaves pure noise") {
    const JointSamples z = mi::residuals(ds, truth);
    const double mean = z.r().col(0).mean();
    const double var =
        (z.r().col(0).array() - mean).square().sum() / (z.size() - 1);
    CHECK(var == doctest::Approx(0.25).epsilon(0.1));
  }

  SUBCASE("zero predictor returns the outputs unchanged") {
    const JointSamples z = mi::residuals(ds, zero_predictor(1));
    CHECK(z.r() == ds.ys());
  }

  SUBCASE("exact zero residuals under zero noise") {
    data::AdditiveModelSpec clean = spec;
    clean.noise = {data::NoiseFamily::none, 0.0};
    const data::Dataset noiseless = data::sample_additive(clean, 100, 4);
    const JointSamples z = mi::residuals(noiseless, truth);
    CHECK(z.r().isZero(0.0));
  }

  SUBCASE("non-finite predictions are reported with their row") {
    const Predictor broken = [](const Eigen::MatrixXd& xs) {
      Eigen::MatrixXd out = Eigen::MatrixXd::Zero(xs.rows(), 1);
      out(2, 0) = std::numeric_limits<double>::quiet_NaN();
      return out;
    };
    CHECK_THROWS_AS(mi::residuals(ds, broken), EvaluationError);
  }
}

TEST_CASE("single-cell partitions give exactly zero") {
  const mi::MIEstimate est = mi::estimate_mi(independent_pair(3, 2), {});
  CHECK(est.leaf_count == 1);
  CHECK(est.value == 0.0);
}

TEST_CASE("estimate is nonnegative on arbitrary data") {
  for (int trial = 0; trial < 30; ++trial) {
    const JointSamples z = trial % 2 ? independent_pair(200 + trial * 17, trial)
                                     : bivariate_gaussian(200 + trial * 17, 0.4, trial);
    CHECK(mi::estimate_mi(z, {}).value >= 0.0);
  }
}

TEST_CASE("permutation invariance is exact") {
  const JointSamples z = bivariate_gaussian(1500, 0.6, 77);
  const mi::MIEstimate base = mi::estimate_mi(z, {});

  rng::Engine eng(rng::mix(5));
  std::vector<int> perm(z.size());
  std::iota(perm.begin(), perm.end(), 0);
  eng.shuffle(perm);
  Eigen::MatrixXd x(z.size(), 1), r(z.size(), 1);
  for (int i = 0; i < z.size(); ++i) {
    x(i, 0) = z.x()(perm[i], 0);
    r(i, 0) = z.r()(perm[i], 0);
  }
  const mi::MIEstimate shuffled = mi::estimate_mi(JointSamples(x, r), {});
  CHECK(shuffled.value == base.value);
  CHECK(shuffled.leaf_count == base.leaf_count);
}

TEST_CASE("strictly increasing coordinate maps leave the full tree invariant") {
  const JointSamples z = bivariate_gaussian(1200, 0.5, 13);
  mi::ScheduleParams params;
  params.partition.lambda = 0.0;  // full, unpruned tree

  const mi::MIEstimate base = mi::estimate_mi(z, params);
  Eigen::MatrixXd x2 = z.x();
  for (int i = 0; i < z.size(); ++i) {
    x2(i, 0) = std::exp(0.7 * x2(i, 0)) + 3.0;  // strictly increasing
  }
  const mi::MIEstimate mapped = mi::estimate_mi(JointSamples(x2, z.r()), params);
  CHECK(mapped.value == base.value);
  CHECK(mapped.leaf_count == base.leaf_count);
}

TEST_CASE("gaussian dependence is recovered near the closed form") {
  // Oracle: I = -0.5 ln(1 - rho^2) = 0.8304 nats at rho = 0.9.
  std::vector<double> estimates;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    estimates.push_back(mi::estimate_mi(bivariate_gaussian(20000, 0.9, seed), {}).value);
  }
  CHECK(std::abs(median(estimates) - 0.8304) < 0.15);
}

TEST_CASE("independent draws stay below the threshold") {
  mi::ScheduleParams params;
  int below = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const mi::MIEstimate est =
        mi::estimate_mi(independent_pair(20000, 100 + seed), params);
    below += est.value <= mi::threshold(20000, params);
  }
  CHECK(below >= 9);
}

TEST_CASE("median estimate grows with sample size under dependence") {
  for (const double rho : {0.5, 0.9}) {
    std::vector<double> medians;
    for (const int m : {500, 2000, 8000, 20000}) {
      std::vector<double> vals;
      for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        vals.push_back(
            mi::estimate_mi(bivariate_gaussian(m, rho, 1000 * m + seed), {}).value);
      }
      medians.push_back(median(vals));
    }
    int inversions = 0;
    for (std::size_t i = 0; i + 1 < medians.size(); ++i) {
      inversions += medians[i] > medians[i + 1];
    }
    CHECK(inversions <= 1);
  }
}
