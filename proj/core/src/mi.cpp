#include "infoteacher/mi.hpp"

#include <cassert>
#include <cmath>

#include "infoteacher/errors.hpp"

namespace infoteacher::mi {

tsp::JointSamples residuals(const data::Dataset& ds, const Predictor& predict) {
  Eigen::MatrixXd pred = predict(ds.xs());
  if (pred.rows() != ds.n() || pred.cols() != ds.q()) {
    throw EvaluationError("residuals: predictor returned wrong shape");
  }
  for (Eigen::Index i = 0; i < pred.rows(); ++i) {
    if (!pred.row(i).allFinite()) {
      throw EvaluationError("residuals: non-finite prediction at row " +
                            std::to_string(i));
    }
  }
  return tsp::JointSamples(ds.xs(), ds.ys() - pred);
}

MIEstimate estimate_mi(const tsp::JointSamples& samples,
                       const ScheduleParams& params) {
  if (samples.size() < 1) throw SizeError("estimate_mi: empty sample set");

  const tsp::TreePartition full = tsp::grow_full_tree(samples, params.partition);
  const tsp::TreePartition pruned = tsp::prune(full, params.partition.lambda);

  MIEstimate est;
  est.m = samples.size();
  est.leaf_count = pruned.leaf_count();
  est.params = params;
  est.value = pruned.leaf_term_sum();
  // The penalized objective never keeps a cell set summing below the
  // trivial partition's zero.
  assert(est.value > -1e-9);
  if (est.value < 0) est.value = 0;
  return est;
}

double threshold(int m, const ScheduleParams& params) {
  if (m < 1) throw ConfigError("threshold: m must be >= 1");
  if (params.a_scale <= 0) throw ConfigError("threshold: a_scale must be positive");
  if (params.a_exp <= 0 || params.a_exp >= 1.0 / 3.0) {
    throw ConfigError("threshold: a_exp must lie in (0, 1/3)");
  }
  return params.a_scale * std::pow(double(m), -params.a_exp);
}

}  // namespace infoteacher::mi
