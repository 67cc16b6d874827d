#pragma once

#include "infoteacher/dataset.hpp"
#include "infoteacher/partition.hpp"
#include "infoteacher/predictor.hpp"

namespace infoteacher::mi {

/// Estimator schedule: partition growth/pruning parameters plus the
/// vanishing decision threshold a_m = a_scale * m^(-a_exp).
///
/// The cited decision-scheme family also carries a summable sequence d_m
/// (with 1/d_m = O(exp(m^{1/3}))) inside its confidence-sequence
/// construction. No operational recipe for it exists at this level; its
/// influence is absorbed entirely by the threshold schedule below, so it is
/// documented here rather than parameterized.
struct ScheduleParams {
  tsp::PartitionParams partition;
  double a_scale = 0.165;
  double a_exp = 0.16;
};

/// Nonnegative statistic in nats together with the context that produced it.
struct MIEstimate {
  double value = 0;
  int m = 0;
  int leaf_count = 0;
  ScheduleParams params;
};

/// r_i = y_i - predict(x_i), order preserving. Throws EvaluationError naming
/// the first row with a non-finite prediction.
tsp::JointSamples residuals(const data::Dataset& ds, const Predictor& predict);

/// Grows the median-split tree, prunes it, and sums the per-leaf terms
///   P(A) * log( P(A) / (P(A1 x R^q) * P(R^p x A2)) )
/// in nats. Degenerate data collapses to the single-cell partition and
/// yields exactly 0.
MIEstimate estimate_mi(const tsp::JointSamples& samples,
                       const ScheduleParams& params);

/// Decision threshold a_m; strictly decreasing in m, vanishing as m grows.
double threshold(int m, const ScheduleParams& params);

}  // namespace infoteacher::mi
