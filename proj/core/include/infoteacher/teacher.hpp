#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "infoteacher/additive.hpp"
#include "infoteacher/dataset.hpp"
#include "infoteacher/mi.hpp"
#include "infoteacher/predictor.hpp"

namespace infoteacher::teacher {

enum class TeacherKind { oracle, naive, information };

std::string to_string(TeacherKind kind);

/// Binary assessment: decision 1 accepts the student. The comparison is
/// strict (statistic < threshold) for the information and oracle teachers
/// and non-strict (statistic <= threshold) for the naive MSE rule.
struct TeacherVerdict {
  int decision = 0;
  double statistic = 0;
  double threshold = 0;
  int m = 0;
  TeacherKind kind = TeacherKind::information;
};

/// Recomputes the decision bit from the reported fields.
int replay_decision(const TeacherVerdict& v);

/// Accepts iff the estimated input/residual mutual information on the
/// validation set stays below a_m.
TeacherVerdict information_teacher(const Predictor& predict,
                                   const data::Dataset& val,
                                   const mi::ScheduleParams& params);

/// Monte-Carlo surrogate of the infeasible gold standard: average squared
/// gap between the true function and the student over the given inputs.
TeacherVerdict oracle_teacher(const Predictor& f_true, const Predictor& predict,
                              const Eigen::MatrixXd& xs, double tol);

/// Accepts iff the empirical validation MSE is <= a.
TeacherVerdict naive_mse_teacher(const Predictor& predict,
                                 const data::Dataset& val, double a);

/// Wrong-decision rates per validation size under the null (student equals
/// the target) and the alternative.
struct ErrorRateCurve {
  std::vector<int> m_grid;
  std::vector<double> alpha_hat;  // fraction of wrong rejections of the null student
  std::vector<double> beta_hat;   // fraction of wrong acceptances of the alt student
  int trials = 0;
};

/// For each m, draws `trials` fresh validation sets from the model and
/// records both students' verdicts. Each trial's generator is seeded as
/// hash(seed, m, trial), so results do not depend on evaluation order.
/// Precondition: student_null is the model's own target function.
ErrorRateCurve monte_carlo_error_rates(const data::AdditiveModelSpec& spec,
                                       const Predictor& student_null,
                                       const Predictor& student_alt,
                                       const std::vector<int>& m_grid,
                                       int trials,
                                       const mi::ScheduleParams& params,
                                       std::uint64_t seed);

/// CSV with columns m, alpha_hat, beta_hat, trials.
std::string to_csv(const ErrorRateCurve& curve);
void save_csv(const ErrorRateCurve& curve, const std::string& path);

}  // namespace infoteacher::teacher
