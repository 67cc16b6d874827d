#include "infoteacher/teacher.hpp"

#include <fstream>

#include "infoteacher/csv.hpp"
#include "infoteacher/errors.hpp"
#include "infoteacher/rng.hpp"

namespace infoteacher::teacher {

std::string to_string(TeacherKind kind) {
  switch (kind) {
    case TeacherKind::oracle: return "oracle";
    case TeacherKind::naive: return "naive";
    case TeacherKind::information: return "information";
  }
  return "?";
}

int replay_decision(const TeacherVerdict& v) {
  if (v.kind == TeacherKind::naive) return v.statistic <= v.threshold ? 1 : 0;
  return v.statistic < v.threshold ? 1 : 0;
}

TeacherVerdict information_teacher(const Predictor& predict,
                                   const data::Dataset& val,
                                   const mi::ScheduleParams& params) {
  if (val.n() < 2) throw SizeError("information_teacher: needs m >= 2");
  const mi::MIEstimate est = mi::estimate_mi(mi::residuals(val, predict), params);

  TeacherVerdict v;
  v.kind = TeacherKind::information;
  v.statistic = est.value;
  v.threshold = mi::threshold(val.n(), params);
  v.m = val.n();
  v.decision = replay_decision(v);
  return v;
}

TeacherVerdict oracle_teacher(const Predictor& f_true, const Predictor& predict,
                              const Eigen::MatrixXd& xs, double tol) {
  if (xs.rows() < 1) throw SizeError("oracle_teacher: needs n >= 1");
  if (tol < 0) throw ConfigError("oracle_teacher: tol must be >= 0");
  const Eigen::MatrixXd gap = f_true(xs) - predict(xs);

  TeacherVerdict v;
  v.kind = TeacherKind::oracle;
  v.statistic = gap.array().square().rowwise().sum().mean();
  v.threshold = tol;
  v.m = static_cast<int>(xs.rows());
  v.decision = replay_decision(v);
  return v;
}

TeacherVerdict naive_mse_teacher(const Predictor& predict,
                                 const data::Dataset& val, double a) {
  if (val.n() < 1) throw SizeError("naive_mse_teacher: needs n >= 1");
  if (a <= 0) throw ConfigError("naive_mse_teacher: threshold must be positive");
  const Eigen::MatrixXd err = val.ys() - predict(val.xs());

  TeacherVerdict v;
  v.kind = TeacherKind::naive;
  v.statistic = err.array().square().rowwise().sum().mean();
  v.threshold = a;
  v.m = val.n();
  v.decision = replay_decision(v);
  return v;
}

ErrorRateCurve monte_carlo_error_rates(const data::AdditiveModelSpec& spec,
                                       const Predictor& student_null,
                                       const Predictor& student_alt,
                                       const std::vector<int>& m_grid,
                                       int trials,
                                       const mi::ScheduleParams& params,
                                       std::uint64_t seed) {
  if (trials < 1) throw ConfigError("monte_carlo_error_rates: trials must be >= 1");
  if (!std::is_sorted(m_grid.begin(), m_grid.end())) {
    throw ConfigError("monte_carlo_error_rates: m_grid must be increasing");
  }

  ErrorRateCurve curve;
  curve.m_grid = m_grid;
  curve.trials = trials;
  for (const int m : m_grid) {
    int null_rejections = 0;
    int alt_acceptances = 0;
    for (int t = 0; t < trials; ++t) {
      const std::uint64_t trial_seed =
          rng::derive(seed, static_cast<std::uint64_t>(m),
                      static_cast<std::uint64_t>(t));
      const data::Dataset val = data::sample_additive(spec, m, trial_seed);
      null_rejections += information_teacher(student_null, val, params).decision == 0;
      alt_acceptances += information_teacher(student_alt, val, params).decision == 1;
    }
    curve.alpha_hat.push_back(double(null_rejections) / trials);
    curve.beta_hat.push_back(double(alt_acceptances) / trials);
  }
  return curve;
}

std::string to_csv(const ErrorRateCurve& curve) {
  std::string out = "m,alpha_hat,beta_hat,trials\n";
  for (std::size_t i = 0; i < curve.m_grid.size(); ++i) {
    out += std::to_string(curve.m_grid[i]) + ',' +
           data::format_double(curve.alpha_hat[i]) + ',' +
           data::format_double(curve.beta_hat[i]) + ',' +
           std::to_string(curve.trials) + '\n';
  }
  return out;
}

void save_csv(const ErrorRateCurve& curve, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IngestionError("cannot open for writing: " + path);
  out << to_csv(curve);
}

}  // namespace infoteacher::teacher
