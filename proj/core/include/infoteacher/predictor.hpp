#pragma once

#include <Eigen/Dense>
#include <functional>

namespace infoteacher {

/// A regressor's answer: maps a batch of inputs (n x p) to outputs (n x q).
using Predictor = std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>;

inline Predictor zero_predictor(int q = 1) {
  return [q](const Eigen::MatrixXd& xs) {
    return Eigen::MatrixXd::Zero(xs.rows(), q);
  };
}

inline Predictor constant_predictor(double c, int q = 1) {
  return [c, q](const Eigen::MatrixXd& xs) {
    return Eigen::MatrixXd::Constant(xs.rows(), q, c);
  };
}

/// base(x) + c on every output coordinate.
inline Predictor offset_predictor(Predictor base, double c) {
  return [base = std::move(base), c](const Eigen::MatrixXd& xs) {
    return (base(xs).array() + c).matrix();
  };
}

/// g(f(x)) with f applied first.
inline Predictor compose(std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)> first,
                         Predictor second) {
  return [first = std::move(first), second = std::move(second)](
             const Eigen::MatrixXd& xs) { return second(first(xs)); };
}

}  // namespace infoteacher
