#pragma once

#include <Eigen/Dense>

namespace infoteacher::data {

/// Principal components of the sample covariance (denominator n-1).
/// Component rows are orthonormal, explained_variance is nonincreasing,
/// and each component's largest-magnitude entry is positive so fits are
/// reproducible.
struct PCAModel {
  Eigen::RowVectorXd mean;          // length p
  Eigen::MatrixXd components;       // k x p, rows are principal directions
  Eigen::VectorXd explained_variance;  // length k, descending
};

/// Throws SizeError when k > p or n < 2.
PCAModel pca_fit(const Eigen::MatrixXd& xs, int k);

/// Centered projection onto the components: (xs - mean) * components^T.
Eigen::MatrixXd pca_transform(const PCAModel& model, const Eigen::MatrixXd& xs);

/// Maps scores back to the original space; exact when k = p.
Eigen::MatrixXd pca_inverse_transform(const PCAModel& model,
                                      const Eigen::MatrixXd& zs);

}  // namespace infoteacher::data
