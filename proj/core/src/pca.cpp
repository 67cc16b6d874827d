#include "infoteacher/pca.hpp"

#include <cmath>

#include "infoteacher/errors.hpp"

namespace infoteacher::data {

PCAModel pca_fit(const Eigen::MatrixXd& xs, int k) {
  const int n = static_cast<int>(xs.rows());
  const int p = static_cast<int>(xs.cols());
  if (k < 1 || k > p) {
    throw SizeError("pca_fit: k = " + std::to_string(k) +
                    " out of range for p = " + std::to_string(p));
  }
  if (n < 2) throw SizeError("pca_fit: needs at least 2 rows");

  PCAModel model;
  model.mean = xs.colwise().mean();
  const Eigen::MatrixXd centered = xs.rowwise() - model.mean;
  const Eigen::MatrixXd cov = centered.transpose() * centered / double(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("pca_fit: eigendecomposition failed");
  }

  // Eigen returns eigenvalues in ascending order; take the top k.
  model.components.resize(k, p);
  model.explained_variance.resize(k);
  for (int i = 0; i < k; ++i) {
    const int src = p - 1 - i;
    Eigen::RowVectorXd v = solver.eigenvectors().col(src).transpose();
    int arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    model.components.row(i) = v;
    model.explained_variance(i) = std::max(0.0, solver.eigenvalues()(src));
  }
  return model;
}

Eigen::MatrixXd pca_transform(const PCAModel& model, const Eigen::MatrixXd& xs) {
  if (xs.cols() != model.mean.cols()) {
    throw SizeError("pca_transform: input has wrong width");
  }
  return (xs.rowwise() - model.mean) * model.components.transpose();
}

Eigen::MatrixXd pca_inverse_transform(const PCAModel& model,
                                      const Eigen::MatrixXd& zs) {
  return (zs * model.components).rowwise() + model.mean;
}

}  // namespace infoteacher::data
