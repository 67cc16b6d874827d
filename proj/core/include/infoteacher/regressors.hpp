#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "infoteacher/dataset.hpp"
#include "infoteacher/pca.hpp"
#include "infoteacher/predictor.hpp"

namespace infoteacher::regressors {

enum class Optimizer { adam, sgd };

Optimizer optimizer_from_string(const std::string& name);
std::string to_string(Optimizer opt);

struct MLPConfig {
  std::vector<int> hidden_layers = {128, 128};
  std::string activation = "relu";  // the only supported tag
  Optimizer optimizer = Optimizer::adam;
  double learning_rate = 1e-4;
  int batch_size = 64;
  int max_epochs = 50;
  double early_stop_tol = 1e-4;  // required val-loss improvement
  int patience = 5;              // epochs without improvement before stopping
  std::uint64_t seed = 0;
};

struct EpochLog {
  double train_loss = 0;
  double val_loss = 0;
};

enum class ModelKind { linear, knn, mlp };

std::string to_string(ModelKind kind);

struct LinearWeights {
  Eigen::MatrixXd coef;          // p x q
  Eigen::RowVectorXd intercept;  // length q
};

struct KnnParams {
  int k = 1;
  Eigen::MatrixXd xs;  // training inputs
  Eigen::MatrixXd ys;  // training outputs
};

/// Layer l maps d_{l-1} -> d_l: w[l] is (d_l x d_{l-1}), b[l] length d_l.
/// Hidden activations are rectified-linear, the output layer is linear.
struct MLPWeights {
  std::vector<Eigen::MatrixXd> w;
  std::vector<Eigen::VectorXd> b;
};

struct TrainedModel {
  ModelKind kind = ModelKind::linear;
  std::variant<LinearWeights, KnnParams, MLPWeights> params;
  std::vector<EpochLog> training_log;

  Eigen::MatrixXd predict(const Eigen::MatrixXd& xs) const;
  Predictor predictor() const;
};

/// Ordinary least squares with intercept via normal equations; a ridge
/// jitter of 1e-10 on the Gram diagonal keeps rank-deficient inputs
/// solvable.
TrainedModel fit_linear(const data::Dataset& train);

/// Mean of the k nearest training outputs under Euclidean distance, ties
/// broken by training index.
TrainedModel fit_knn(const data::Dataset& train, int k);

/// Minibatch squared-loss training with Adam (beta1 0.9, beta2 0.999,
/// eps 1e-8) or plain SGD; early stopping restores the best-epoch weights.
/// Throws TrainingError with the epoch index if the loss turns non-finite.
TrainedModel fit_mlp(const data::Dataset& train, const data::Dataset& val,
                     const MLPConfig& cfg);

/// Mean over rows of the squared output-error norm.
double mse(const Predictor& predict, const data::Dataset& ds);

namespace detail {
Eigen::MatrixXd mlp_forward(const MLPWeights& net, const Eigen::MatrixXd& x);
double mlp_loss(const MLPWeights& net, const Eigen::MatrixXd& x,
                const Eigen::MatrixXd& y);
/// Analytic gradients of mlp_loss w.r.t. every weight and bias.
MLPWeights mlp_gradients(const MLPWeights& net, const Eigen::MatrixXd& x,
                         const Eigen::MatrixXd& y, double* loss_out = nullptr);
MLPWeights init_mlp(const std::vector<int>& sizes, std::uint64_t seed);
}  // namespace detail

/// A deployable model: optional input standardization and PCA applied
/// before the fitted regressor.
struct ModelPipeline {
  std::optional<data::Standardizer> standardize;
  std::optional<data::PCAModel> pca;
  TrainedModel model;

  Eigen::MatrixXd transform_inputs(const Eigen::MatrixXd& xs) const;
  Predictor predictor() const;
};

std::string model_to_json(const ModelPipeline& pipeline);
ModelPipeline model_from_json(const std::string& text);
void save_model_json(const ModelPipeline& pipeline, const std::string& path);
ModelPipeline load_model_json(const std::string& path);

/// CSV with columns epoch, train_loss, val_loss.
std::string training_log_csv(const TrainedModel& model);

}  // namespace infoteacher::regressors
