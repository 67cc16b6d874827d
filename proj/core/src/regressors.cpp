#include "infoteacher/regressors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "infoteacher/csv.hpp"
#include "infoteacher/errors.hpp"
#include "infoteacher/rng.hpp"

namespace infoteacher::regressors {

Optimizer optimizer_from_string(const std::string& name) {
  if (name == "adam") return Optimizer::adam;
  if (name == "sgd") return Optimizer::sgd;
  throw ConfigError("unknown optimizer: '" + name + "'");
}

std::string to_string(Optimizer opt) {
  return opt == Optimizer::adam ? "adam" : "sgd";
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::linear: return "linear";
    case ModelKind::knn: return "knn";
    case ModelKind::mlp: return "mlp";
  }
  return "?";
}

Eigen::MatrixXd TrainedModel::predict(const Eigen::MatrixXd& xs) const {
  switch (kind) {
    case ModelKind::linear: {
      const auto& lw = std::get<LinearWeights>(params);
      return (xs * lw.coef).rowwise() + lw.intercept;
    }
    case ModelKind::knn: {
      const auto& kp = std::get<KnnParams>(params);
      const int n_train = static_cast<int>(kp.xs.rows());
      Eigen::MatrixXd out(xs.rows(), kp.ys.cols());
      std::vector<int> order(n_train);
      for (Eigen::Index i = 0; i < xs.rows(); ++i) {
        const Eigen::VectorXd d2 =
            (kp.xs.rowwise() - xs.row(i)).rowwise().squaredNorm();
        std::iota(order.begin(), order.end(), 0);
        std::partial_sort(order.begin(), order.begin() + kp.k, order.end(),
                          [&](int a, int b) {
                            return d2(a) != d2(b) ? d2(a) < d2(b) : a < b;
                          });
        Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(kp.ys.cols());
        for (int j = 0; j < kp.k; ++j) acc += kp.ys.row(order[j]);
        out.row(i) = acc / kp.k;
      }
      return out;
    }
    case ModelKind::mlp:
      return detail::mlp_forward(std::get<MLPWeights>(params), xs);
  }
  throw std::logic_error("unreachable model kind");
}

Predictor TrainedModel::predictor() const {
  auto self = std::make_shared<TrainedModel>(*this);
  return [self](const Eigen::MatrixXd& xs) { return self->predict(xs); };
}

TrainedModel fit_linear(const data::Dataset& train) {
  if (train.n() < train.p() + 1) {
    throw SizeError("fit_linear: needs at least p + 1 rows");
  }
  const int p = train.p();
  Eigen::MatrixXd z(train.n(), p + 1);
  z.leftCols(p) = train.xs();
  z.col(p).setOnes();

  Eigen::MatrixXd gram = z.transpose() * z;
  gram.diagonal().array() += 1e-10;
  const Eigen::MatrixXd beta = gram.ldlt().solve(z.transpose() * train.ys());

  TrainedModel model;
  model.kind = ModelKind::linear;
  model.params = LinearWeights{beta.topRows(p), beta.row(p)};
  return model;
}

TrainedModel fit_knn(const data::Dataset& train, int k) {
  if (k < 1 || k > train.n()) {
    throw ConfigError("fit_knn: k = " + std::to_string(k) +
                      " out of range for n = " + std::to_string(train.n()));
  }
  TrainedModel model;
  model.kind = ModelKind::knn;
  model.params = KnnParams{k, train.xs(), train.ys()};
  return model;
}

namespace detail {

MLPWeights init_mlp(const std::vector<int>& sizes, std::uint64_t seed) {
  rng::Engine eng(rng::derive(seed, 0x11ULL));
  MLPWeights net;
  for (std::size_t l = 1; l < sizes.size(); ++l) {
    const int fan_in = sizes[l - 1];
    const int fan_out = sizes[l];
    const double s = std::sqrt(6.0 / (fan_in + fan_out));
    Eigen::MatrixXd w(fan_out, fan_in);
    for (int i = 0; i < fan_out; ++i) {
      for (int j = 0; j < fan_in; ++j) w(i, j) = eng.uniform(-s, s);
    }
    net.w.push_back(std::move(w));
    net.b.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  return net;
}

Eigen::MatrixXd mlp_forward(const MLPWeights& net, const Eigen::MatrixXd& x) {
  Eigen::MatrixXd a = x;
  for (std::size_t l = 0; l < net.w.size(); ++l) {
    a = (a * net.w[l].transpose()).rowwise() + net.b[l].transpose();
    if (l + 1 < net.w.size()) a = a.cwiseMax(0.0);
  }
  return a;
}

double mlp_loss(const MLPWeights& net, const Eigen::MatrixXd& x,
                const Eigen::MatrixXd& y) {
  return (mlp_forward(net, x) - y).array().square().rowwise().sum().mean();
}

MLPWeights mlp_gradients(const MLPWeights& net, const Eigen::MatrixXd& x,
                         const Eigen::MatrixXd& y, double* loss_out) {
  const std::size_t layers = net.w.size();
  std::vector<Eigen::MatrixXd> acts(layers + 1);  // acts[0] = inputs
  acts[0] = x;
  for (std::size_t l = 0; l < layers; ++l) {
    acts[l + 1] =
        (acts[l] * net.w[l].transpose()).rowwise() + net.b[l].transpose();
    if (l + 1 < layers) acts[l + 1] = acts[l + 1].cwiseMax(0.0);
  }

  const double batch = static_cast<double>(x.rows());
  if (loss_out) {
    *loss_out = (acts[layers] - y).array().square().rowwise().sum().mean();
  }

  MLPWeights grads;
  grads.w.resize(layers);
  grads.b.resize(layers);
  Eigen::MatrixXd delta = 2.0 / batch * (acts[layers] - y);
  for (std::size_t l = layers; l-- > 0;) {
    grads.w[l] = delta.transpose() * acts[l];
    grads.b[l] = delta.colwise().sum();
    if (l > 0) {
      // ReLU gate: post-activation is positive exactly where the unit fired.
      delta = (delta * net.w[l]).cwiseProduct(
          (acts[l].array() > 0.0).cast<double>().matrix());
    }
  }
  return grads;
}

}  // namespace detail

namespace {

void validate(const MLPConfig& cfg) {
  if (cfg.hidden_layers.empty()) throw ConfigError("mlp: needs at least one hidden layer");
  for (int h : cfg.hidden_layers) {
    if (h < 1) throw ConfigError("mlp: hidden layer sizes must be >= 1");
  }
  if (cfg.activation != "relu") {
    throw ConfigError("mlp: unsupported activation '" + cfg.activation + "'");
  }
  if (cfg.learning_rate <= 0) throw ConfigError("mlp: learning_rate must be positive");
  if (cfg.batch_size < 1) throw ConfigError("mlp: batch_size must be >= 1");
  if (cfg.max_epochs < 1) throw ConfigError("mlp: max_epochs must be >= 1");
  if (cfg.early_stop_tol <= 0) throw ConfigError("mlp: early_stop_tol must be positive");
  if (cfg.patience < 1) throw ConfigError("mlp: patience must be >= 1");
}

struct AdamState {
  std::vector<Eigen::MatrixXd> mw, vw;
  std::vector<Eigen::VectorXd> mb, vb;
  long t = 0;

  explicit AdamState(const MLPWeights& net) {
    for (std::size_t l = 0; l < net.w.size(); ++l) {
      mw.push_back(Eigen::MatrixXd::Zero(net.w[l].rows(), net.w[l].cols()));
      vw.push_back(Eigen::MatrixXd::Zero(net.w[l].rows(), net.w[l].cols()));
      mb.push_back(Eigen::VectorXd::Zero(net.b[l].size()));
      vb.push_back(Eigen::VectorXd::Zero(net.b[l].size()));
    }
  }

  void step(MLPWeights& net, const MLPWeights& g, double lr) {
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    ++t;
    const double c1 = 1.0 - std::pow(beta1, double(t));
    const double c2 = 1.0 - std::pow(beta2, double(t));
    for (std::size_t l = 0; l < net.w.size(); ++l) {
      mw[l] = beta1 * mw[l] + (1 - beta1) * g.w[l];
      vw[l] = beta2 * vw[l] + (1 - beta2) * g.w[l].cwiseProduct(g.w[l]);
      net.w[l].array() -=
          lr * (mw[l].array() / c1) / ((vw[l].array() / c2).sqrt() + eps);
      mb[l] = beta1 * mb[l] + (1 - beta1) * g.b[l];
      vb[l] = beta2 * vb[l] + (1 - beta2) * g.b[l].cwiseProduct(g.b[l]);
      net.b[l].array() -=
          lr * (mb[l].array() / c1) / ((vb[l].array() / c2).sqrt() + eps);
    }
  }
};

}  // namespace

TrainedModel fit_mlp(const data::Dataset& train, const data::Dataset& val,
                     const MLPConfig& cfg) {
  validate(cfg);
  if (val.p() != train.p() || val.q() != train.q()) {
    throw SizeError("fit_mlp: train/val dimensions differ");
  }

  std::vector<int> sizes;
  sizes.push_back(train.p());
  sizes.insert(sizes.end(), cfg.hidden_layers.begin(), cfg.hidden_layers.end());
  sizes.push_back(train.q());

  MLPWeights net = detail::init_mlp(sizes, cfg.seed);
  AdamState adam(net);

  MLPWeights best = net;
  double best_val = std::numeric_limits<double>::infinity();
  int stall = 0;

  std::vector<EpochLog> log;
  std::vector<int> perm(train.n());
  std::iota(perm.begin(), perm.end(), 0);

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    rng::Engine shuffle_eng(rng::derive(cfg.seed, 0xE0ULL, epoch));
    shuffle_eng.shuffle(perm);

    double loss_sum = 0;
    int batches = 0;
    for (int start = 0; start < train.n(); start += cfg.batch_size) {
      const int count = std::min(cfg.batch_size, train.n() - start);
      Eigen::MatrixXd xb(count, train.p());
      Eigen::MatrixXd yb(count, train.q());
      for (int i = 0; i < count; ++i) {
        xb.row(i) = train.xs().row(perm[start + i]);
        yb.row(i) = train.ys().row(perm[start + i]);
      }

      double batch_loss = 0;
      const MLPWeights grads = detail::mlp_gradients(net, xb, yb, &batch_loss);
      if (!std::isfinite(batch_loss)) {
        throw TrainingError("fit_mlp: non-finite loss at epoch " +
                            std::to_string(epoch), epoch);
      }
      if (cfg.optimizer == Optimizer::adam) {
        adam.step(net, grads, cfg.learning_rate);
      } else {
        for (std::size_t l = 0; l < net.w.size(); ++l) {
          net.w[l] -= cfg.learning_rate * grads.w[l];
          net.b[l] -= cfg.learning_rate * grads.b[l];
        }
      }
      loss_sum += batch_loss;
      ++batches;
    }

    const double val_loss = detail::mlp_loss(net, val.xs(), val.ys());
    if (!std::isfinite(val_loss)) {
      throw TrainingError("fit_mlp: non-finite validation loss at epoch " +
                          std::to_string(epoch), epoch);
    }
    log.push_back({loss_sum / batches, val_loss});

    if (best_val - val_loss > cfg.early_stop_tol) {
      stall = 0;
    } else {
      ++stall;
    }
    if (val_loss < best_val) {
      best_val = val_loss;
      best = net;
    }
    if (stall >= cfg.patience) break;
  }

  TrainedModel model;
  model.kind = ModelKind::mlp;
  model.params = std::move(best);
  model.training_log = std::move(log);
  return model;
}

double mse(const Predictor& predict, const data::Dataset& ds) {
  return (ds.ys() - predict(ds.xs())).array().square().rowwise().sum().mean();
}

Eigen::MatrixXd ModelPipeline::transform_inputs(const Eigen::MatrixXd& xs) const {
  Eigen::MatrixXd z = xs;
  if (standardize) z = standardize->transform(z);
  if (pca) z = data::pca_transform(*pca, z);
  return z;
}

Predictor ModelPipeline::predictor() const {
  auto self = std::make_shared<ModelPipeline>(*this);
  return [self](const Eigen::MatrixXd& xs) {
    return self->model.predict(self->transform_inputs(xs));
  };
}

std::string training_log_csv(const TrainedModel& model) {
  std::string out = "epoch,train_loss,val_loss\n";
  for (std::size_t i = 0; i < model.training_log.size(); ++i) {
    out += std::to_string(i) + ',' +
           data::format_double(model.training_log[i].train_loss) + ',' +
           data::format_double(model.training_log[i].val_loss) + '\n';
  }
  return out;
}

}  // namespace infoteacher::regressors
