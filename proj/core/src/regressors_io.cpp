// JSON (de)serialization for model pipelines and their weight stores.
#include <fstream>
#include <sstream>

#include "infoteacher/errors.hpp"
#include "infoteacher/regressors.hpp"
#include "json.hpp"

namespace infoteacher::regressors {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json matrix_to_json(const Eigen::MatrixXd& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows) {
  if (rows.empty()) throw IngestionError("model json: empty matrix");
  Eigen::MatrixXd m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) {
      throw IngestionError("model json: ragged matrix");
    }
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(i, j) = rows[i][j].get<double>();
    }
  }
  return m;
}

ordered_json vector_to_json(const Eigen::VectorXd& v) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::VectorXd vector_from_json(const json& arr) {
  Eigen::VectorXd v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) v(i) = arr[i].get<double>();
  return v;
}

}  // namespace

std::string model_to_json(const ModelPipeline& pipeline) {
  ordered_json j;
  if (pipeline.standardize) {
    j["preprocess"]["standardize"] = {
        {"mean", vector_to_json(pipeline.standardize->mean.transpose())},
        {"scale", vector_to_json(pipeline.standardize->scale.transpose())}};
  }
  if (pipeline.pca) {
    j["preprocess"]["pca"] = {
        {"mean", vector_to_json(pipeline.pca->mean.transpose())},
        {"components", matrix_to_json(pipeline.pca->components)},
        {"explained_variance", vector_to_json(pipeline.pca->explained_variance)}};
  }

  const TrainedModel& model = pipeline.model;
  ordered_json m;
  m["kind"] = to_string(model.kind);
  switch (model.kind) {
    case ModelKind::linear: {
      const auto& lw = std::get<LinearWeights>(model.params);
      m["coef"] = matrix_to_json(lw.coef);
      m["intercept"] = vector_to_json(lw.intercept.transpose());
      break;
    }
    case ModelKind::knn: {
      const auto& kp = std::get<KnnParams>(model.params);
      m["k"] = kp.k;
      m["xs"] = matrix_to_json(kp.xs);
      m["ys"] = matrix_to_json(kp.ys);
      break;
    }
    case ModelKind::mlp: {
      const auto& mw = std::get<MLPWeights>(model.params);
      ordered_json layers = ordered_json::array();
      for (std::size_t l = 0; l < mw.w.size(); ++l) {
        layers.push_back(
            {{"w", matrix_to_json(mw.w[l])}, {"b", vector_to_json(mw.b[l])}});
      }
      m["layers"] = std::move(layers);
      break;
    }
  }
  if (!model.training_log.empty()) {
    ordered_json log = ordered_json::array();
    for (const EpochLog& e : model.training_log) {
      log.push_back({e.train_loss, e.val_loss});
    }
    m["training_log"] = std::move(log);
  }
  j["model"] = std::move(m);
  return j.dump(2);
}

ModelPipeline model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw IngestionError(std::string("model json: ") + e.what());
  }

  ModelPipeline pipeline;
  if (j.contains("preprocess")) {
    const json& pre = j["preprocess"];
    if (pre.contains("standardize")) {
      data::Standardizer s;
      s.mean = vector_from_json(pre["standardize"]["mean"]).transpose();
      s.scale = vector_from_json(pre["standardize"]["scale"]).transpose();
      pipeline.standardize = std::move(s);
    }
    if (pre.contains("pca")) {
      data::PCAModel p;
      p.mean = vector_from_json(pre["pca"]["mean"]).transpose();
      p.components = matrix_from_json(pre["pca"]["components"]);
      p.explained_variance = vector_from_json(pre["pca"]["explained_variance"]);
      pipeline.pca = std::move(p);
    }
  }

  const json& m = j.at("model");
  const std::string kind = m.at("kind").get<std::string>();
  TrainedModel& model = pipeline.model;
  if (kind == "linear") {
    model.kind = ModelKind::linear;
    model.params = LinearWeights{
        matrix_from_json(m.at("coef")),
        vector_from_json(m.at("intercept")).transpose()};
  } else if (kind == "knn") {
    model.kind = ModelKind::knn;
    model.params = KnnParams{m.at("k").get<int>(), matrix_from_json(m.at("xs")),
                             matrix_from_json(m.at("ys"))};
  } else if (kind == "mlp") {
    model.kind = ModelKind::mlp;
    MLPWeights mw;
    for (const json& layer : m.at("layers")) {
      mw.w.push_back(matrix_from_json(layer.at("w")));
      mw.b.push_back(vector_from_json(layer.at("b")));
    }
    model.params = std::move(mw);
  } else {
    throw IngestionError("model json: unknown kind '" + kind + "'");
  }

  if (m.contains("training_log")) {
    for (const json& e : m["training_log"]) {
      model.training_log.push_back({e[0].get<double>(), e[1].get<double>()});
    }
  }
  return pipeline;
}

void save_model_json(const ModelPipeline& pipeline, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IngestionError("cannot open for writing: " + path);
  out << model_to_json(pipeline);
}

ModelPipeline load_model_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

}  // namespace infoteacher::regressors
