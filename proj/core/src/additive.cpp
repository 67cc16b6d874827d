#include "infoteacher/additive.hpp"

#include <algorithm>
#include <cmath>

#include "infoteacher/errors.hpp"
#include "infoteacher/rng.hpp"

namespace infoteacher::data {

double NoiseSpec::stddev() const {
  switch (family) {
    case NoiseFamily::gaussian:
      return std::sqrt(param);
    case NoiseFamily::uniform:
      return param / std::sqrt(3.0);
    case NoiseFamily::laplace:
      return param * std::sqrt(2.0);
    case NoiseFamily::none:
      return 0.0;
  }
  return 0.0;
}

double NoiseSpec::sample(double w) const {
  switch (family) {
    case NoiseFamily::gaussian:
      return std::sqrt(param) * rng::inv_normal_cdf(w);
    case NoiseFamily::uniform:
      return param * (2.0 * w - 1.0);
    case NoiseFamily::laplace:
      return w < 0.5 ? param * std::log(2.0 * w)
                     : -param * std::log(2.0 * (1.0 - w));
    case NoiseFamily::none:
      return 0.0;
  }
  return 0.0;
}

NoiseFamily noise_family_from_string(const std::string& name) {
  if (name == "gaussian") return NoiseFamily::gaussian;
  if (name == "uniform") return NoiseFamily::uniform;
  if (name == "laplace") return NoiseFamily::laplace;
  if (name == "none") return NoiseFamily::none;
  throw ConfigError("unknown noise family: '" + name + "'");
}

std::string to_string(NoiseFamily family) {
  switch (family) {
    case NoiseFamily::gaussian: return "gaussian";
    case NoiseFamily::uniform: return "uniform";
    case NoiseFamily::laplace: return "laplace";
    case NoiseFamily::none: return "none";
  }
  return "?";
}

int AdditiveModelSpec::q() const {
  return target.f_id == "identity" ? input_law.dim : 1;
}

namespace {

double interp_table(const std::vector<double>& tx, const std::vector<double>& ty,
                    double x) {
  if (x <= tx.front()) return ty.front();
  if (x >= tx.back()) return ty.back();
  const auto it = std::upper_bound(tx.begin(), tx.end(), x);
  const std::size_t hi = it - tx.begin();
  const double t = (x - tx[hi - 1]) / (tx[hi] - tx[hi - 1]);
  return ty[hi - 1] + t * (ty[hi] - ty[hi - 1]);
}

}  // namespace

Predictor target_predictor(const TargetSpec& target, int p) {
  if (target.f_id == "sine10") {
    if (p != 1) throw ConfigError("target 'sine10' requires p = 1");
    return [](const Eigen::MatrixXd& xs) {
      return (10.0 * xs.col(0).array()).sin().matrix().eval();
    };
  }
  if (target.f_id == "identity") {
    return [](const Eigen::MatrixXd& xs) { return xs; };
  }
  if (target.f_id == "zero") {
    return zero_predictor(1);
  }
  if (target.f_id == "constant") {
    return constant_predictor(target.c, 1);
  }
  if (target.f_id == "tabulated") {
    if (p != 1) throw ConfigError("target 'tabulated' requires p = 1");
    if (target.table_x.size() < 2 ||
        target.table_x.size() != target.table_y.size()) {
      throw ConfigError("target 'tabulated' needs matching x/y tables (>= 2 points)");
    }
    if (!std::is_sorted(target.table_x.begin(), target.table_x.end())) {
      throw ConfigError("target 'tabulated' x table must be sorted");
    }
    return [tx = target.table_x, ty = target.table_y](const Eigen::MatrixXd& xs) {
      Eigen::MatrixXd out(xs.rows(), 1);
      for (Eigen::Index i = 0; i < xs.rows(); ++i) {
        out(i, 0) = interp_table(tx, ty, xs(i, 0));
      }
      return out;
    };
  }
  throw ConfigError("unknown target function: '" + target.f_id + "'");
}

Dataset sample_additive(const AdditiveModelSpec& spec, int n,
                        std::uint64_t seed) {
  if (n < 1) throw ConfigError("sample_additive: n must be >= 1");
  if (spec.input_law.dim < 1) throw ConfigError("sample_additive: input dim must be >= 1");
  if (spec.noise.family != NoiseFamily::none && spec.noise.param <= 0.0) {
    throw ConfigError("sample_additive: noise parameter must be positive");
  }

  const int p = spec.p();
  const int q = spec.q();
  const Predictor f = target_predictor(spec.target, p);

  rng::Engine eng(rng::mix(seed));
  Eigen::MatrixXd xs(n, p);
  Eigen::MatrixXd ws(n, q);
  // Fixed draw order per row (x coords then noise) keeps output
  // bit-identical for a given (spec, n, seed).
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) {
      xs(i, j) = spec.input_law.family == InputFamily::uniform
                     ? eng.uniform(spec.input_law.a, spec.input_law.b)
                     : eng.normal(spec.input_law.a, spec.input_law.b);
    }
    for (int j = 0; j < q; ++j) {
      ws(i, j) = spec.noise.sample(eng.open01());
    }
  }

  Eigen::MatrixXd ys = f(xs) + ws;
  return Dataset(std::move(xs), std::move(ys));
}

}  // namespace infoteacher::data
