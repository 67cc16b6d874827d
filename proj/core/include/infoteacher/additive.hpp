#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "infoteacher/dataset.hpp"
#include "infoteacher/predictor.hpp"

namespace infoteacher::data {

/// Zero-mean noise expressed as h(W) with W ~ U(0,1) pushed through the
/// family's inverse CDF. `param` is the variance for gaussian, the
/// half-width for uniform(-a, a) and the scale for laplace.
enum class NoiseFamily { gaussian, uniform, laplace, none };

struct NoiseSpec {
  NoiseFamily family = NoiseFamily::gaussian;
  double param = 1.0;

  double stddev() const;
  /// Inverse CDF at w in (0, 1).
  double sample(double w) const;
};

NoiseFamily noise_family_from_string(const std::string& name);
std::string to_string(NoiseFamily family);

/// Marginal input law, applied independently per coordinate.
/// uniform: [a, b); gaussian: mean a, stddev b.
enum class InputFamily { uniform, gaussian };

struct InputLaw {
  InputFamily family = InputFamily::uniform;
  double a = 0.0;
  double b = 1.0;
  int dim = 1;
};

/// Target function selected from a fixed registry:
///   sine10      f(x) = sin(10 x),             p = q = 1
///   identity    f(x) = x,                     q = p
///   zero        f(x) = 0,                     q = 1
///   constant    f(x) = c,                     q = 1
///   tabulated   piecewise-linear through (table_x, table_y), p = q = 1
struct TargetSpec {
  std::string f_id = "sine10";
  double c = 0.0;
  std::vector<double> table_x;
  std::vector<double> table_y;
};

struct AdditiveModelSpec {
  TargetSpec target;
  NoiseSpec noise;
  InputLaw input_law;

  int p() const { return input_law.dim; }
  int q() const;
};

/// Registry lookup; throws ConfigError for unknown ids or a target that is
/// inconsistent with the input dimension.
Predictor target_predictor(const TargetSpec& target, int p);

/// n i.i.d. rows: x_i ~ P_X, y_i = f(x_i) + h(w_i) with w_i independent of
/// x_i. Bit-identical output for identical (spec, n, seed).
Dataset sample_additive(const AdditiveModelSpec& spec, int n,
                        std::uint64_t seed);

}  // namespace infoteacher::data
