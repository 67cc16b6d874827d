#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>

namespace infoteacher::data {

/// Paired samples (x in R^p, y in R^q). Immutable after construction;
/// rows of xs and ys correspond, all entries are finite.
class Dataset {
 public:
  Dataset(Eigen::MatrixXd xs, Eigen::MatrixXd ys);

  const Eigen::MatrixXd& xs() const { return xs_; }
  const Eigen::MatrixXd& ys() const { return ys_; }
  int n() const { return static_cast<int>(xs_.rows()); }
  int p() const { return static_cast<int>(xs_.cols()); }
  int q() const { return static_cast<int>(ys_.cols()); }

 private:
  Eigen::MatrixXd xs_;
  Eigen::MatrixXd ys_;
};

struct SplitSpec {
  int n_train = 0;
  int n_val = 0;
  std::uint64_t seed = 0;
};

/// Disjoint train/val rows chosen by a seeded uniform permutation.
/// Deterministic per seed. Throws SizeError when n_train + n_val > ds.n().
std::pair<Dataset, Dataset> split(const Dataset& ds, const SplitSpec& spec);

/// Per-feature z-score fitted on training statistics. Features with
/// (near) zero variance pass through unscaled.
struct Standardizer {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;

  static Standardizer fit(const Eigen::MatrixXd& xs);
  Eigen::MatrixXd transform(const Eigen::MatrixXd& xs) const;
};

/// Columnar JSON used for experiment caching:
/// {"p":…, "q":…, "xs":[[…]], "ys":[[…]]}
std::string dataset_to_json(const Dataset& ds);
Dataset dataset_from_json(const std::string& text);
void save_dataset_json(const Dataset& ds, const std::string& path);
Dataset load_dataset_json(const std::string& path);

}  // namespace infoteacher::data
