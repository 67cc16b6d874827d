#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace infoteacher::tsp {

/// One (input, residual) pair.
struct JointSample {
  Eigen::VectorXd x;
  Eigen::VectorXd r;
};

/// Columnar batch of joint samples over R^{p+q}. Coordinates 0..p-1 are the
/// input block, p..p+q-1 the residual block.
class JointSamples {
 public:
  JointSamples(Eigen::MatrixXd x, Eigen::MatrixXd r);
  static JointSamples from_rows(const std::vector<JointSample>& rows);

  int size() const { return static_cast<int>(x_.rows()); }
  int p() const { return static_cast<int>(x_.cols()); }
  int q() const { return static_cast<int>(r_.cols()); }
  int dims() const { return p() + q(); }

  const Eigen::MatrixXd& x() const { return x_; }
  const Eigen::MatrixXd& r() const { return r_; }
  double coord(int i, int d) const {
    return d < p() ? x_(i, d) : r_(i, d - p());
  }
  JointSample row(int i) const { return {x_.row(i), r_.row(i)}; }

 private:
  Eigen::MatrixXd x_;
  Eigen::MatrixXd r_;
};

/// Growth/pruning schedule. Minimum leaf occupancy is m * b_m with
/// b_m = b_scale * m^(-ell); ell must stay inside (0, 1/3) and lambda
/// weights the leaf-count penalty used by prune().
struct PartitionParams {
  double ell = 0.30;
  double b_scale = 0.12;
  double lambda = 0.04;
};

/// max(2, ceil(m * b_m)).
int min_cell_count(int m, const PartitionParams& params);

/// Half-open interval (lo, hi]; infinities allowed.
struct Interval {
  double lo;
  double hi;
  bool contains(double v) const { return lo < v && v <= hi; }
};

struct SplitStep {
  int dim;
  double threshold;
};

/// Product cell A = A^(1) x A^(2) with its occupancy and the split history
/// that produced it.
struct Cell {
  std::vector<Interval> bounds;       // length p+q
  int count = 0;
  std::vector<SplitStep> dims_split;  // root-to-leaf order
};

struct Node {
  int left = -1;
  int right = -1;
  int parent = -1;
  bool is_left = false;
  int depth = 0;
  int dim = -1;          // split dimension; -1 for leaves
  double threshold = 0;  // values <= threshold go left
  int count = 0;         // samples in this cell
  long x_marginal = 0;   // samples whose input block lies in the cell's X-projection
  long r_marginal = 0;   // same for the residual block
  double term = 0;       // this cell's contribution to the partition statistic

  bool is_leaf() const { return left < 0; }
};

/// Binary tree of axis-aligned median splits. Nodes are stored in preorder
/// (parents before children); immutable once built.
struct TreePartition {
  int m = 0;
  int p = 0;
  int q = 0;
  PartitionParams params;
  std::vector<Node> nodes;

  std::vector<int> leaf_ids() const;
  int leaf_count() const;
  int depth() const;
  std::vector<Cell> leaves() const;
  Cell cell_of(int node_id) const;
  /// Sum of leaf terms: the partition's information statistic in nats.
  double leaf_term_sum() const;
};

/// Grows the full tree: at each node the split dimension follows a
/// round-robin order starting at depth mod (p+q); the threshold is the
/// ceil(c/2)-th smallest value of that coordinate (values equal to the
/// threshold go left). A dimension is skipped when its split would leave a
/// child under min_cell_count; the node becomes a leaf when every dimension
/// is unusable or the node holds fewer than 2 * min_cell_count samples.
TreePartition grow_full_tree(const JointSamples& samples,
                             const PartitionParams& params);

/// Keeps the subtree maximizing sum(leaf terms) - lambda * L/m * (p+q) *
/// log(m) by bottom-up dynamic programming; ties collapse toward the
/// smaller tree. lambda = 0 returns the tree unchanged.
TreePartition prune(const TreePartition& tree, double lambda);

struct CellMeasures {
  double joint;       // P_m(A)
  double x_marginal;  // P_m(A^(1) x R^q)
  double r_marginal;  // P_m(R^p x A^(2))
};

/// Per-leaf empirical masses, in leaf_ids() order.
std::vector<CellMeasures> empirical_measures(const TreePartition& tree);

std::string to_json(const TreePartition& tree);

}  // namespace infoteacher::tsp
