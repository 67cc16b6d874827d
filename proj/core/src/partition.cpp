#include "infoteacher/partition.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>

#include "infoteacher/errors.hpp"
#include "json.hpp"

namespace infoteacher::tsp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

JointSamples::JointSamples(Eigen::MatrixXd x, Eigen::MatrixXd r)
    : x_(std::move(x)), r_(std::move(r)) {
  if (x_.rows() != r_.rows()) {
    throw SizeError("joint samples: x and r row counts differ");
  }
  if (!x_.allFinite() || !r_.allFinite()) {
    throw EvaluationError("joint samples: non-finite entry");
  }
}

JointSamples JointSamples::from_rows(const std::vector<JointSample>& rows) {
  if (rows.empty()) throw SizeError("joint samples: empty");
  Eigen::MatrixXd x(rows.size(), rows[0].x.size());
  Eigen::MatrixXd r(rows.size(), rows[0].r.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    x.row(i) = rows[i].x;
    r.row(i) = rows[i].r;
  }
  return JointSamples(std::move(x), std::move(r));
}

int min_cell_count(int m, const PartitionParams& params) {
  if (params.ell <= 0.0 || params.ell >= 1.0 / 3.0) {
    throw ConfigError("partition: ell must lie in (0, 1/3)");
  }
  if (params.b_scale <= 0.0) {
    throw ConfigError("partition: b_scale must be positive");
  }
  const double raw = params.b_scale * std::pow(double(m), 1.0 - params.ell);
  return std::max(2, static_cast<int>(std::ceil(raw)));
}

namespace {

// Recursive builder. Owns the index permutation; nodes come out in
// preorder so children always have larger indices than their parent.
class Builder {
 public:
  Builder(const JointSamples& z, const PartitionParams& params)
      : z_(z),
        m_(z.size()),
        dims_(z.dims()),
        k_min_(min_cell_count(z.size(), params)),
        bounds_(z.dims(), Interval{-kInf, kInf}),
        idx_(z.size()) {
    std::iota(idx_.begin(), idx_.end(), 0);
  }

  std::vector<Node> run() {
    build(0, m_, 0);
    return std::move(nodes_);
  }

 private:
  // Samples whose input (resp. residual) block lies inside the current
  // X (resp. R) bounds, counted over the full sample set.
  void count_marginals(long& cx, long& cr) const {
    const int p = z_.p();
    cx = cr = 0;
    for (int i = 0; i < m_; ++i) {
      bool in_x = true;
      for (int d = 0; d < p && in_x; ++d) in_x = bounds_[d].contains(z_.coord(i, d));
      cx += in_x;
      bool in_r = true;
      for (int d = p; d < dims_ && in_r; ++d) in_r = bounds_[d].contains(z_.coord(i, d));
      cr += in_r;
    }
  }

  int build(int lo, int hi, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    const int c = hi - lo;
    {
      Node& node = nodes_[id];
      node.count = c;
      node.depth = depth;
      count_marginals(node.x_marginal, node.r_marginal);
      assert(node.x_marginal >= c && node.r_marginal >= c);
      node.term = double(c) / m_ *
                  std::log(double(c) * m_ /
                           (double(node.x_marginal) * double(node.r_marginal)));
    }

    if (c < 2 * k_min_) return id;

    const int k = (c + 1) / 2;  // rank of the empirical median
    for (int t = 0; t < dims_; ++t) {
      const int d = (depth + t) % dims_;
      scratch_.resize(c);
      for (int i = 0; i < c; ++i) scratch_[i] = z_.coord(idx_[lo + i], d);
      std::nth_element(scratch_.begin(), scratch_.begin() + (k - 1), scratch_.end());
      const double thr = scratch_[k - 1];

      const auto mid_it = std::partition(
          idx_.begin() + lo, idx_.begin() + hi,
          [&](int i) { return z_.coord(i, d) <= thr; });
      const int mid = static_cast<int>(mid_it - idx_.begin());
      const int n_left = mid - lo;
      const int n_right = hi - mid;
      if (n_left < k_min_ || n_right < k_min_) continue;  // ties made d unusable

      nodes_[id].dim = d;
      nodes_[id].threshold = thr;
      const Interval saved = bounds_[d];
      bounds_[d].hi = thr;
      const int left = build(lo, mid, depth + 1);
      bounds_[d] = saved;
      bounds_[d].lo = thr;
      const int right = build(mid, hi, depth + 1);
      bounds_[d] = saved;

      nodes_[id].left = left;
      nodes_[id].right = right;
      nodes_[left].parent = id;
      nodes_[left].is_left = true;
      nodes_[right].parent = id;
      nodes_[right].is_left = false;
      return id;
    }
    nodes_[id].dim = -1;  // every candidate dimension tied: leaf
    return id;
  }

  const JointSamples& z_;
  const int m_;
  const int dims_;
  const int k_min_;
  std::vector<Interval> bounds_;
  std::vector<int> idx_;
  std::vector<double> scratch_;
  std::vector<Node> nodes_;
};

}  // namespace

TreePartition grow_full_tree(const JointSamples& samples,
                             const PartitionParams& params) {
  if (samples.size() < 1) throw SizeError("grow_full_tree: empty sample set");
  TreePartition tree;
  tree.m = samples.size();
  tree.p = samples.p();
  tree.q = samples.q();
  tree.params = params;
  tree.nodes = Builder(samples, params).run();
  return tree;
}

std::vector<int> TreePartition::leaf_ids() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].is_leaf()) out.push_back(static_cast<int>(i));
  }
  return out;
}

int TreePartition::leaf_count() const {
  return static_cast<int>(leaf_ids().size());
}

int TreePartition::depth() const {
  int d = 0;
  for (const Node& n : nodes) d = std::max(d, n.depth);
  return d;
}

Cell TreePartition::cell_of(int node_id) const {
  Cell cell;
  cell.bounds.assign(p + q, Interval{-kInf, kInf});
  cell.count = nodes[node_id].count;

  std::vector<std::pair<int, bool>> path;  // (internal ancestor, went left)
  for (int id = node_id; nodes[id].parent >= 0; id = nodes[id].parent) {
    path.emplace_back(nodes[id].parent, nodes[id].is_left);
  }
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    const Node& split = nodes[it->first];
    cell.dims_split.push_back({split.dim, split.threshold});
    if (it->second) {
      cell.bounds[split.dim].hi = split.threshold;
    } else {
      cell.bounds[split.dim].lo = split.threshold;
    }
  }
  return cell;
}

std::vector<Cell> TreePartition::leaves() const {
  std::vector<Cell> out;
  for (int id : leaf_ids()) out.push_back(cell_of(id));
  return out;
}

double TreePartition::leaf_term_sum() const {
  double sum = 0;
  for (int id : leaf_ids()) sum += nodes[id].term;
  return sum;
}

TreePartition prune(const TreePartition& tree, double lambda) {
  if (lambda < 0) throw ConfigError("prune: lambda must be >= 0");
  if (lambda == 0.0) {
    // Penalty-free objective: leaf terms never sum below their parent's,
    // so the grown tree is already a maximizer.
    TreePartition out = tree;
    out.params.lambda = 0.0;
    return out;
  }

  const double kappa =
      lambda * double(tree.p + tree.q) * std::log(double(tree.m)) / tree.m;

  // Children follow parents in storage order, so a reverse sweep is
  // bottom-up.
  const std::size_t n = tree.nodes.size();
  std::vector<double> best(n);
  std::vector<char> keep(n, 0);
  for (std::size_t i = n; i-- > 0;) {
    const Node& node = tree.nodes[i];
    const double as_leaf = node.term - kappa;
    if (node.is_leaf()) {
      best[i] = as_leaf;
    } else {
      const double as_split = best[node.left] + best[node.right];
      keep[i] = as_split > as_leaf;  // ties resolve toward the smaller tree
      best[i] = keep[i] ? as_split : as_leaf;
    }
  }

  TreePartition out;
  out.m = tree.m;
  out.p = tree.p;
  out.q = tree.q;
  out.params = tree.params;
  out.params.lambda = lambda;

  // Rebuild in preorder, collapsing non-kept subtrees into leaves.
  struct Rebuild {
    const TreePartition& src;
    const std::vector<char>& keep;
    TreePartition& dst;
    int copy(int old_id, int parent, bool is_left, int depth) {
      const int id = static_cast<int>(dst.nodes.size());
      dst.nodes.push_back(src.nodes[old_id]);
      Node& node = dst.nodes[id];
      node.parent = parent;
      node.is_left = is_left;
      node.depth = depth;
      if (!src.nodes[old_id].is_leaf() && keep[old_id]) {
        const int l = copy(src.nodes[old_id].left, id, true, depth + 1);
        const int r = copy(src.nodes[old_id].right, id, false, depth + 1);
        dst.nodes[id].left = l;
        dst.nodes[id].right = r;
      } else {
        node.left = node.right = -1;
        node.dim = -1;
        node.threshold = 0;
      }
      return id;
    }
  };
  Rebuild{tree, keep, out}.copy(0, -1, false, 0);
  return out;
}

std::vector<CellMeasures> empirical_measures(const TreePartition& tree) {
  std::vector<CellMeasures> out;
  const double m = tree.m;
  for (int id : tree.leaf_ids()) {
    const Node& node = tree.nodes[id];
    out.push_back({node.count / m, node.x_marginal / m, node.r_marginal / m});
  }
  return out;
}

std::string to_json(const TreePartition& tree) {
  nlohmann::ordered_json j;
  j["m"] = tree.m;
  j["p"] = tree.p;
  j["q"] = tree.q;
  j["params"] = {{"ell", tree.params.ell},
                 {"b_scale", tree.params.b_scale},
                 {"lambda", tree.params.lambda}};
  nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
  for (const Node& n : tree.nodes) {
    nlohmann::ordered_json entry;
    if (n.is_leaf()) {
      entry["count"] = n.count;
    } else {
      entry["dim"] = n.dim;
      entry["threshold"] = n.threshold;
      entry["left"] = n.left;
      entry["right"] = n.right;
    }
    nodes.push_back(std::move(entry));
  }
  j["nodes"] = std::move(nodes);
  return j.dump();
}

}  // namespace infoteacher::tsp
