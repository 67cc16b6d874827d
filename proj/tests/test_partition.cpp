#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "infoteacher/errors.hpp"
#include "infoteacher/partition.hpp"
#include "infoteacher/rng.hpp"

using namespace infoteacher;
using tsp::JointSamples;
using tsp::PartitionParams;
using tsp::TreePartition;

namespace {

JointSamples random_joint(int m, std::uint64_t seed, bool dependent = false) {
  rng::Engine eng(rng::mix(seed));
  Eigen::MatrixXd x(m, 1), r(m, 1);
  for (int i = 0; i < m; ++i) {
    x(i, 0) = eng.normal();
    r(i, 0) = dependent ? 0.8 * x(i, 0) + 0.6 * eng.normal() : eng.normal();
  }
  return JointSamples(std::move(x), std::move(r));
}

int leaf_min_count(const TreePartition& tree) {
  int lo = tree.m;
  for (int id : tree.leaf_ids()) lo = std::min(lo, tree.nodes[id].count);
  return lo;
}

int leaf_count_sum(const TreePartition& tree) {
  int total = 0;
  for (int id : tree.leaf_ids()) total += tree.nodes[id].count;
  return total;
}

}  // namespace

TEST_CASE("eight distinct points split into four balanced leaves") {
  // Hand-enumerated oracle: 8 points, distinct x and r. k_min = 2 forces
  // exactly two median levels: x first, then r inside each half.
  Eigen::MatrixXd x(8, 1), r(8, 1);
  x << 1, 2, 3, 4, 5, 6, 7, 8;
  r << 80, 10, 60, 30, 50, 40, 70, 20;
  const JointSamples z(x, r);

  PartitionParams params;
  params.ell = 0.32;       // k_min = max(2, ceil(b_scale * 8^0.68)) = 2
  params.b_scale = 0.25;
  REQUIRE(tsp::min_cell_count(8, params) == 2);

  const TreePartition tree = tsp::grow_full_tree(z, params);
  CHECK(tree.leaf_count() == 4);
  CHECK(tree.depth() == 2);
  CHECK(tree.nodes[0].dim == 0);
  CHECK(tree.nodes[0].threshold == 4.0);  // 4th smallest x

  for (int id : tree.leaf_ids()) CHECK(tree.nodes[id].count == 2);

  // Left-left cell: x in (-inf, 4], r <= median of {80,10,60,30} = 30.
  const auto cells = tree.leaves();
  CHECK(cells[0].bounds[0].hi == 4.0);
  CHECK(cells[0].bounds[1].hi == 30.0);
  CHECK(cells[0].dims_split.size() == 2);
}

TEST_CASE("identical samples give the single-cell partition") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(20, 1);
  Eigen::MatrixXd r = Eigen::MatrixXd::Ones(20, 1);
  const TreePartition tree = tsp::grow_full_tree(JointSamples(x, r), {});
  CHECK(tree.leaf_count() == 1);
  CHECK(tree.nodes[0].term == 0.0);
}

TEST_CASE("tiny sample sets collapse to one cell instead of erroring") {
  const TreePartition tree = tsp::grow_full_tree(random_joint(3, 5), {});
  CHECK(tree.leaf_count() == 1);
}

TEST_CASE("k_min schedule audit at m = 10^4") {
  // ell = 0.25, b_scale = 1: k_min = ceil(10^4 * (10^4)^-0.25) = 1000.
  PartitionParams params;
  params.ell = 0.25;
  params.b_scale = 1.0;
  CHECK(tsp::min_cell_count(10000, params) == 1000);

  const TreePartition tree = tsp::grow_full_tree(random_joint(10000, 17), params);
  CHECK(leaf_min_count(tree) >= 1000);
  CHECK(tree.leaf_count() <= 10);
}

TEST_CASE("leaf counts always sum to m") {
  rng::Engine eng(rng::mix(31));
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 2 + static_cast<int>(eng.below(400));
    const TreePartition tree =
        tsp::grow_full_tree(random_joint(m, 1000 + trial, trial % 2 == 1), {});
    CHECK(leaf_count_sum(tree) == m);
  }
}

TEST_CASE("median splits are balanced on distinct values") {
  rng::Engine eng(rng::mix(37));
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 16 + static_cast<int>(eng.below(300));
    const TreePartition tree = tsp::grow_full_tree(random_joint(m, 5000 + trial), {});
    for (const auto& node : tree.nodes) {
      if (node.is_leaf()) continue;
      const int c = node.count;
      const int left = tree.nodes[node.left].count;
      CHECK(left >= c / 2);
      CHECK(left <= (c + 1) / 2);
    }
  }
}

TEST_CASE("depth stays within the k_min bound") {
  for (const std::uint64_t seed : {3ULL, 4ULL, 5ULL}) {
    const JointSamples z = random_joint(3000, seed);
    PartitionParams params;
    const TreePartition tree = tsp::grow_full_tree(z, params);
    const int k_min = tsp::min_cell_count(3000, params);
    CHECK(tree.depth() <=
          static_cast<int>(std::ceil(std::log2(3000.0 / k_min))) + 1);
  }
}

TEST_CASE("large lambda prunes to the trivial partition") {
  const TreePartition full = tsp::grow_full_tree(random_joint(2000, 8, true), {});
  REQUIRE(full.leaf_count() > 1);
  const TreePartition pruned = tsp::prune(full, 1e9);
  CHECK(pruned.leaf_count() == 1);
  CHECK(pruned.nodes[0].count == 2000);
}

TEST_CASE("lambda zero returns the full tree unchanged") {
  const TreePartition full = tsp::grow_full_tree(random_joint(512, 9), {});
  const TreePartition same = tsp::prune(full, 0.0);
  CHECK(same.leaf_count() == full.leaf_count());
  CHECK(same.nodes.size() == full.nodes.size());
}

TEST_CASE("pruning is monotone and idempotent") {
  const TreePartition full = tsp::grow_full_tree(random_joint(5000, 10), {});
  const TreePartition pruned = tsp::prune(full, 0.01);
  CHECK(pruned.leaf_count() <= full.leaf_count());
  CHECK(pruned.leaf_term_sum() <= full.leaf_term_sum() + 1e-12);

  const TreePartition twice = tsp::prune(pruned, 0.01);
  CHECK(twice.leaf_count() == pruned.leaf_count());
  CHECK(twice.leaf_term_sum() == pruned.leaf_term_sum());
}

TEST_CASE("empirical measures: trivial and product-grid cases") {
  // Single cell.
  const TreePartition trivial = tsp::grow_full_tree(random_joint(3, 2), {});
  const auto m0 = tsp::empirical_measures(trivial);
  REQUIRE(m0.size() == 1);
  CHECK(m0[0].joint == 1.0);
  CHECK(m0[0].x_marginal == 1.0);
  CHECK(m0[0].r_marginal == 1.0);

  // 8 points on a product grid: each quadrant leaf has mass 1/4 and both
  // marginal projections have mass 1/2 (exact counting oracle).
  Eigen::MatrixXd x(8, 1), r(8, 1);
  x << 1, 1, 2, 2, 3, 3, 4, 4;
  r << 1, 3, 2, 4, 1, 3, 2, 4;
  PartitionParams params;
  params.ell = 0.32;
  params.b_scale = 0.25;
  const TreePartition grid = tsp::grow_full_tree(JointSamples(x, r), params);
  REQUIRE(grid.leaf_count() == 4);
  for (const auto& cm : tsp::empirical_measures(grid)) {
    CHECK(cm.joint == doctest::Approx(0.25));
    CHECK(cm.x_marginal == doctest::Approx(0.5));
    CHECK(cm.r_marginal == doctest::Approx(0.5));
  }
}

TEST_CASE("leaf masses always sum to one") {
  for (int trial = 0; trial < 20; ++trial) {
    const TreePartition tree =
        tsp::grow_full_tree(random_joint(257 + trial * 13, 400 + trial), {});
    double sum = 0;
    for (const auto& cm : tsp::empirical_measures(tree)) sum += cm.joint;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("partition json names splits and leaf counts") {
  Eigen::MatrixXd x(4, 1), r(4, 1);
  x << 1, 2, 3, 4;
  r << 4, 3, 2, 1;
  PartitionParams params;
  params.ell = 0.32;
  params.b_scale = 0.25;
  const TreePartition tree = tsp::grow_full_tree(JointSamples(x, r), params);
  const std::string json = tsp::to_json(tree);
  CHECK(json ==
        R"({"m":4,"p":1,"q":1,"params":{"ell":0.32,"b_scale":0.25,"lambda":0.04},)"
        R"("nodes":[{"dim":0,"threshold":2.0,"left":1,"right":2},{"count":2},{"count":2}]})");
}

TEST_CASE("invalid schedule parameters are rejected") {
  PartitionParams params;
  params.ell = 0.5;
  CHECK_THROWS_AS(tsp::min_cell_count(100, params), ConfigError);
  params.ell = 0.2;
  params.b_scale = 0.0;
  CHECK_THROWS_AS(tsp::min_cell_count(100, params), ConfigError);
}
