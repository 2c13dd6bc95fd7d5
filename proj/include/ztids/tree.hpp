#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ztids/matrix.hpp"

namespace ztids {

// Binary decision tree in a flat node array, root at index 0.
// A row goes left when x[feature] <= threshold.
struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;  // leaf output: P(attack) for forests, raw score for boosting

    bool is_leaf() const noexcept { return feature < 0; }
    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct Tree {
    std::vector<TreeNode> nodes;

    int leaf_index(std::span<const double> x) const noexcept;
    double predict(std::span<const double> x) const noexcept { return nodes[leaf_index(x)].value; }
    std::size_t leaf_count() const noexcept;
    std::size_t depth() const;

    friend bool operator==(const Tree&, const Tree&) = default;
};

enum class SplitCriterion { Gini, Entropy };

struct CartOptions {
    std::size_t max_depth = 50;
    std::size_t min_samples_split = 2;
    std::size_t min_samples_leaf = 1;
    std::size_t max_features = 0;  // 0 = all features
    SplitCriterion criterion = SplitCriterion::Gini;
};

// Classification tree over the given (possibly repeated) sample indices.
// Leaves store the fraction of class-1 samples. Weighted impurity decreases
// are accumulated into `importance` (size = x.cols()).
Tree grow_cart(const Matrix& x, std::span<const int> y, std::span<const std::uint32_t> samples,
               const CartOptions& opts, std::uint64_t seed, std::vector<double>& importance);

struct BoostTreeOptions {
    std::size_t max_depth = 50;
    std::size_t num_leaves = 100;
    std::size_t min_child_samples = 20;
    double min_child_hessian = 1e-3;
    double lambda_l2 = 0.0;
};

// Per-feature ascending row order of x, computed once per boosting run.
std::vector<std::vector<std::uint32_t>> presort_columns(const Matrix& x);

// Leaf-wise (best-first) regression tree on gradients/hessians with exact
// greedy splits. Leaf values are the Newton step -G/(H+lambda), unscaled.
Tree grow_boost_tree(const Matrix& x, std::span<const double> grad, std::span<const double> hess,
                     const std::vector<std::vector<std::uint32_t>>& sorted_cols, const BoostTreeOptions& opts);

}  // namespace ztids
