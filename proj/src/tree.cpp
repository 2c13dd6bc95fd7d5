#include "ztids/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace ztids {

int Tree::leaf_index(std::span<const double> x) const noexcept {
    int i = 0;
    while (!nodes[i].is_leaf()) i = x[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left : nodes[i].right;
    return i;
}

std::size_t Tree::leaf_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const auto& n) { return n.is_leaf(); }));
}

std::size_t Tree::depth() const {
    std::vector<std::size_t> d(nodes.size(), 0);
    std::size_t best = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        best = std::max(best, d[i]);
        if (!nodes[i].is_leaf()) {
            d[nodes[i].left] = d[i] + 1;
            d[nodes[i].right] = d[i] + 1;
        }
    }
    return best;
}

namespace {

double split_threshold(double a, double b) {
    const double mid = a + (b - a) / 2.0;
    return mid < b ? mid : a;
}

double impurity(double n1, double n, SplitCriterion c) {
    if (n <= 0.0) return 0.0;
    const double p1 = n1 / n, p0 = 1.0 - p1;
    if (c == SplitCriterion::Gini) return 1.0 - p0 * p0 - p1 * p1;
    double e = 0.0;
    if (p0 > 0.0) e -= p0 * std::log2(p0);
    if (p1 > 0.0) e -= p1 * std::log2(p1);
    return e;
}

class CartBuilder {
public:
    CartBuilder(const Matrix& x, std::span<const int> y, const CartOptions& opts, std::uint64_t seed,
                std::vector<double>& importance)
        : x_(x), y_(y), opts_(opts), rng_(seed), importance_(importance) {
        features_.resize(x.cols());
        std::iota(features_.begin(), features_.end(), 0);
        max_features_ = opts.max_features == 0 ? x.cols() : std::min(opts.max_features, x.cols());
    }

    Tree build(std::vector<std::uint32_t> samples) {
        grow(std::move(samples), 0);
        return std::move(tree_);
    }

private:
    int grow(std::vector<std::uint32_t> samples, std::size_t depth) {
        const int id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();
        const auto n = static_cast<double>(samples.size());
        double n1 = 0.0;
        for (auto s : samples) n1 += y_[s];
        tree_.nodes[id].value = n > 0 ? n1 / n : 0.0;

        if (samples.size() < opts_.min_samples_split || depth >= opts_.max_depth || n1 == 0.0 || n1 == n) return id;

        const double parent_imp = impurity(n1, n, opts_.criterion);
        double best_score = parent_imp * n;  // weighted child impurity must beat the parent
        int best_feature = -1;
        double best_threshold = 0.0;

        std::shuffle(features_.begin(), features_.end(), rng_);
        std::size_t visited = 0;
        std::vector<std::pair<double, int>> vals(samples.size());
        for (std::size_t fi = 0; fi < features_.size() && visited < max_features_; ++fi) {
            const std::size_t f = features_[fi];
            for (std::size_t i = 0; i < samples.size(); ++i) vals[i] = {x_(samples[i], f), y_[samples[i]]};
            std::sort(vals.begin(), vals.end());
            if (vals.front().first == vals.back().first) continue;  // constant here: does not count
            ++visited;
            double left1 = 0.0;
            const std::size_t min_leaf = std::max<std::size_t>(opts_.min_samples_leaf, 1);
            for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
                left1 += vals[i].second;
                if (vals[i].first == vals[i + 1].first) continue;
                const std::size_t nl = i + 1, nr = vals.size() - nl;
                if (nl < min_leaf || nr < min_leaf) continue;
                const double dl = static_cast<double>(nl), dr = static_cast<double>(nr);
                const double score = dl * impurity(left1, dl, opts_.criterion) +
                                     dr * impurity(n1 - left1, dr, opts_.criterion);
                if (score < best_score - 1e-12) {
                    best_score = score;
                    best_feature = static_cast<int>(f);
                    best_threshold = split_threshold(vals[i].first, vals[i + 1].first);
                }
            }
        }
        if (best_feature < 0) return id;

        importance_[best_feature] += parent_imp * n - best_score;
        std::vector<std::uint32_t> left, right;
        for (auto s : samples) (x_(s, best_feature) <= best_threshold ? left : right).push_back(s);
        samples = {};
        tree_.nodes[id].feature = best_feature;
        tree_.nodes[id].threshold = best_threshold;
        const int l = grow(std::move(left), depth + 1);
        const int r = grow(std::move(right), depth + 1);
        tree_.nodes[id].left = l;
        tree_.nodes[id].right = r;
        return id;
    }

    const Matrix& x_;
    std::span<const int> y_;
    CartOptions opts_;
    std::mt19937_64 rng_;
    std::vector<double>& importance_;
    std::vector<std::size_t> features_;
    std::size_t max_features_;
    Tree tree_;
};

}  // namespace

Tree grow_cart(const Matrix& x, std::span<const int> y, std::span<const std::uint32_t> samples,
               const CartOptions& opts, std::uint64_t seed, std::vector<double>& importance) {
    importance.resize(x.cols(), 0.0);
    CartBuilder builder(x, y, opts, seed, importance);
    return builder.build({samples.begin(), samples.end()});
}

std::vector<std::vector<std::uint32_t>> presort_columns(const Matrix& x) {
    std::vector<std::vector<std::uint32_t>> sorted(x.cols());
    for (std::size_t f = 0; f < x.cols(); ++f) {
        auto& idx = sorted[f];
        idx.resize(x.rows());
        std::iota(idx.begin(), idx.end(), 0u);
        std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return x(a, f) < x(b, f); });
    }
    return sorted;
}

namespace {

struct BoostLeaf {
    int node = 0;
    std::size_t depth = 0;
    std::vector<std::vector<std::uint32_t>> sorted;  // rows of this leaf, per feature ascending
    double g = 0.0, h = 0.0;
    // best candidate split
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
};

double leaf_objective(double g, double h, double lambda) { return g * g / (h + lambda); }

void find_best_split(const Matrix& x, std::span<const double> grad, std::span<const double> hess,
                     const BoostTreeOptions& opts, BoostLeaf& leaf) {
    leaf.feature = -1;
    leaf.gain = 0.0;
    const std::size_t n = leaf.sorted.empty() ? 0 : leaf.sorted[0].size();
    const std::size_t min_child = std::max<std::size_t>(opts.min_child_samples, 1);
    if (leaf.depth >= opts.max_depth || n < 2 * min_child) return;
    const double parent = leaf_objective(leaf.g, leaf.h, opts.lambda_l2);
    for (std::size_t f = 0; f < leaf.sorted.size(); ++f) {
        const auto& rows = leaf.sorted[f];
        double gl = 0.0, hl = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            gl += grad[rows[i]];
            hl += hess[rows[i]];
            const std::size_t nl = i + 1, nr = n - nl;
            if (nl < min_child) continue;
            if (nr < min_child) break;
            const double a = x(rows[i], f), b = x(rows[i + 1], f);
            if (a == b) continue;
            const double hr = leaf.h - hl;
            if (hl < opts.min_child_hessian || hr < opts.min_child_hessian) continue;
            const double gain = leaf_objective(gl, hl, opts.lambda_l2) +
                                leaf_objective(leaf.g - gl, hr, opts.lambda_l2) - parent;
            if (gain > leaf.gain + 1e-12) {
                leaf.gain = gain;
                leaf.feature = static_cast<int>(f);
                leaf.threshold = split_threshold(a, b);
            }
        }
    }
}

}  // namespace

Tree grow_boost_tree(const Matrix& x, std::span<const double> grad, std::span<const double> hess,
                     const std::vector<std::vector<std::uint32_t>>& sorted_cols, const BoostTreeOptions& opts) {
    Tree tree;
    tree.nodes.emplace_back();
    std::vector<BoostLeaf> leaves(1);
    leaves[0].sorted = sorted_cols;
    if (!sorted_cols.empty())
        for (auto r : sorted_cols[0]) {
            leaves[0].g += grad[r];
            leaves[0].h += hess[r];
        }
    find_best_split(x, grad, hess, opts, leaves[0]);

    std::vector<char> go_left(x.rows(), 0);
    while (leaves.size() < std::max<std::size_t>(opts.num_leaves, 1)) {
        std::size_t pick = leaves.size();
        for (std::size_t i = 0; i < leaves.size(); ++i)
            if (leaves[i].feature >= 0 && (pick == leaves.size() || leaves[i].gain > leaves[pick].gain)) pick = i;
        if (pick == leaves.size()) break;

        BoostLeaf parent = std::move(leaves[pick]);
        const auto f = static_cast<std::size_t>(parent.feature);
        for (auto r : parent.sorted[f]) go_left[r] = x(r, f) <= parent.threshold;

        BoostLeaf left, right;
        left.depth = right.depth = parent.depth + 1;
        left.sorted.resize(parent.sorted.size());
        right.sorted.resize(parent.sorted.size());
        for (std::size_t j = 0; j < parent.sorted.size(); ++j) {
            for (auto r : parent.sorted[j]) (go_left[r] ? left.sorted[j] : right.sorted[j]).push_back(r);
            parent.sorted[j] = {};
        }
        for (auto r : left.sorted[0]) {
            left.g += grad[r];
            left.h += hess[r];
        }
        right.g = parent.g - left.g;
        right.h = parent.h - left.h;

        left.node = static_cast<int>(tree.nodes.size());
        right.node = left.node + 1;
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        auto& pn = tree.nodes[parent.node];
        pn.feature = parent.feature;
        pn.threshold = parent.threshold;
        pn.left = left.node;
        pn.right = right.node;

        find_best_split(x, grad, hess, opts, left);
        find_best_split(x, grad, hess, opts, right);
        leaves[pick] = std::move(left);
        leaves.push_back(std::move(right));
    }
    for (const auto& leaf : leaves) {
        const double denom = leaf.h + opts.lambda_l2;
        tree.nodes[leaf.node].value = denom > 0.0 ? -leaf.g / denom : 0.0;
    }
    return tree;
}

}  // namespace ztids
