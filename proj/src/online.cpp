#include "ztids/online.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <ostream>

#include <nlohmann/json.hpp>

#include "ztids/error.hpp"
#include "ztids/metrics.hpp"
#include "ztids/parallel.hpp"
#include "ztids/seed.hpp"

namespace ztids::online {

// ---- ADWIN -----------------------------------------------------------------

Adwin::Adwin(double delta, std::size_t clock, std::size_t max_buckets, std::size_t min_sub_window, bool increase_only)
    : delta_(delta), clock_(std::max<std::size_t>(clock, 1)), max_buckets_(std::max<std::size_t>(max_buckets, 2)),
      min_sub_window_(std::max<std::size_t>(min_sub_window, 1)), increase_only_(increase_only) {
    require(delta > 0.0 && delta < 1.0, ErrorCode::InvalidArgument, "ADWIN delta must be in (0,1)");
}

void Adwin::reset() {
    levels_.clear();
    width_ = 0;
    total_ = 0.0;
    sq_dev_ = 0.0;
    seen_ = 0;
}

std::unique_ptr<DriftDetector> Adwin::fresh() const {
    return std::make_unique<Adwin>(delta_, clock_, max_buckets_, min_sub_window_, increase_only_);
}

double Adwin::epsilon_cut(double n0, double n1) const {
    const double n = static_cast<double>(width_);
    const double dd = std::log(2.0 * std::log(n) / delta_);
    const double m = 1.0 / (1.0 / n0 + 1.0 / n1);
    return std::sqrt(2.0 * variance() * dd / m) + 2.0 * dd / (3.0 * m);
}

void Adwin::insert(double value) {
    if (width_ > 0) {
        const double w = static_cast<double>(width_);
        const double mu = total_ / w;
        sq_dev_ += w * (value - mu) * (value - mu) / (w + 1.0);
    }
    ++width_;
    total_ += value;
    if (levels_.empty()) levels_.emplace_back();
    levels_[0].push_back({value, 0.0});
    compress();
}

void Adwin::compress() {
    for (std::size_t i = 0; i < levels_.size(); ++i) {
        if (levels_[i].size() <= max_buckets_) break;
        const Bucket a = levels_[i].front();
        levels_[i].pop_front();
        const Bucket b = levels_[i].front();
        levels_[i].pop_front();
        const double n = std::ldexp(1.0, static_cast<int>(i));
        const double ua = a.total / n, ub = b.total / n;
        const Bucket merged{a.total + b.total, a.sq_dev + b.sq_dev + n * n / (2.0 * n) * (ua - ub) * (ua - ub)};
        if (i + 1 == levels_.size()) levels_.emplace_back();
        levels_[i + 1].push_back(merged);
    }
}

void Adwin::drop_oldest() {
    std::size_t level = levels_.size();
    while (level > 0 && levels_[level - 1].empty()) --level;
    if (level == 0) return;
    --level;
    const Bucket b = levels_[level].front();
    levels_[level].pop_front();
    const double n = std::ldexp(1.0, static_cast<int>(level));
    width_ -= static_cast<std::size_t>(n);
    total_ -= b.total;
    if (width_ == 0) {
        total_ = 0.0;
        sq_dev_ = 0.0;
    } else {
        const double rest = static_cast<double>(width_);
        const double ub = b.total / n, ur = total_ / rest;
        sq_dev_ = std::max(0.0, sq_dev_ - b.sq_dev - n * rest * (ub - ur) * (ub - ur) / (n + rest));
    }
    while (!levels_.empty() && levels_.back().empty()) levels_.pop_back();
}

bool Adwin::detect() {
    bool any = false;
    while (width_ >= 2 * min_sub_window_) {
        bool cut = false;
        double n0 = 0.0, t0 = 0.0;
        const double w = static_cast<double>(width_);
        // Walk split points from the oldest bucket to the newest.
        for (std::size_t level = levels_.size(); level-- > 0 && !cut;) {
            const double size = std::ldexp(1.0, static_cast<int>(level));
            for (const auto& b : levels_[level]) {
                n0 += size;
                t0 += b.total;
                const double n1 = w - n0;
                if (n1 < static_cast<double>(min_sub_window_)) break;
                if (n0 < static_cast<double>(min_sub_window_)) continue;
                const double diff = std::abs(t0 / n0 - (total_ - t0) / n1);
                if (diff > epsilon_cut(n0, n1)) {
                    cut = true;
                    break;
                }
            }
        }
        if (!cut) break;
        drop_oldest();
        any = true;
    }
    return any;
}

DriftSignal Adwin::update(double value) {
    ++seen_;
    const double before = mean();
    insert(value);
    bool drift = seen_ % clock_ == 0 && detect();
    if (drift && increase_only_) drift = mean() > before;
    return {drift ? DriftState::Drift : DriftState::Stable, seen_};
}

// ---- DDM -------------------------------------------------------------------

Ddm::Ddm(std::size_t min_instances, double warning_level, double drift_level)
    : min_instances_(min_instances), warning_level_(warning_level), drift_level_(drift_level) {}

void Ddm::reset() {
    n_ = 0;
    p_ = 0.0;
    p_min_ = s_min_ = 0.0;
    has_min_ = false;
}

std::unique_ptr<DriftDetector> Ddm::fresh() const {
    return std::make_unique<Ddm>(min_instances_, warning_level_, drift_level_);
}

DriftSignal Ddm::update(double error) {
    ++seen_;
    ++n_;
    const double n = static_cast<double>(n_);
    p_ += (error - p_) / n;
    const double s = std::sqrt(p_ * (1.0 - p_) / n);
    if (n_ < min_instances_) return {DriftState::Stable, seen_};
    if (!has_min_ || p_ + s < p_min_ + s_min_) {
        p_min_ = p_;
        s_min_ = s;
        has_min_ = true;
    }
    if (p_ + s > p_min_ + drift_level_ * s_min_) {
        reset();
        return {DriftState::Drift, seen_};
    }
    if (p_ + s > p_min_ + warning_level_ * s_min_) return {DriftState::Warning, seen_};
    return {DriftState::Stable, seen_};
}

double hoeffding_bound(double range, double delta, double n) {
    return std::sqrt(range * range * std::log(1.0 / delta) / (2.0 * n));
}

// ---- Hoeffding tree --------------------------------------------------------

namespace {

double entropy2(double a, double b) {
    const double t = a + b;
    if (t <= 0.0) return 0.0;
    double h = 0.0;
    for (double v : {a, b})
        if (v > 0.0) h -= v / t * std::log2(v / t);
    return h;
}

}  // namespace

void HoeffdingTree::Gaussian::add(double v, double w) {
    if (weight <= 0.0) {
        min = max = v;
    } else {
        min = std::min(min, v);
        max = std::max(max, v);
    }
    weight += w;
    const double d = v - mean;
    mean += w * d / weight;
    m2 += w * d * (v - mean);
}

double HoeffdingTree::Gaussian::stddev() const { return weight > 1.0 ? std::sqrt(std::max(0.0, m2 / (weight - 1.0))) : 0.0; }

double HoeffdingTree::Gaussian::cdf(double t) const {
    if (weight <= 0.0 || t < min) return 0.0;
    if (t >= max) return 1.0;
    const double sd = stddev();
    if (sd <= 0.0) return mean <= t ? 1.0 : 0.0;
    return 0.5 * std::erfc(-(t - mean) / (sd * std::numbers::sqrt2));
}

double HoeffdingTree::Gaussian::log_pdf(double v) const {
    const double sd = std::max(stddev(), 1e-3);
    const double z = (v - mean) / sd;
    return -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * std::numbers::pi);
}

HoeffdingTree::HoeffdingTree(std::size_t n_features, HoeffdingOptions opts, std::uint64_t seed)
    : n_features_(n_features), opts_(opts), rng_(seed) {
    require(n_features >= 1, ErrorCode::InvalidArgument, "a tree needs at least one feature");
    require(opts.grace_period >= 1 && opts.delta > 0.0 && opts.delta < 1.0 && opts.n_split_points >= 1,
            ErrorCode::BadHyperparameter, "invalid Hoeffding tree options");
    nodes_.push_back({});
    nodes_[0].leaf = new_leaf(0.0, 0.0);
}

int HoeffdingTree::new_leaf(double w0, double w1) {
    Leaf leaf;
    leaf.class_weight[0] = w0;
    leaf.class_weight[1] = w1;
    if (opts_.subspace == 0 || opts_.subspace >= n_features_) {
        leaf.features.resize(n_features_);
        std::iota(leaf.features.begin(), leaf.features.end(), 0);
    } else {
        std::vector<std::size_t> all(n_features_);
        std::iota(all.begin(), all.end(), 0);
        for (std::size_t i = 0; i < opts_.subspace; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, n_features_ - 1);
            std::swap(all[i], all[pick(rng_)]);
        }
        leaf.features.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(opts_.subspace));
        std::sort(leaf.features.begin(), leaf.features.end());
    }
    leaf.stats.resize(leaf.features.size() * 2);
    leaves_.push_back(std::move(leaf));
    return static_cast<int>(leaves_.size() - 1);
}

void HoeffdingTree::check_width(std::span<const double> x) const {
    require(x.size() == n_features_, ErrorCode::ShapeMismatch,
            "expected " + std::to_string(n_features_) + " features, got " + std::to_string(x.size()));
}

std::size_t HoeffdingTree::sort(std::span<const double> x) const {
    std::size_t i = 0;
    while (nodes_[i].leaf < 0)
        i = static_cast<std::size_t>(x[static_cast<std::size_t>(nodes_[i].feature)] <= nodes_[i].threshold ? nodes_[i].left
                                                                                                            : nodes_[i].right);
    return i;
}

std::size_t HoeffdingTree::leaf_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.leaf >= 0; }));
}

double HoeffdingTree::leaf_proba(const Leaf& leaf, std::span<const double> x) const {
    const double w0 = leaf.class_weight[0], w1 = leaf.class_weight[1];
    if (w0 + w1 <= 0.0) return 0.0;
    if (!opts_.naive_bayes_leaves || leaf.nb_correct <= leaf.mc_correct || w0 <= 0.0 || w1 <= 0.0) return w1 / (w0 + w1);
    double lp[2] = {std::log(w0 / (w0 + w1)), std::log(w1 / (w0 + w1))};
    for (std::size_t i = 0; i < leaf.features.size(); ++i) {
        const auto& g0 = leaf.stats[2 * i];
        const auto& g1 = leaf.stats[2 * i + 1];
        if (g0.weight <= 0.0 || g1.weight <= 0.0) continue;
        const double v = x[leaf.features[i]];
        lp[0] += g0.log_pdf(v);
        lp[1] += g1.log_pdf(v);
    }
    return 1.0 / (1.0 + std::exp(std::clamp(lp[0] - lp[1], -700.0, 700.0)));
}

int HoeffdingTree::nb_predict(const Leaf& leaf, std::span<const double> x) const {
    const double w0 = leaf.class_weight[0], w1 = leaf.class_weight[1];
    if (w0 <= 0.0 || w1 <= 0.0) return w1 > w0 ? 1 : 0;
    double diff = std::log(w0) - std::log(w1);
    for (std::size_t i = 0; i < leaf.features.size(); ++i) {
        const auto& g0 = leaf.stats[2 * i];
        const auto& g1 = leaf.stats[2 * i + 1];
        if (g0.weight <= 0.0 || g1.weight <= 0.0) continue;
        const double v = x[leaf.features[i]];
        diff += g0.log_pdf(v) - g1.log_pdf(v);
    }
    return diff <= 0.0 ? 1 : 0;
}

double HoeffdingTree::predict_proba_one(std::span<const double> x) const {
    check_width(x);
    if (empty_) return 0.0;
    return leaf_proba(leaves_[static_cast<std::size_t>(nodes_[sort(x)].leaf)], x);
}

int HoeffdingTree::predict_one(std::span<const double> x) const { return predict_proba_one(x) >= 0.5 ? 1 : 0; }

void HoeffdingTree::learn_one(std::span<const double> x, int y) { learn_one(x, y, 1.0); }

void HoeffdingTree::learn_one(std::span<const double> x, int y, double weight) {
    check_width(x);
    require(y == 0 || y == 1, ErrorCode::InvalidArgument, "labels must be 0 or 1");
    if (weight <= 0.0) return;
    empty_ = false;
    const std::size_t node = sort(x);
    Leaf& leaf = leaves_[static_cast<std::size_t>(nodes_[node].leaf)];
    if (opts_.naive_bayes_leaves) {
        const double w0 = leaf.class_weight[0], w1 = leaf.class_weight[1];
        if ((w1 > w0 ? 1 : 0) == y) leaf.mc_correct += weight;
        if (nb_predict(leaf, x) == y) leaf.nb_correct += weight;
    }
    leaf.class_weight[y] += weight;
    for (std::size_t i = 0; i < leaf.features.size(); ++i)
        leaf.stats[2 * i + static_cast<std::size_t>(y)].add(x[leaf.features[i]], weight);
    const double seen = leaf.stats.empty() ? 0.0 : leaf.stats[0].weight + leaf.stats[1].weight;
    if (seen - leaf.weight_at_last_attempt >= static_cast<double>(opts_.grace_period)) {
        leaf.weight_at_last_attempt = seen;
        if (leaf.stats[0].weight > 0.0 && leaf.stats[1].weight > 0.0) attempt_split(node);
    }
}

void HoeffdingTree::attempt_split(std::size_t node_index) {
    const Leaf& leaf = leaves_[static_cast<std::size_t>(nodes_[node_index].leaf)];
    struct Candidate {
        double gain = 0.0;
        std::size_t slot = 0;
        double threshold = 0.0;
        double l0 = 0, l1 = 0, r0 = 0, r1 = 0;
    };
    std::vector<Candidate> best_per_feature;
    double total = 0.0;
    for (std::size_t i = 0; i < leaf.features.size(); ++i) {
        const auto& g0 = leaf.stats[2 * i];
        const auto& g1 = leaf.stats[2 * i + 1];
        const double n0 = g0.weight, n1 = g1.weight;
        total = n0 + n1;
        const double parent = entropy2(n0, n1);
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto* g : {&g0, &g1})
            if (g->weight > 0.0) {
                lo = std::min(lo, g->min);
                hi = std::max(hi, g->max);
            }
        if (!(hi > lo)) continue;
        std::optional<Candidate> best;
        for (std::size_t s = 1; s <= opts_.n_split_points; ++s) {
            const double t = lo + (hi - lo) * static_cast<double>(s) / static_cast<double>(opts_.n_split_points + 1);
            const double l0 = n0 * g0.cdf(t), l1 = n1 * g1.cdf(t);
            const double r0 = n0 - l0, r1 = n1 - l1;
            const double wl = l0 + l1, wr = r0 + r1;
            if (wl < opts_.min_branch_fraction * total || wr < opts_.min_branch_fraction * total) continue;
            const double gain = parent - (wl * entropy2(l0, l1) + wr * entropy2(r0, r1)) / total;
            if (!best || gain > best->gain) best = Candidate{gain, i, t, l0, l1, r0, r1};
        }
        if (best) best_per_feature.push_back(*best);
    }
    if (best_per_feature.empty()) return;
    std::stable_sort(best_per_feature.begin(), best_per_feature.end(),
                     [](const Candidate& a, const Candidate& b) { return a.gain > b.gain; });
    const Candidate top = best_per_feature[0];
    const double second = best_per_feature.size() > 1 ? std::max(0.0, best_per_feature[1].gain) : 0.0;
    const double eps = hoeffding_bound(1.0, opts_.delta, total);
    const bool separated = top.gain - second > eps;
    const bool tie = eps < opts_.tie_threshold;
    if (!(top.gain > 0.0 && (separated || tie))) return;

    const std::size_t feature = leaf.features[top.slot];
    splits_.push_back({node_index, feature, top.threshold, total, top.gain, second, eps, !separated});
    const int left_leaf = new_leaf(top.l0, top.l1);
    const int right_leaf = new_leaf(top.r0, top.r1);
    auto& old = leaves_[static_cast<std::size_t>(nodes_[node_index].leaf)];
    old.stats = {};
    old.features = {};
    nodes_.push_back({-1, 0.0, -1, -1, left_leaf});
    nodes_.push_back({-1, 0.0, -1, -1, right_leaf});
    auto& n = nodes_[node_index];
    n.feature = static_cast<int>(feature);
    n.threshold = top.threshold;
    n.left = static_cast<int>(nodes_.size() - 2);
    n.right = static_cast<int>(nodes_.size() - 1);
    n.leaf = -1;
}

// ---- KNN with ADWIN-governed window -----------------------------------------

KnnAdwin::KnnAdwin(std::size_t n_features, KnnAdwinOptions opts)
    : n_features_(n_features), opts_(opts), adwin_(opts.delta) {
    require(opts.k >= 1 && opts.max_window >= 1, ErrorCode::BadHyperparameter, "k and max_window must be >= 1");
}

int KnnAdwin::predict_one(std::span<const double> x) const {
    require(x.size() == n_features_, ErrorCode::ShapeMismatch, "stream row width changed");
    if (labels_.empty()) return 0;
    std::vector<std::pair<double, std::size_t>> d(labels_.size());
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        double s = 0.0;
        const auto& r = rows_[i];
        for (std::size_t c = 0; c < n_features_; ++c) s += (r[c] - x[c]) * (r[c] - x[c]);
        d[i] = {s, i};
    }
    const std::size_t k = std::min(opts_.k, d.size());
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
    std::size_t ones = 0;
    for (std::size_t i = 0; i < k; ++i) ones += static_cast<std::size_t>(labels_[d[i].second]);
    return 2 * ones >= k ? 1 : 0;
}

void KnnAdwin::learn_one(std::span<const double> x, int y) {
    const int pred = predict_one(x);
    if (adwin_.update(pred == y ? 0.0 : 1.0).state == DriftState::Drift) {
        ++drifts_;
        while (labels_.size() > adwin_.width()) {
            rows_.pop_front();
            labels_.pop_front();
        }
    }
    rows_.emplace_back(x.begin(), x.end());
    labels_.push_back(y);
    while (labels_.size() > opts_.max_window) {
        rows_.pop_front();
        labels_.pop_front();
    }
}

// ---- drift-aware ensembles ---------------------------------------------------

std::string to_string(DetectorKind k) { return k == DetectorKind::ADWIN ? "ADWIN" : "DDM"; }

DetectorKind detector_from_string(const std::string& s) {
    if (s == "ADWIN") return DetectorKind::ADWIN;
    if (s == "DDM") return DetectorKind::DDM;
    fail(ErrorCode::BadHyperparameter, "unknown drift detector '" + s + "'");
}

DriftEnsemble::DriftEnsemble(Mode mode, std::size_t n_features, EnsembleOptions opts, std::uint64_t seed)
    : mode_(mode), n_features_(n_features), opts_(opts), rng_(seed) {
    require(opts.n_models >= 1, ErrorCode::BadHyperparameter, "n_models must be >= 1");
    require(opts.lambda > 0.0, ErrorCode::BadHyperparameter, "lambda must be positive");
    require(opts.patch_fraction > 0.0 && opts.patch_fraction <= 1.0, ErrorCode::BadHyperparameter,
            "patch fraction must be in (0,1]");
    for (std::size_t i = 0; i < opts.n_models; ++i) members_.push_back(make_member());
}

std::vector<std::size_t> DriftEnsemble::draw_patch() {
    if (mode_ == Mode::RandomForest) return {};
    const auto k = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::lround(opts_.patch_fraction * static_cast<double>(n_features_))));
    std::vector<std::size_t> all(n_features_);
    std::iota(all.begin(), all.end(), 0);
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n_features_ - 1);
        std::swap(all[i], all[pick(rng_)]);
    }
    all.resize(k);
    std::sort(all.begin(), all.end());
    return all;
}

std::unique_ptr<HoeffdingTree> DriftEnsemble::make_tree(const std::vector<std::size_t>& patch) {
    auto opts = opts_.tree;
    if (mode_ == Mode::RandomForest)
        opts.subspace = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n_features_))));
    return std::make_unique<HoeffdingTree>(patch.empty() ? n_features_ : patch.size(), opts, rng_());
}

DriftEnsemble::Member DriftEnsemble::make_member() {
    Member m;
    m.patch = draw_patch();
    m.tree = make_tree(m.patch);
    if (opts_.detector == DetectorKind::ADWIN) {
        m.warning = std::make_unique<Adwin>(opts_.adwin_warning_delta, 32, 5, 5, true);
        m.drift = std::make_unique<Adwin>(opts_.adwin_drift_delta, 32, 5, 5, true);
    } else {
        m.drift = std::make_unique<Ddm>();
    }
    return m;
}

std::vector<double> DriftEnsemble::project(std::span<const double> x, const std::vector<std::size_t>& patch) {
    if (patch.empty()) return {x.begin(), x.end()};
    std::vector<double> out;
    out.reserve(patch.size());
    for (auto f : patch) out.push_back(x[f]);
    return out;
}

std::vector<int> DriftEnsemble::member_votes(std::span<const double> x) const {
    require(x.size() == n_features_, ErrorCode::ShapeMismatch, "stream row width changed");
    std::vector<int> votes;
    votes.reserve(members_.size());
    for (const auto& m : members_) votes.push_back(m.tree->predict_one(project(x, m.patch)));
    return votes;
}

int DriftEnsemble::predict_one(std::span<const double> x) const {
    const auto votes = member_votes(x);
    if (votes.empty()) return 0;
    const auto ones = static_cast<std::size_t>(std::count(votes.begin(), votes.end(), 1));
    return 2 * ones >= votes.size() ? 1 : 0;
}

void DriftEnsemble::learn_one(std::span<const double> x, int y) {
    require(x.size() == n_features_, ErrorCode::ShapeMismatch, "stream row width changed");
    std::poisson_distribution<int> poisson(opts_.lambda);
    for (auto& m : members_) {
        const auto xp = project(x, m.patch);
        const double error = m.tree->predict_one(xp) == y ? 0.0 : 1.0;
        const int k = poisson(rng_);
        if (k > 0) {
            m.tree->learn_one(xp, y, k);
            if (m.background) m.background->learn_one(project(x, m.background_patch), y, k);
        }

        // Every warning onset restarts the background tree.
        bool warn = false;
        if (m.warning && m.warning->update(error).state == DriftState::Drift) {
            warn = true;
            m.warning->reset();
        }
        const auto signal = m.drift->update(error).state;
        if (signal == DriftState::Warning && !m.in_warning) warn = true;
        m.in_warning = signal == DriftState::Warning;
        if (warn) {
            m.background_patch = draw_patch();
            m.background = make_tree(m.background_patch);
        }
        if (signal == DriftState::Drift) {
            ++drifts_;
            if (m.background) {
                m.tree = std::move(m.background);
                m.patch = std::move(m.background_patch);
            } else {
                m.patch = draw_patch();
                m.tree = make_tree(m.patch);
            }
            m.background.reset();
            m.background_patch.clear();
            m.drift = m.drift->fresh();
            m.in_warning = false;
            if (m.warning) m.warning = m.warning->fresh();
        }
    }
}

void DriftEnsemble::remove_member(std::size_t i) {
    require(i < members_.size(), ErrorCode::InvalidArgument, "member index out of range");
    members_.erase(members_.begin() + static_cast<std::ptrdiff_t>(i));
}

std::size_t DriftEnsemble::background_count() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(members_.begin(), members_.end(), [](const Member& m) { return m.background != nullptr; }));
}

// ---- prequential evaluation ---------------------------------------------------

DriftRecovery drift_recovery(const PrequentialCurve& curve, std::size_t drift_at, double tolerance) {
    const auto& acc = curve.windowed_accuracy;
    require(drift_at >= 1 && drift_at < acc.size(), ErrorCode::InvalidArgument, "drift index outside the curve");
    DriftRecovery r;
    r.pre_level = acc[drift_at - 1];
    const auto dip = std::min_element(acc.begin() + static_cast<std::ptrdiff_t>(drift_at), acc.end());
    r.dip = *dip;
    r.dip_index = static_cast<std::size_t>(dip - acc.begin());
    for (std::size_t i = r.dip_index; i < acc.size(); ++i)
        if (acc[i] >= r.pre_level - tolerance) {
            r.samples = i - drift_at;
            break;
        }
    return r;
}

PrequentialCurve prequential_evaluate(StreamLearner& learner, const Dataset& stream, std::size_t window) {
    require(stream.rows() > 0, ErrorCode::Empty, "prequential evaluation needs a non-empty stream");
    require(window >= 1, ErrorCode::InvalidArgument, "window must be >= 1");
    PrequentialCurve c;
    c.window = window;
    const std::size_t n = stream.rows();
    c.running_accuracy.reserve(n);
    c.windowed_accuracy.reserve(n);
    c.drift_flags.reserve(n);
    std::vector<std::uint8_t> ring(window, 0);
    std::size_t correct = 0, in_window = 0;
    c.seconds = timed([&] {
        for (std::size_t i = 0; i < n; ++i) {
            const auto x = stream.features.row(i);
            const int y = stream.labels[i];
            const std::uint8_t hit = learner.predict_one(x) == y ? 1 : 0;
            correct += hit;
            in_window += hit;
            if (i >= window) in_window -= ring[i % window];
            ring[i % window] = hit;
            c.running_accuracy.push_back(static_cast<double>(correct) / static_cast<double>(i + 1));
            c.windowed_accuracy.push_back(static_cast<double>(in_window) / static_cast<double>(std::min(window, i + 1)));
            const std::size_t before = learner.drifts_detected();
            learner.learn_one(x, y);
            const bool drift = learner.drifts_detected() > before;
            c.drift_flags.push_back(drift ? 1 : 0);
            if (drift) c.drift_events.push_back(i);
        }
    });
    return c;
}

void write_curve_csv(const PrequentialCurve& curve, std::ostream& out) {
    out << "index,running_acc,windowed_acc,drift_flag\n";
    out.precision(10);
    for (std::size_t i = 0; i < curve.running_accuracy.size(); ++i)
        out << i << ',' << curve.running_accuracy[i] << ',' << curve.windowed_accuracy[i] << ','
            << static_cast<int>(curve.drift_flags[i]) << '\n';
}

void write_curves_csv(const std::vector<std::pair<std::string, const PrequentialCurve*>>& curves, std::ostream& out) {
    out << "learner,index,running_acc,windowed_acc,drift_flag\n";
    out.precision(10);
    for (const auto& [name, curve] : curves)
        for (std::size_t i = 0; i < curve->running_accuracy.size(); ++i)
            out << name << ',' << i << ',' << curve->running_accuracy[i] << ',' << curve->windowed_accuracy[i] << ','
                << static_cast<int>(curve->drift_flags[i]) << '\n';
}

// ---- learner registry ----------------------------------------------------------

std::string to_string(OnlineKind k) {
    switch (k) {
        case OnlineKind::HT: return "HT";
        case OnlineKind::KnnAdwin: return "KNN-ADWIN";
        case OnlineKind::ARF: return "ARF";
        case OnlineKind::SRP: return "SRP";
    }
    return "?";
}

OnlineKind online_kind_from_string(std::string_view s) {
    for (auto k : kAllOnlineKinds)
        if (to_string(k) == s) return k;
    if (s == "KNN" || s == "KnnAdwin") return OnlineKind::KnnAdwin;
    fail(ErrorCode::InvalidArgument, "unknown online learner '" + std::string(s) + "'");
}

ParamMap default_online_params(OnlineKind k) {
    switch (k) {
        case OnlineKind::HT: return {{"grace_period", std::int64_t{200}}, {"tie_threshold", 0.05}};
        case OnlineKind::KnnAdwin: return {{"n_neighbors", std::int64_t{5}}, {"max_window", std::int64_t{1000}}};
        case OnlineKind::ARF:
        case OnlineKind::SRP: return {{"n_models", std::int64_t{10}}, {"drift_detector", std::string("ADWIN")}};
    }
    return {};
}

HyperparameterSpace online_search_space(OnlineKind k) {
    switch (k) {
        case OnlineKind::HT:
            return {{Dim::discrete("grace_period", 50, 500), Dim::continuous("tie_threshold", 0.01, 0.2)}};
        case OnlineKind::KnnAdwin:
            return {{Dim::discrete("n_neighbors", 1, 15), Dim::discrete("max_window", 100, 2000)}};
        case OnlineKind::ARF:
        case OnlineKind::SRP:
            return {{Dim::discrete("n_models", 3, 10), Dim::categorical("drift_detector", {"ADWIN", "DDM"})}};
    }
    return {};
}

namespace {

void reject_unknown(const ParamMap& params, const ParamMap& defaults) {
    for (const auto& [name, value] : params)
        require(defaults.count(name) == 1, ErrorCode::BadHyperparameter, "unknown hyperparameter '" + name + "'");
}

std::size_t positive(std::int64_t v, const char* name) {
    require(v >= 1, ErrorCode::BadHyperparameter, std::string(name) + " must be >= 1");
    return static_cast<std::size_t>(v);
}

}  // namespace

std::unique_ptr<StreamLearner> make_learner(OnlineKind kind, const ParamMap& params, std::size_t n_features,
                                            std::uint64_t seed) {
    reject_unknown(params, default_online_params(kind));
    switch (kind) {
        case OnlineKind::HT: {
            HoeffdingOptions o;
            o.grace_period = positive(get_int(params, "grace_period"), "grace_period");
            o.tie_threshold = get_real(params, "tie_threshold");
            return std::make_unique<HoeffdingTree>(n_features, o, seed);
        }
        case OnlineKind::KnnAdwin: {
            KnnAdwinOptions o;
            o.k = positive(get_int(params, "n_neighbors"), "n_neighbors");
            o.max_window = positive(get_int(params, "max_window"), "max_window");
            return std::make_unique<KnnAdwin>(n_features, o);
        }
        case OnlineKind::ARF:
        case OnlineKind::SRP: {
            EnsembleOptions o;
            o.n_models = positive(get_int(params, "n_models"), "n_models");
            o.detector = detector_from_string(get_string(params, "drift_detector"));
            const auto mode = kind == OnlineKind::ARF ? DriftEnsemble::Mode::RandomForest : DriftEnsemble::Mode::Patches;
            return std::make_unique<DriftEnsemble>(mode, n_features, o, seed);
        }
    }
    fail(ErrorCode::InvalidArgument, "unknown online learner");
}

// ---- online AutoML ---------------------------------------------------------------

OnlineTuned tune_online(OnlineKind kind, const Dataset& stream, std::size_t window, const optimize::PsoOptions& pso,
                        std::uint64_t seed) {
    std::mutex mutex;
    std::map<std::string, PrequentialCurve> curves;
    const auto objective = [&](const ParamMap& p) {
        auto learner = make_learner(kind, p, stream.cols(), seed);
        auto curve = prequential_evaluate(*learner, stream, window);
        const double acc = curve.final_accuracy();
        std::lock_guard lock(mutex);
        curves.emplace(canonical_key(p), std::move(curve));
        return optimize::ObjectiveResult{1.0 - acc, {acc}};
    };
    auto opts = pso;
    opts.warm_start = default_online_params(kind);
    OnlineTuned out;
    out.kind = kind;
    out.search = optimize::pso_minimize(objective, online_search_space(kind), opts);
    out.default_accuracy = 1.0 - out.search.trace.evaluations.front().objective;
    out.best_curve = curves.at(canonical_key(out.search.best_config));
    return out;
}

OnlineResult run_automl_online(const Dataset& raw_stream, const OnlineConfig& cfg) {
    raw_stream.validate();
    require(cfg.kinds.size() >= 2, ErrorCode::InvalidArgument, "online selection needs at least two learners");
    OnlineResult out;
    out.total_seconds = timed([&] {
        autodp::AutoDpOptions dp;
        dp.outlier_threshold = cfg.outlier_threshold;
        dp.balance = false;
        auto fitted = autodp::fit_preprocess(raw_stream, dp);
        out.preprocess = fitted.report;
        Dataset stream = std::move(fitted.train);
        if (cfg.redundancy_filter && stream.cols() > 1) {
            out.selection = autofe::pearson_filter(stream, cfg.pearson_threshold);
            stream = stream.project(out.selection.kept_indices);
        } else {
            for (std::size_t c = 0; c < stream.cols(); ++c) out.selection.kept_indices.push_back(c);
            out.selection.rfe_ranking.assign(stream.cols(), 1);
        }
        out.selection.n_selected = out.selection.kept_indices.size();

        const auto learner_seed = [&](OnlineKind k) { return mix_seed(cfg.seed, 100 + static_cast<std::uint64_t>(k)); };
        std::vector<PrequentialCurve> default_curves(cfg.kinds.size());
        out.ranking.resize(cfg.kinds.size());
        parallel_for(cfg.kinds.size(), [&](std::size_t i) {
            const auto kind = cfg.kinds[i];
            auto learner = make_learner(kind, default_online_params(kind), stream.cols(), learner_seed(kind));
            default_curves[i] = prequential_evaluate(*learner, stream, cfg.window);
            out.ranking[i] = {kind, default_curves[i].final_accuracy(), default_curves[i].seconds, false};
        });
        for (std::size_t i = 0; i < cfg.kinds.size(); ++i)
            out.curves.emplace_back(to_string(cfg.kinds[i]) + "-default", std::move(default_curves[i]));
        std::stable_sort(out.ranking.begin(), out.ranking.end(), [](const OnlineEntry& a, const OnlineEntry& b) {
            if (a.accuracy != b.accuracy) return a.accuracy > b.accuracy;
            return static_cast<int>(a.kind) < static_cast<int>(b.kind);
        });
        for (std::size_t i = 0; i < out.ranking.size() && i < cfg.top_k; ++i) out.ranking[i].selected_for_hpo = true;

        for (const auto& entry : out.ranking) {
            const bool forced =
                std::find(cfg.always_tune.begin(), cfg.always_tune.end(), entry.kind) != cfg.always_tune.end();
            if (!entry.selected_for_hpo && !forced) continue;
            auto pso = cfg.pso;
            pso.seed = mix_seed(cfg.seed, 200 + static_cast<std::uint64_t>(entry.kind));
            out.tuned.push_back(tune_online(entry.kind, stream, cfg.window, pso, learner_seed(entry.kind)));
        }

        const OnlineTuned* best = nullptr;
        for (const auto& t : out.tuned) {
            const auto it = std::find_if(out.ranking.begin(), out.ranking.end(),
                                         [&](const OnlineEntry& e) { return e.kind == t.kind; });
            if (!it->selected_for_hpo) continue;
            if (!best || t.best_accuracy() > best->best_accuracy()) best = &t;
        }
        require(best != nullptr, ErrorCode::InvalidArgument, "top_k must be at least 1");
        out.winner = best->kind;
        out.winner_params = best->search.best_config;
        out.winner_accuracy = best->best_accuracy();
        out.curves.emplace_back(to_string(best->kind) + "-tuned", best->best_curve);
    });
    return out;
}

nlohmann::json to_json(const OnlineResult& r, bool include_timing) {
    const auto pct = [](double v) { return std::round(v * 100.0 * 1000.0) / 1000.0; };
    nlohmann::json ranking = nlohmann::json::array();
    for (const auto& e : r.ranking) {
        nlohmann::json j{{"kind", to_string(e.kind)}, {"accuracy", pct(e.accuracy)}, {"selected_for_hpo", e.selected_for_hpo}};
        if (include_timing) j["seconds"] = e.seconds;
        ranking.push_back(std::move(j));
    }
    nlohmann::json tuned = nlohmann::json::array();
    for (const auto& t : r.tuned)
        tuned.push_back({{"kind", to_string(t.kind)},
                         {"default_accuracy", pct(t.default_accuracy)},
                         {"best_accuracy", pct(t.best_accuracy())},
                         {"best_config", ztids::to_json(t.search.best_config)},
                         {"trace", optimize::to_json(t.search.trace, include_timing)}});
    nlohmann::json curves = nlohmann::json::array();
    for (const auto& [name, c] : r.curves) {
        nlohmann::json j{{"learner", name},
                         {"samples", c.running_accuracy.size()},
                         {"window", c.window},
                         {"final_accuracy", pct(c.final_accuracy())},
                         {"min_windowed_accuracy",
                          pct(c.windowed_accuracy.empty()
                                  ? 0.0
                                  : *std::min_element(c.windowed_accuracy.begin(), c.windowed_accuracy.end()))},
                         {"drift_events", c.drift_events}};
        if (include_timing) j["seconds"] = c.seconds;
        curves.push_back(std::move(j));
    }
    nlohmann::json j{{"preprocess", autodp::to_json(r.preprocess)},
                     {"feature_selection", autofe::to_json(r.selection)},
                     {"model_selection", ranking},
                     {"hpo", tuned},
                     {"winner",
                      {{"kind", to_string(r.winner)},
                       {"config", ztids::to_json(r.winner_params)},
                       {"accuracy", pct(r.winner_accuracy)}}},
                     {"curves", curves}};
    if (include_timing) j["timing"] = {{"total_seconds", r.total_seconds}};
    return j;
}

}  // namespace ztids::online
