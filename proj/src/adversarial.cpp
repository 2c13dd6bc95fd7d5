#include "ztids/adversarial.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>
#include <queue>

#include <nlohmann/json.hpp>

#include "ztids/error.hpp"
#include "ztids/parallel.hpp"
#include "ztids/seed.hpp"

namespace ztids::adversarial {

std::string to_string(AttackKind k) {
    switch (k) {
        case AttackKind::FGSM: return "FGSM";
        case AttackKind::BIM: return "BIM";
        case AttackKind::DTA: return "DTA";
    }
    return "?";
}

AttackKind attack_from_string(std::string_view s) {
    std::string up(s);
    std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    for (auto k : {AttackKind::FGSM, AttackKind::BIM, AttackKind::DTA})
        if (up == to_string(k)) return k;
    fail(ErrorCode::InvalidArgument, "unknown attack '" + std::string(s) + "'");
}

FeatureBox FeatureBox::of(const Matrix& rows) {
    FeatureBox b;
    if (rows.empty()) return b;
    b.lo.assign(rows.cols(), std::numeric_limits<double>::infinity());
    b.hi.assign(rows.cols(), -std::numeric_limits<double>::infinity());
    for (std::size_t r = 0; r < rows.rows(); ++r)
        for (std::size_t c = 0; c < rows.cols(); ++c) {
            b.lo[c] = std::min(b.lo[c], rows(r, c));
            b.hi[c] = std::max(b.hi[c], rows(r, c));
        }
    return b;
}

double FeatureBox::clip(std::size_t feature, double v) const noexcept {
    if (empty()) return v;
    return std::clamp(v, lo[feature], hi[feature]);
}

std::size_t AdversarialBatch::flipped_count() const noexcept {
    return static_cast<std::size_t>(std::count(flipped.begin(), flipped.end(), std::uint8_t{1}));
}

namespace {

double sign(double v) noexcept { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

AdversarialBatch start_batch(AttackKind kind, const Matrix& rows, std::span<const int> labels, const FeatureBox& box) {
    require(labels.size() == rows.rows(), ErrorCode::LengthMismatch, "one label per row is required");
    require(box.empty() || (box.lo.size() == rows.cols() && box.hi.size() == rows.cols()), ErrorCode::ShapeMismatch,
            "feature box width differs from the rows");
    AdversarialBatch b;
    b.attack = kind;
    b.origin = rows;
    b.adv = rows;
    b.labels.assign(labels.begin(), labels.end());
    b.flipped.assign(rows.rows(), 0);
    b.is_adversarial.assign(rows.rows(), 1);
    return b;
}

void mark_flips(AdversarialBatch& b, const models::TrainedModel& model) {
    const auto before = models::predict(model, b.origin);
    const auto after = models::predict(model, b.adv);
    for (std::size_t i = 0; i < b.rows(); ++i) b.flipped[i] = before[i] != after[i] ? 1 : 0;
}

void require_differentiable(const models::TrainedModel& m) {
    require(m.kind == models::ModelKind::MLP, ErrorCode::NotDifferentiable,
            models::to_string(m.kind) + " has no input gradient");
}

}  // namespace

AdversarialBatch fgsm(const models::TrainedModel& surrogate, const Matrix& rows, std::span<const int> labels,
                      double eps, const FeatureBox& box) {
    require_differentiable(surrogate);
    require(eps >= 0.0 && std::isfinite(eps), ErrorCode::InvalidArgument, "eps must be >= 0");
    auto b = start_batch(AttackKind::FGSM, rows, labels, box);
    b.params = {{"eps", eps}};
    parallel_for(rows.rows(), [&](std::size_t i) {
        const auto g = models::input_gradient(surrogate, rows.row(i), b.labels[i]);
        auto out = b.adv.row(i);
        for (std::size_t c = 0; c < out.size(); ++c) out[c] = box.clip(c, out[c] + eps * sign(g[c]));
    });
    mark_flips(b, surrogate);
    return b;
}

AdversarialBatch bim(const models::TrainedModel& surrogate, const Matrix& rows, std::span<const int> labels,
                     double eps, double alpha, std::size_t iters, const FeatureBox& box) {
    require_differentiable(surrogate);
    require(eps >= 0.0 && std::isfinite(eps), ErrorCode::InvalidArgument, "eps must be >= 0");
    require(alpha > 0.0 && std::isfinite(alpha), ErrorCode::InvalidArgument, "alpha must be > 0");
    require(iters >= 1, ErrorCode::InvalidArgument, "iters must be >= 1");
    auto b = start_batch(AttackKind::BIM, rows, labels, box);
    b.params = {{"eps", eps}, {"alpha", alpha}, {"iters", static_cast<std::int64_t>(iters)}};
    parallel_for(rows.rows(), [&](std::size_t i) {
        const auto x0 = rows.row(i);
        auto x = b.adv.row(i);
        for (std::size_t t = 0; t < iters; ++t) {
            const auto g = models::input_gradient(surrogate, x, b.labels[i]);
            for (std::size_t c = 0; c < x.size(); ++c) {
                const double stepped = std::clamp(x[c] + alpha * sign(g[c]), x0[c] - eps, x0[c] + eps);
                x[c] = box.clip(c, stepped);
            }
        }
    });
    mark_flips(b, surrogate);
    return b;
}

// ---- DTA -------------------------------------------------------------------------

namespace {

constexpr int kNoLeaf = std::numeric_limits<int>::max();

// Per-tree navigation tables for the outward leaf search.
struct TreeIndex {
    const Tree* tree = nullptr;
    std::vector<int> parent;
    std::vector<int> depth;
    std::array<std::vector<int>, 2> min_leaf_depth;  // shallowest leaf of each class below a node
    bool boosted = false;

    int leaf_class(int node) const {
        const double v = tree->nodes[static_cast<std::size_t>(node)].value;
        return boosted ? (v > 0.0 ? 1 : 0) : (v >= 0.5 ? 1 : 0);
    }
};

TreeIndex index_tree(const Tree& t, bool boosted) {
    TreeIndex ix;
    ix.tree = &t;
    ix.boosted = boosted;
    const std::size_t n = t.nodes.size();
    ix.parent.assign(n, -1);
    ix.depth.assign(n, 0);
    for (auto& v : ix.min_leaf_depth) v.assign(n, kNoLeaf);
    // Preorder walk for depths, then a reverse pass for the subtree minima.
    std::vector<int> order;
    order.reserve(n);
    std::vector<int> stack{0};
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        order.push_back(v);
        const auto& node = t.nodes[static_cast<std::size_t>(v)];
        if (node.is_leaf()) continue;
        for (int c : {node.left, node.right}) {
            ix.parent[static_cast<std::size_t>(c)] = v;
            ix.depth[static_cast<std::size_t>(c)] = ix.depth[static_cast<std::size_t>(v)] + 1;
            stack.push_back(c);
        }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const auto v = static_cast<std::size_t>(*it);
        const auto& node = t.nodes[v];
        if (node.is_leaf()) {
            ix.min_leaf_depth[static_cast<std::size_t>(ix.leaf_class(*it))][v] = ix.depth[v];
        } else {
            for (int k = 0; k < 2; ++k)
                ix.min_leaf_depth[static_cast<std::size_t>(k)][v] =
                    std::min(ix.min_leaf_depth[static_cast<std::size_t>(k)][static_cast<std::size_t>(node.left)],
                             ix.min_leaf_depth[static_cast<std::size_t>(k)][static_cast<std::size_t>(node.right)]);
        }
    }
    return ix;
}

// Moves x into the nearest leaf of class `target`, measured by path-edit
// distance from the leaf x currently reaches. Returns false if no candidate
// leaf is reachable inside the box.
bool steer_tree(const TreeIndex& ix, std::vector<double>& x, int target, double offset, const FeatureBox& box) {
    const Tree& t = *ix.tree;
    const int here = t.leaf_index(x);
    const int here_depth = ix.depth[static_cast<std::size_t>(here)];
    const auto& mind = ix.min_leaf_depth[static_cast<std::size_t>(target)];

    struct Item {
        int bound;
        int node;
        int lca_depth;
        bool operator>(const Item& o) const { return bound != o.bound ? bound > o.bound : node > o.node; }
    };
    std::priority_queue<Item, std::vector<Item>, std::greater<>> frontier;
    const auto push = [&](int node, int lca_depth) {
        const int d = mind[static_cast<std::size_t>(node)];
        if (d == kNoLeaf) return;
        frontier.push({here_depth + d - 2 * lca_depth, node, lca_depth});
    };
    for (int child = here, up = ix.parent[static_cast<std::size_t>(here)]; up >= 0;
         child = up, up = ix.parent[static_cast<std::size_t>(up)]) {
        const auto& n = t.nodes[static_cast<std::size_t>(up)];
        push(n.left == child ? n.right : n.left, ix.depth[static_cast<std::size_t>(up)]);
    }

    std::vector<int> path;
    while (!frontier.empty()) {
        const Item it = frontier.top();
        frontier.pop();
        const auto& node = t.nodes[static_cast<std::size_t>(it.node)];
        if (!node.is_leaf()) {
            push(node.left, it.lca_depth);
            push(node.right, it.lca_depth);
            continue;
        }
        // Constraints from the split point down to the candidate leaf.
        path.clear();
        for (int v = it.node; ix.depth[static_cast<std::size_t>(v)] > it.lca_depth; v = ix.parent[static_cast<std::size_t>(v)])
            path.push_back(v);
        std::vector<double> moved = x;
        bool feasible = true;
        for (auto p = path.rbegin(); p != path.rend() && feasible; ++p) {
            const auto& split = t.nodes[static_cast<std::size_t>(ix.parent[static_cast<std::size_t>(*p)])];
            const auto f = static_cast<std::size_t>(split.feature);
            const bool go_left = split.left == *p;
            const bool ok = go_left ? moved[f] <= split.threshold : moved[f] > split.threshold;
            if (ok) continue;
            moved[f] = go_left ? split.threshold - offset : split.threshold + offset;
            if (!box.empty() && (moved[f] < box.lo[f] || moved[f] > box.hi[f])) feasible = false;
        }
        if (feasible && t.leaf_index(moved) == it.node) {
            x = std::move(moved);
            return true;
        }
    }
    return false;
}

}  // namespace

AdversarialBatch dta(const models::TrainedModel& victim, const Matrix& rows, std::span<const int> labels,
                     double offset, const FeatureBox& box) {
    require(victim.is_tree_based(), ErrorCode::NotTreeBased, models::to_string(victim.kind) + " is not tree-based");
    require(offset > 0.0 && std::isfinite(offset), ErrorCode::InvalidArgument, "offset must be > 0");
    require(rows.cols() == victim.n_features_expected, ErrorCode::ShapeMismatch, "rows do not match the victim's width");
    auto b = start_batch(AttackKind::DTA, rows, labels, box);
    b.params = {{"offset", offset}};

    const std::vector<Tree>* trees = nullptr;
    bool boosted = false;
    if (const auto* f = std::get_if<models::ForestParams>(&victim.params)) {
        trees = &f->trees;
    } else {
        trees = &std::get<models::BoostParams>(victim.params).trees;
        boosted = true;
    }
    std::vector<TreeIndex> index;
    index.reserve(trees->size());
    for (const auto& t : *trees) index.push_back(index_tree(t, boosted));

    parallel_for(rows.rows(), [&](std::size_t i) {
        std::vector<double> x(rows.row(i).begin(), rows.row(i).end());
        const int clean = models::label_of(models::predict_proba_row(victim, x));
        const int target = 1 - clean;
        bool flipped = false;
        for (const auto& ix : index) {
            if (ix.leaf_class(ix.tree->leaf_index(x)) == target) continue;
            if (!steer_tree(ix, x, target, offset, box)) continue;
            if (models::label_of(models::predict_proba_row(victim, x)) == target) {
                flipped = true;
                break;
            }
        }
        std::copy(x.begin(), x.end(), b.adv.row(i).begin());
        b.flipped[i] = flipped ? 1 : 0;
    });
    return b;
}

// ---- detection and filtering -------------------------------------------------------

Dataset detection_dataset(const Matrix& clean, const AdversarialBatch& batch) {
    require(clean.cols() == batch.adv.cols() || batch.adv.empty(), ErrorCode::ShapeMismatch,
            "clean and adversarial rows differ in width");
    Matrix x(0, 0);
    x.set_cols(clean.cols());
    x.reserve_rows(clean.rows() + batch.rows());
    std::vector<int> y;
    y.reserve(clean.rows() + batch.rows());
    for (std::size_t r = 0; r < clean.rows(); ++r) {
        x.append_row(clean.row(r));
        y.push_back(0);
    }
    for (std::size_t r = 0; r < batch.rows(); ++r) {
        x.append_row(batch.adv.row(r));
        y.push_back(1);
    }
    auto ds = Dataset::from_matrix(std::move(x), std::move(y));
    ds.positive_label_name = "ADVERSARIAL";
    return ds;
}

models::TrainedModel fit_detector(const Matrix& clean, const AdversarialBatch& batch,
                                  const models::CandidateConfig& config, std::uint64_t seed) {
    return models::fit(config, detection_dataset(clean, batch), seed);
}

Dataset filter_adversarial(const models::TrainedModel& detector, const Dataset& mixed) {
    const auto flags = models::predict(detector, mixed.features);
    std::vector<std::size_t> keep;
    keep.reserve(mixed.rows());
    for (std::size_t i = 0; i < flags.size(); ++i)
        if (flags[i] == 0) keep.push_back(i);
    return mixed.subset(keep);
}

// ---- exercise ---------------------------------------------------------------------

models::CandidateConfig tuned_ids_config() {
    return {models::ModelKind::GBDT,
            {{"n_estimators", std::int64_t{300}},
             {"max_depth", std::int64_t{42}},
             {"learning_rate", 0.884},
             {"num_leaves", std::int64_t{1400}},
             {"min_child_samples", std::int64_t{30}}}};
}

namespace {

Dataset append_rows(const Dataset& base, const Matrix& rows, std::span<const int> labels) {
    Dataset out = base;
    out.features.reserve_rows(base.rows() + rows.rows());
    for (std::size_t r = 0; r < rows.rows(); ++r) {
        out.features.append_row(rows.row(r));
        out.labels.push_back(labels[r]);
    }
    return out;
}

Scores evaluate(const models::TrainedModel& m, const Matrix& x, std::span<const int> y) {
    return score(y, models::predict(m, x));
}

}  // namespace

ExerciseReport run_defense_exercise(const Dataset& raw, const ExerciseConfig& cfg) {
    raw.validate();
    require(cfg.adversarial_fraction > 0.0 && cfg.adversarial_fraction < 1.0, ErrorCode::InvalidArgument,
            "adversarial_fraction must be in (0,1)");
    ExerciseReport rep;
    rep.attack = cfg.attack;
    rep.params = cfg.params;
    rep.seed = cfg.seed;

    const auto [train_idx, test_idx] = stratified_split(raw.labels, cfg.test_fraction, mix_seed(cfg.seed, 1));
    auto dp = cfg.autodp;
    dp.adasyn.seed = mix_seed(cfg.seed, 2);
    const auto prepared = autodp::fit_preprocess(raw.subset(train_idx), dp);
    const Dataset& train = prepared.train;
    const Dataset test = autodp::apply_preprocess(prepared.report, raw.subset(test_idx));
    const auto box = FeatureBox::of(train.features);
    rep.counts.train_rows = train.rows();
    rep.counts.test_rows = test.rows();

    // (i) baseline
    const auto ids_seed = mix_seed(cfg.seed, 3);
    auto [ids, ids_seconds] = timed([&] { return models::fit(cfg.ids, train, ids_seed); });
    rep.baseline = evaluate(ids, test.features, test.labels);
    rep.baseline.seconds = ids_seconds;

    // (ii) adversarial rows from a stratified share of the original training rows
    std::vector<int> original_labels(train.labels.begin(),
                                     train.labels.begin() + static_cast<std::ptrdiff_t>(train_idx.size()));
    const auto source_idx =
        stratified_split(original_labels, cfg.adversarial_fraction, mix_seed(cfg.seed, 4)).second;
    const Matrix sources = train.features.select_rows(source_idx);
    std::vector<int> source_labels;
    for (auto i : source_idx) source_labels.push_back(train.labels[i]);

    AdversarialBatch batch;
    const double attack_seconds = timed([&] {
        if (cfg.attack == AttackKind::DTA) {
            batch = dta(ids, sources, source_labels, cfg.params.offset, box);
            return;
        }
        const auto surrogate = models::fit(cfg.surrogate, train, mix_seed(cfg.seed, 5));
        batch = cfg.attack == AttackKind::FGSM
                    ? fgsm(surrogate, sources, source_labels, cfg.params.eps, box)
                    : bim(surrogate, sources, source_labels, cfg.params.eps, cfg.params.alpha, cfg.params.iters, box);
    });
    rep.counts.injected = batch.rows();
    rep.counts.flipped = batch.flipped_count();
    const Dataset mixed = append_rows(train, batch.adv, batch.labels);

    // (iii) IDS under attack
    rep.under_attack = evaluate(ids, batch.adv, batch.labels);
    rep.under_attack.seconds = attack_seconds;
    const Dataset test_mixed = append_rows(test, batch.adv, batch.labels);
    rep.under_attack_mixed = evaluate(ids, test_mixed.features, test_mixed.labels);

    // (iv) detector on clean training rows vs adversarial rows, with a held-out split
    const Dataset detection = detection_dataset(train.features, batch);
    const auto [det_train_idx, det_test_idx] =
        stratified_split(detection.labels, cfg.detector_holdout, mix_seed(cfg.seed, 6));
    const Dataset det_train = detection.subset(det_train_idx);
    const Dataset det_test = detection.subset(det_test_idx);
    auto [detector, det_seconds] = timed([&] { return models::fit(cfg.ids, det_train, mix_seed(cfg.seed, 7)); });
    rep.detector = evaluate(detector, det_test.features, det_test.labels);
    rep.detector.seconds = det_seconds;

    // (v) filter the mixed training set
    const auto flags = models::predict(detector, mixed.features);
    for (std::size_t i = 0; i < flags.size(); ++i) {
        if (flags[i] == 0) continue;
        ++rep.counts.detected;
        if (i >= train.rows())
            ++rep.counts.true_detections;
        else
            ++rep.counts.false_positives;
    }
    const Dataset sanitized = filter_adversarial(detector, mixed);
    rep.counts.filtered = mixed.rows() - sanitized.rows();

    // (vi) retrain and evaluate on the untouched test split
    auto [recovered, rec_seconds] = timed([&] { return models::fit(cfg.ids, sanitized, ids_seed); });
    rep.recovered = evaluate(recovered, test.features, test.labels);
    rep.recovered.seconds = rec_seconds;
    return rep;
}

nlohmann::json to_json(const ExerciseReport& r, bool include_timing) {
    const auto block = [&](const Scores& s) {
        auto j = to_json(s);
        if (!include_timing) j.erase("seconds");
        return j;
    };
    const auto& c = r.counts;
    return {{"attack", to_string(r.attack)},
            {"params",
             {{"eps", r.params.eps}, {"alpha", r.params.alpha}, {"iters", r.params.iters}, {"offset", r.params.offset}}},
            {"seed", r.seed},
            {"baseline", block(r.baseline)},
            {"under_attack", block(r.under_attack)},
            {"under_attack_mixed", block(r.under_attack_mixed)},
            {"detector", block(r.detector)},
            {"recovered", block(r.recovered)},
            {"counts",
             {{"train_rows", c.train_rows},
              {"test_rows", c.test_rows},
              {"injected", c.injected},
              {"flipped", c.flipped},
              {"detected", c.detected},
              {"true_detections", c.true_detections},
              {"false_positives", c.false_positives},
              {"filtered", c.filtered}}}};
}

}  // namespace ztids::adversarial
