#include "ztids/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <nlohmann/json.hpp>

#include "ztids/error.hpp"
#include "ztids/metrics.hpp"
#include "ztids/seed.hpp"

namespace ztids::models {

namespace {

double sigmoid(double z) noexcept {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

void check_width(const TrainedModel& m, std::size_t width) {
    require(width == m.n_features_expected, ErrorCode::ShapeMismatch,
            "expected " + std::to_string(m.n_features_expected) + " features, got " + std::to_string(width));
}

// ---- MLP -------------------------------------------------------------------

struct Activations {
    std::vector<std::vector<double>> pre;   // per layer, before activation
    std::vector<std::vector<double>> post;  // per layer input (post[0] = x)
};

double mlp_forward(const MlpParams& p, std::span<const double> x, Activations* cache) {
    std::vector<double> a(x.begin(), x.end()), z;
    if (cache) {
        cache->pre.clear();
        cache->post.assign(1, a);
    }
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
        const auto& L = p.layers[l];
        z.assign(L.out, 0.0);
        for (std::size_t o = 0; o < L.out; ++o) {
            double s = L.b[o];
            const double* w = L.w.data() + o * L.in;
            for (std::size_t i = 0; i < L.in; ++i) s += w[i] * a[i];
            z[o] = s;
        }
        const bool last = l + 1 == p.layers.size();
        if (cache) cache->pre.push_back(z);
        if (!last) {
            for (auto& v : z) v = std::max(0.0, v);
            if (cache) cache->post.push_back(z);
        }
        a.swap(z);
    }
    return a.empty() ? 0.0 : a[0];
}

// Backpropagates dL/dlogit through the network. Accumulates weight gradients
// when `grads` is non-null and returns dL/dx.
std::vector<double> mlp_backward(const MlpParams& p, const Activations& cache, double dlogit,
                                 std::vector<DenseLayer>* grads) {
    std::vector<double> delta{dlogit};
    for (std::size_t l = p.layers.size(); l-- > 0;) {
        const auto& L = p.layers[l];
        const auto& input = cache.post[l];
        if (grads) {
            auto& G = (*grads)[l];
            for (std::size_t o = 0; o < L.out; ++o) {
                G.b[o] += delta[o];
                double* gw = G.w.data() + o * L.in;
                for (std::size_t i = 0; i < L.in; ++i) gw[i] += delta[o] * input[i];
            }
        }
        std::vector<double> prev(L.in, 0.0);
        for (std::size_t o = 0; o < L.out; ++o) {
            const double* w = L.w.data() + o * L.in;
            for (std::size_t i = 0; i < L.in; ++i) prev[i] += w[i] * delta[o];
        }
        if (l > 0) {
            const auto& z = cache.pre[l - 1];
            for (std::size_t i = 0; i < prev.size(); ++i)
                if (z[i] <= 0.0) prev[i] = 0.0;
        }
        delta.swap(prev);
    }
    return delta;
}

MlpParams fit_mlp(const ParamMap& cfg, const Dataset& train, std::uint64_t seed) {
    const auto hidden_layers = static_cast<std::size_t>(get_int(cfg, "hidden_layers"));
    const auto hidden_units = static_cast<std::size_t>(get_int(cfg, "hidden_units"));
    const auto epochs = static_cast<std::size_t>(get_int(cfg, "epochs"));
    const auto batch = static_cast<std::size_t>(get_int(cfg, "batch_size"));
    const double lr = get_real(cfg, "learning_rate");

    std::mt19937_64 rng(seed);
    MlpParams p;
    std::size_t in = train.cols();
    for (std::size_t l = 0; l <= hidden_layers; ++l) {
        const std::size_t out = l == hidden_layers ? 1 : hidden_units;
        DenseLayer L{in, out, std::vector<double>(in * out), std::vector<double>(out, 0.0)};
        std::normal_distribution<double> init(0.0, std::sqrt((l == hidden_layers ? 1.0 : 2.0) / static_cast<double>(in)));
        for (auto& w : L.w) w = init(rng);
        p.layers.push_back(std::move(L));
        in = out;
    }

    // Adam moments
    std::vector<DenseLayer> m1, m2, grads;
    for (const auto& L : p.layers) {
        DenseLayer z{L.in, L.out, std::vector<double>(L.w.size(), 0.0), std::vector<double>(L.b.size(), 0.0)};
        m1.push_back(z);
        m2.push_back(z);
        grads.push_back(z);
    }
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    std::size_t step = 0;
    std::vector<std::size_t> order(train.rows());
    std::iota(order.begin(), order.end(), 0);
    Activations cache;
    for (std::size_t e = 0; e < epochs; ++e) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t end = std::min(order.size(), start + batch);
            for (auto& G : grads) {
                std::fill(G.w.begin(), G.w.end(), 0.0);
                std::fill(G.b.begin(), G.b.end(), 0.0);
            }
            for (std::size_t i = start; i < end; ++i) {
                const auto r = order[i];
                const double logit = mlp_forward(p, train.features.row(r), &cache);
                mlp_backward(p, cache, sigmoid(logit) - train.labels[r], &grads);
            }
            ++step;
            const double scale = 1.0 / static_cast<double>(end - start);
            const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
            const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
            auto adam = [&](std::vector<double>& w, std::vector<double>& g, std::vector<double>& a, std::vector<double>& b) {
                for (std::size_t i = 0; i < w.size(); ++i) {
                    const double gi = g[i] * scale;
                    a[i] = beta1 * a[i] + (1 - beta1) * gi;
                    b[i] = beta2 * b[i] + (1 - beta2) * gi * gi;
                    w[i] -= lr * (a[i] / c1) / (std::sqrt(b[i] / c2) + eps);
                }
            };
            for (std::size_t l = 0; l < p.layers.size(); ++l) {
                adam(p.layers[l].w, grads[l].w, m1[l].w, m2[l].w);
                adam(p.layers[l].b, grads[l].b, m1[l].b, m2[l].b);
            }
        }
    }
    return p;
}

// ---- KNN -------------------------------------------------------------------

double knn_proba(const KnnParams& p, std::span<const double> x) {
    if (p.y.empty()) return 0.0;
    std::vector<std::pair<double, std::size_t>> d(p.y.size());
    for (std::size_t r = 0; r < p.y.size(); ++r) {
        const auto row = p.x.row(r);
        double s = 0.0;
        for (std::size_t c = 0; c < row.size(); ++c) {
            const double t = row[c] - x[c];
            s += t * t;
        }
        d[r] = {s, r};
    }
    const std::size_t k = std::min(p.k, d.size());
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
    std::size_t votes = 0;
    for (std::size_t i = 0; i < k; ++i) votes += p.y[d[i].second] == 1;
    return static_cast<double>(votes) / static_cast<double>(k);
}

// ---- Forests ---------------------------------------------------------------

ForestParams fit_rf(const ParamMap& cfg, const Dataset& train, std::uint64_t seed, std::vector<double>& importance) {
    const auto n_trees = static_cast<std::size_t>(get_int(cfg, "n_estimators"));
    CartOptions opts;
    opts.max_depth = static_cast<std::size_t>(get_int(cfg, "max_depth"));
    opts.min_samples_split = static_cast<std::size_t>(get_int(cfg, "min_samples_split"));
    opts.min_samples_leaf = static_cast<std::size_t>(get_int(cfg, "min_samples_leaf"));
    opts.criterion = get_string(cfg, "criterion") == "entropy" ? SplitCriterion::Entropy : SplitCriterion::Gini;
    opts.max_features = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(train.cols()))));

    ForestParams p;
    importance.assign(train.cols(), 0.0);
    const std::size_t n = train.rows();
    std::vector<std::uint32_t> sample(n);
    for (std::size_t t = 0; t < n_trees; ++t) {
        const std::uint64_t tree_seed = mix_seed(seed, t);
        std::mt19937_64 rng(tree_seed);
        std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(n - 1));
        for (auto& s : sample) s = pick(rng);
        std::vector<double> imp;
        p.trees.push_back(grow_cart(train.features, train.labels, sample, opts, mix_seed(tree_seed, 1), imp));
        const double total = std::accumulate(imp.begin(), imp.end(), 0.0);
        if (total > 0.0)
            for (std::size_t f = 0; f < imp.size(); ++f) importance[f] += imp[f] / total;
    }
    if (n_trees > 0)
        for (auto& v : importance) v /= static_cast<double>(n_trees);
    return p;
}

BoostParams fit_gbdt(const ParamMap& cfg, const Dataset& train) {
    const auto n_trees = static_cast<std::size_t>(get_int(cfg, "n_estimators"));
    BoostParams p;
    p.learning_rate = get_real(cfg, "learning_rate");
    BoostTreeOptions opts;
    opts.max_depth = static_cast<std::size_t>(get_int(cfg, "max_depth"));
    opts.num_leaves = static_cast<std::size_t>(get_int(cfg, "num_leaves"));
    opts.min_child_samples = static_cast<std::size_t>(get_int(cfg, "min_child_samples"));

    const std::size_t n = train.rows();
    const double prior = static_cast<double>(train.count_label(1)) / static_cast<double>(n);
    p.base_score = std::log(prior / (1.0 - prior));
    std::vector<double> score(n, p.base_score), grad(n), hess(n);
    if (n_trees == 0) return p;
    const auto sorted = presort_columns(train.features);
    for (std::size_t t = 0; t < n_trees; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            const double pr = sigmoid(score[i]);
            grad[i] = pr - train.labels[i];
            hess[i] = pr * (1.0 - pr);
        }
        Tree tree = grow_boost_tree(train.features, grad, hess, sorted, opts);
        for (std::size_t i = 0; i < n; ++i) score[i] += p.learning_rate * tree.predict(train.features.row(i));
        p.trees.push_back(std::move(tree));
    }
    return p;
}

// ---- configuration ---------------------------------------------------------

struct StructuralRule {
    std::string name;
    double lo, hi;
    bool lo_open;
};

std::vector<StructuralRule> structural_rules(ModelKind k) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (k) {
        case ModelKind::KNN: return {{"n_neighbors", 1, inf, false}};
        case ModelKind::MLP:
            return {{"hidden_layers", 0, inf, false}, {"hidden_units", 1, inf, false}, {"epochs", 0, inf, false},
                    {"batch_size", 1, inf, false}, {"learning_rate", 0, inf, true}};
        case ModelKind::RF:
            return {{"n_estimators", 1, inf, false}, {"max_depth", 1, inf, false}, {"min_samples_split", 2, inf, false},
                    {"min_samples_leaf", 1, inf, false}};
        case ModelKind::GBDT:
            return {{"n_estimators", 0, inf, false}, {"max_depth", 1, inf, false}, {"learning_rate", 0, 1, true},
                    {"num_leaves", 1, inf, false}, {"min_child_samples", 1, inf, false}};
    }
    return {};
}

}  // namespace

std::string to_string(ModelKind k) {
    switch (k) {
        case ModelKind::KNN: return "KNN";
        case ModelKind::MLP: return "MLP";
        case ModelKind::RF: return "RF";
        case ModelKind::GBDT: return "GBDT";
    }
    return "?";
}

ModelKind kind_from_string(std::string_view s) {
    for (auto k : kAllKinds)
        if (to_string(k) == s) return k;
    if (s == "LightGBM" || s == "lightgbm") return ModelKind::GBDT;
    fail(ErrorCode::InvalidArgument, "unknown model kind '" + std::string(s) + "'");
}

CandidateConfig default_config(ModelKind kind) {
    switch (kind) {
        case ModelKind::KNN: return {kind, {{"n_neighbors", std::int64_t{5}}}};
        case ModelKind::MLP:
            return {kind,
                    {{"hidden_layers", std::int64_t{2}},
                     {"hidden_units", std::int64_t{64}},
                     {"epochs", std::int64_t{20}},
                     {"batch_size", std::int64_t{64}},
                     {"learning_rate", 0.001}}};
        case ModelKind::RF:
            return {kind,
                    {{"n_estimators", std::int64_t{100}},
                     {"max_depth", std::int64_t{50}},
                     {"min_samples_split", std::int64_t{2}},
                     {"min_samples_leaf", std::int64_t{1}},
                     {"criterion", std::string("gini")}}};
        case ModelKind::GBDT:
            return {kind,
                    {{"n_estimators", std::int64_t{100}},
                     {"max_depth", std::int64_t{50}},
                     {"learning_rate", 0.1},
                     {"num_leaves", std::int64_t{100}},
                     {"min_child_samples", std::int64_t{20}}}};
    }
    return {};
}

HyperparameterSpace search_space(ModelKind kind) {
    switch (kind) {
        case ModelKind::KNN: return {{Dim::discrete("n_neighbors", 1, 50)}};
        case ModelKind::MLP:
            return {{Dim::discrete("hidden_layers", 1, 4), Dim::discrete("hidden_units", 8, 256),
                     Dim::discrete("epochs", 5, 100), Dim::discrete("batch_size", 16, 256),
                     Dim::continuous("learning_rate", 0.0, 0.1, true, false)}};
        case ModelKind::RF:
            return {{Dim::discrete("n_estimators", 50, 500), Dim::discrete("max_depth", 5, 50),
                     Dim::discrete("min_samples_split", 2, 11), Dim::discrete("min_samples_leaf", 1, 11),
                     Dim::categorical("criterion", {"gini", "entropy"})}};
        case ModelKind::GBDT:
            return {{Dim::discrete("n_estimators", 50, 500), Dim::discrete("max_depth", 5, 50),
                     Dim::continuous("learning_rate", 0.0, 1.0, true, true), Dim::discrete("num_leaves", 100, 2000),
                     Dim::discrete("min_child_samples", 10, 50)}};
    }
    return {};
}

void validate_config(const CandidateConfig& cfg, const FitOptions& opts) {
    const auto space = search_space(cfg.kind);
    for (const auto& [name, value] : cfg.params)
        require(space.find(name) != nullptr, ErrorCode::BadHyperparameter,
                "unknown hyperparameter '" + name + "' for " + to_string(cfg.kind));
    for (const auto& dim : space.dims) {
        const auto it = cfg.params.find(dim.name);
        require(it != cfg.params.end(), ErrorCode::BadHyperparameter, "missing hyperparameter '" + dim.name + "'");
        if (dim.kind == DimKind::Discrete)
            require(std::holds_alternative<std::int64_t>(it->second), ErrorCode::BadHyperparameter,
                    "'" + dim.name + "' must be an integer");
        if (dim.kind == DimKind::Categorical)
            require(dim.contains(it->second), ErrorCode::BadHyperparameter,
                    "'" + dim.name + "' = " + ztids::to_string(it->second) + " is not an allowed option");
        if (opts.enforce_search_space)
            require(dim.contains(it->second), ErrorCode::BadHyperparameter,
                    "'" + dim.name + "' = " + ztids::to_string(it->second) + " outside its search space");
    }
    for (const auto& rule : structural_rules(cfg.kind)) {
        const double v = get_real(cfg.params, rule.name);
        const bool ok = (rule.lo_open ? v > rule.lo : v >= rule.lo) && v <= rule.hi && std::isfinite(v);
        require(ok, ErrorCode::BadHyperparameter, "'" + rule.name + "' = " + ztids::to_string(cfg.params.at(rule.name)) +
                                                      " is not a valid value");
    }
}

TrainedModel fit(const CandidateConfig& cfg, const Dataset& train, std::uint64_t seed, const FitOptions& opts) {
    validate_config(cfg, opts);
    require(train.rows() > 0, ErrorCode::Empty, "empty training set");
    const std::size_t n1 = train.count_label(1);
    if (cfg.kind != ModelKind::KNN)
        require(n1 > 0 && n1 < train.rows(), ErrorCode::SingleClassTraining,
                to_string(cfg.kind) + " needs both classes in the training data");
    TrainedModel m;
    m.kind = cfg.kind;
    m.config = cfg;
    m.n_features_expected = train.cols();
    m.fit_seconds = timed([&] {
        switch (cfg.kind) {
            case ModelKind::KNN:
                m.params = KnnParams{train.features, train.labels, static_cast<std::size_t>(get_int(cfg.params, "n_neighbors"))};
                break;
            case ModelKind::MLP: m.params = fit_mlp(cfg.params, train, seed); break;
            case ModelKind::RF: m.params = fit_rf(cfg.params, train, seed, m.feature_importance); break;
            case ModelKind::GBDT: m.params = fit_gbdt(cfg.params, train); break;
        }
    });
    return m;
}

double boosted_score(const BoostParams& p, std::span<const double> x, std::size_t n_trees) {
    double s = p.base_score;
    n_trees = std::min(n_trees, p.trees.size());
    for (std::size_t t = 0; t < n_trees; ++t) s += p.learning_rate * p.trees[t].predict(x);
    return s;
}

double predict_proba_row(const TrainedModel& m, std::span<const double> x) {
    check_width(m, x.size());
    return std::visit(
        [&](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, KnnParams>) {
                return knn_proba(p, x);
            } else if constexpr (std::is_same_v<T, MlpParams>) {
                return sigmoid(mlp_forward(p, x, nullptr));
            } else if constexpr (std::is_same_v<T, ForestParams>) {
                if (p.trees.empty()) return 0.0;
                std::size_t votes = 0;
                for (const auto& t : p.trees) votes += label_of(t.predict(x));
                return static_cast<double>(votes) / static_cast<double>(p.trees.size());
            } else {
                return sigmoid(boosted_score(p, x, p.trees.size()));
            }
        },
        m.params);
}

std::vector<double> predict_proba(const TrainedModel& m, const Matrix& rows) {
    check_width(m, rows.cols());
    std::vector<double> out(rows.rows());
    for (std::size_t r = 0; r < rows.rows(); ++r) out[r] = predict_proba_row(m, rows.row(r));
    return out;
}

std::vector<int> predict(const TrainedModel& m, const Matrix& rows) {
    const auto proba = predict_proba(m, rows);
    std::vector<int> out(proba.size());
    std::transform(proba.begin(), proba.end(), out.begin(), label_of);
    return out;
}

std::vector<double> input_gradient(const TrainedModel& m, std::span<const double> x, int y) {
    const auto* p = std::get_if<MlpParams>(&m.params);
    require(p != nullptr, ErrorCode::NotDifferentiable, to_string(m.kind) + " has no input gradient");
    check_width(m, x.size());
    Activations cache;
    const double logit = mlp_forward(*p, x, &cache);
    return mlp_backward(*p, cache, sigmoid(logit) - y, nullptr);
}

// ---- serialization -----------------------------------------------------------

namespace {

nlohmann::json tree_to_json(const Tree& t) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : t.nodes) nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
    return nodes;
}

Tree tree_from_json(const nlohmann::json& j, std::size_t n_features) {
    Tree t;
    for (const auto& n : j) {
        TreeNode node{n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(), n.at(3).get<int>(), n.at(4).get<double>()};
        t.nodes.push_back(node);
    }
    require(!t.nodes.empty(), ErrorCode::CorruptModel, "tree without nodes");
    const int count = static_cast<int>(t.nodes.size());
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
        const auto& n = t.nodes[i];
        require(std::isfinite(n.value) && std::isfinite(n.threshold), ErrorCode::CorruptModel, "non-finite tree value");
        if (n.is_leaf()) continue;
        require(n.feature < static_cast<int>(n_features), ErrorCode::CorruptModel, "split feature out of range");
        require(n.left > static_cast<int>(i) && n.left < count && n.right > static_cast<int>(i) && n.right < count,
                ErrorCode::CorruptModel, "bad child index");
    }
    return t;
}

}  // namespace

std::string serialize(const TrainedModel& m) {
    nlohmann::json j;
    j["format"] = "ztids-model";
    j["version"] = kModelFormatVersion;
    j["kind"] = to_string(m.kind);
    j["n_features"] = m.n_features_expected;
    j["config"] = ztids::to_json(m.config.params);
    if (!m.feature_importance.empty()) j["feature_importance"] = m.feature_importance;
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, KnnParams>) {
                j["params"] = {{"k", p.k}, {"rows", p.x.rows()}, {"x", p.x.data()}, {"y", p.y}};
            } else if constexpr (std::is_same_v<T, MlpParams>) {
                nlohmann::json layers = nlohmann::json::array();
                for (const auto& L : p.layers) layers.push_back({{"in", L.in}, {"out", L.out}, {"w", L.w}, {"b", L.b}});
                j["params"] = {{"layers", layers}};
            } else if constexpr (std::is_same_v<T, ForestParams>) {
                nlohmann::json trees = nlohmann::json::array();
                for (const auto& t : p.trees) trees.push_back(tree_to_json(t));
                j["params"] = {{"trees", trees}};
            } else {
                nlohmann::json trees = nlohmann::json::array();
                for (const auto& t : p.trees) trees.push_back(tree_to_json(t));
                j["params"] = {{"base_score", p.base_score}, {"learning_rate", p.learning_rate}, {"trees", trees}};
            }
        },
        m.params);
    return j.dump();
}

TrainedModel deserialize(std::string_view bytes) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::CorruptModel, std::string("unparsable model: ") + e.what());
    }
    try {
        require(j.at("format").get<std::string>() == "ztids-model", ErrorCode::CorruptModel, "not a model file");
        const int version = j.at("version").get<int>();
        require(version == kModelFormatVersion, ErrorCode::VersionMismatch,
                "model format version " + std::to_string(version) + ", supported " + std::to_string(kModelFormatVersion));
        TrainedModel m;
        m.kind = kind_from_string(j.at("kind").get<std::string>());
        m.n_features_expected = j.at("n_features").get<std::size_t>();
        m.config = {m.kind, param_map_from_json(j.at("config"))};
        if (j.contains("feature_importance")) m.feature_importance = j["feature_importance"].get<std::vector<double>>();
        const auto& p = j.at("params");
        switch (m.kind) {
            case ModelKind::KNN: {
                KnnParams k;
                k.k = p.at("k").get<std::size_t>();
                const auto rows = p.at("rows").get<std::size_t>();
                const auto x = p.at("x").get<std::vector<double>>();
                k.y = p.at("y").get<std::vector<int>>();
                require(x.size() == rows * m.n_features_expected && k.y.size() == rows, ErrorCode::CorruptModel,
                        "KNN matrix shape");
                k.x = Matrix(rows, m.n_features_expected);
                for (std::size_t r = 0; r < rows; ++r)
                    std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(r * m.n_features_expected), m.n_features_expected,
                                k.x.row(r).begin());
                m.params = std::move(k);
                break;
            }
            case ModelKind::MLP: {
                MlpParams mp;
                std::size_t expect_in = m.n_features_expected;
                for (const auto& L : p.at("layers")) {
                    DenseLayer d{L.at("in").get<std::size_t>(), L.at("out").get<std::size_t>(),
                                 L.at("w").get<std::vector<double>>(), L.at("b").get<std::vector<double>>()};
                    require(d.in == expect_in && d.w.size() == d.in * d.out && d.b.size() == d.out,
                            ErrorCode::CorruptModel, "MLP layer shapes do not chain");
                    expect_in = d.out;
                    mp.layers.push_back(std::move(d));
                }
                require(expect_in == 1, ErrorCode::CorruptModel, "MLP must end in one output unit");
                m.params = std::move(mp);
                break;
            }
            case ModelKind::RF: {
                ForestParams fp;
                for (const auto& t : p.at("trees")) fp.trees.push_back(tree_from_json(t, m.n_features_expected));
                m.params = std::move(fp);
                break;
            }
            case ModelKind::GBDT: {
                BoostParams bp;
                bp.base_score = p.at("base_score").get<double>();
                bp.learning_rate = p.at("learning_rate").get<double>();
                for (const auto& t : p.at("trees")) bp.trees.push_back(tree_from_json(t, m.n_features_expected));
                m.params = std::move(bp);
                break;
            }
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::CorruptModel, std::string("malformed model: ") + e.what());
    }
}

}  // namespace ztids::models
