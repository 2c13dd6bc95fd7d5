#include "ztids/autofe.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "ztids/error.hpp"
#include "ztids/metrics.hpp"

namespace ztids::autofe {

void FeatureSelection::validate(std::size_t n_columns) const {
    require(n_selected == kept_indices.size() && n_selected >= 1, ErrorCode::InvalidArgument,
            "n_selected must equal kept count and be >= 1");
    std::set<std::size_t> seen;
    for (auto c : kept_indices) {
        require(c < n_columns, ErrorCode::InvalidArgument, "kept index out of range");
        require(seen.insert(c).second, ErrorCode::InvalidArgument, "duplicate kept index");
    }
}

nlohmann::json to_json(const FeatureSelection& s) {
    nlohmann::json drops = nlohmann::json::array();
    for (const auto& d : s.dropped_redundant)
        drops.push_back({{"dropped", d.dropped}, {"kept_partner", d.kept_partner}, {"abs_r", d.abs_r}});
    return {{"kept_indices", s.kept_indices},
            {"dropped_redundant", drops},
            {"rfe_ranking", s.rfe_ranking},
            {"n_selected", s.n_selected}};
}

double pearson(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    if (n == 0) return 0.0;
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(n);
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(n);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) return 0.0;  // constant column: correlation undefined, treated as 0
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

FeatureSelection pearson_filter(const Dataset& ds, double threshold) {
    require(threshold > 0.0 && threshold <= 1.0, ErrorCode::InvalidArgument, "threshold must be in (0,1]");
    const std::size_t m = ds.cols(), n = ds.rows();
    std::vector<std::vector<double>> cols(m, std::vector<double>(n));
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < m; ++c) {
            require(!is_missing(ds.features(r, c)), ErrorCode::InvalidArgument, "pearson_filter needs imputed data");
            cols[c][r] = ds.features(r, c);
        }
    FeatureSelection sel;
    sel.rfe_ranking.assign(m, 0);
    for (std::size_t j = 0; j < m; ++j) {
        bool redundant = false;
        for (auto i : sel.kept_indices) {
            const double r = std::abs(pearson(cols[i], cols[j]));
            if (r >= threshold) {
                sel.dropped_redundant.push_back({j, i, r});
                redundant = true;
                break;
            }
        }
        if (!redundant) {
            sel.kept_indices.push_back(j);
            sel.rfe_ranking[j] = 1;
        }
    }
    sel.n_selected = sel.kept_indices.size();
    return sel;
}

std::size_t default_step(std::size_t n_features) noexcept {
    return n_features <= 64 ? 1 : (n_features + 63) / 64;
}

namespace {

models::CandidateConfig ranking_forest(const RfeOptions& opts) {
    return {models::ModelKind::RF,
            {{"n_estimators", static_cast<std::int64_t>(opts.n_trees)},
             {"max_depth", static_cast<std::int64_t>(opts.max_depth)},
             {"min_samples_split", std::int64_t{2}},
             {"min_samples_leaf", std::int64_t{1}},
             {"criterion", std::string("gini")}}};
}

// Runs elimination until `n_select` columns remain. Each batch lists the
// columns removed in one round, least important first.
std::vector<std::vector<std::size_t>> eliminate(const Dataset& ds, std::size_t n_select, const RfeOptions& opts,
                                                std::vector<std::size_t>& survivors, std::size_t& fits) {
    const std::size_t step = opts.step == 0 ? default_step(ds.cols()) : opts.step;
    survivors.resize(ds.cols());
    std::iota(survivors.begin(), survivors.end(), 0);
    std::vector<std::vector<std::size_t>> batches;
    const auto cfg = ranking_forest(opts);
    fits = 0;
    for (std::size_t round = 0;; ++round) {
        const auto model = models::fit(cfg, ds.project(survivors), opts.seed + round, {.enforce_search_space = false});
        ++fits;
        if (survivors.size() <= n_select) break;
        const std::size_t k = std::min(step, survivors.size() - n_select);
        std::vector<std::size_t> pos(survivors.size());
        std::iota(pos.begin(), pos.end(), 0);
        // least important first; among ties the later column goes first
        std::sort(pos.begin(), pos.end(), [&](auto a, auto b) {
            if (model.feature_importance[a] != model.feature_importance[b])
                return model.feature_importance[a] < model.feature_importance[b];
            return a > b;
        });
        std::vector<std::size_t> removed;
        std::vector<bool> drop(survivors.size(), false);
        for (std::size_t i = 0; i < k; ++i) {
            removed.push_back(survivors[pos[i]]);
            drop[pos[i]] = true;
        }
        std::vector<std::size_t> next;
        for (std::size_t i = 0; i < survivors.size(); ++i)
            if (!drop[i]) next.push_back(survivors[i]);
        survivors = std::move(next);
        batches.push_back(std::move(removed));
    }
    return batches;
}

}  // namespace

FeatureSelection rfe(const Dataset& ds, std::size_t n_select, const RfeOptions& opts) {
    require(n_select >= 1 && n_select <= ds.cols(), ErrorCode::InvalidTargetCount,
            "n_select=" + std::to_string(n_select) + " outside [1, " + std::to_string(ds.cols()) + "]");
    FeatureSelection sel;
    std::vector<std::size_t> survivors;
    const auto batches = eliminate(ds, n_select, opts, survivors, sel.ranking_fits);
    sel.rfe_ranking.assign(ds.cols(), 1);
    for (std::size_t b = 0; b < batches.size(); ++b)
        for (auto c : batches[b]) sel.rfe_ranking[c] = batches.size() - b + 1;
    sel.kept_indices = survivors;
    sel.n_selected = survivors.size();
    return sel;
}

std::vector<std::size_t> elimination_order(const Dataset& ds, const RfeOptions& opts, std::size_t* fits) {
    std::vector<std::size_t> survivors;
    std::size_t n_fits = 0;
    const auto batches = eliminate(ds, 1, opts, survivors, n_fits);
    if (fits) *fits = n_fits;
    std::vector<std::size_t> order;
    for (const auto& b : batches) order.insert(order.end(), b.begin(), b.end());
    order.insert(order.end(), survivors.begin(), survivors.end());
    return order;
}

optimize::ObjectiveResult cv_on_columns(const Dataset& ds, const FoldPlan& plan, std::span<const std::size_t> columns,
                                        const models::CandidateConfig& cfg, std::uint64_t seed) {
    const Dataset projected = ds.project(columns);
    optimize::ObjectiveResult res;
    for (std::size_t f = 0; f < plan.folds.size(); ++f) {
        const auto& fold = plan.folds[f];
        const auto model = models::fit(cfg, projected.subset(fold.train), seed + f, {.enforce_search_space = false});
        const Dataset test = projected.subset(fold.test);
        res.fold_scores.push_back(score(test.labels, models::predict(model, test.features)).f1);
    }
    const double mean = std::accumulate(res.fold_scores.begin(), res.fold_scores.end(), 0.0) /
                        static_cast<double>(std::max<std::size_t>(res.fold_scores.size(), 1));
    res.value = 1.0 - mean;
    return res;
}

FeatureCountResult optimize_feature_count(const Dataset& ds, const FoldPlan& plan, const FeatureCountOptions& opts) {
    const std::size_t m = ds.cols();
    require(m >= 1, ErrorCode::InvalidTargetCount, "dataset has no features");
    FeatureCountResult out;
    if (m == 1) {
        out.selection.kept_indices = {0};
        out.selection.rfe_ranking = {1};
        out.selection.n_selected = 1;
        out.best_objective = cv_on_columns(ds, plan, out.selection.kept_indices, opts.eval_model, opts.rfe.seed).value;
        return out;
    }
    std::size_t fits = 0;
    const auto order = elimination_order(ds, opts.rfe, &fits);
    auto top = [&](std::size_t n) {
        std::vector<std::size_t> cols(order.end() - static_cast<std::ptrdiff_t>(n), order.end());
        std::sort(cols.begin(), cols.end());
        return cols;
    };
    const auto lo = static_cast<std::int64_t>(std::ceil(0.1 * static_cast<double>(m)));
    HyperparameterSpace space{{Dim::discrete("n_select", lo, static_cast<std::int64_t>(m))}};
    auto pso = opts.pso;
    pso.warm_start = ParamMap{{"n_select", static_cast<std::int64_t>(m)}};
    const auto result = optimize::pso_minimize(
        [&](const ParamMap& p) {
            const auto cols = top(static_cast<std::size_t>(get_int(p, "n_select")));
            return cv_on_columns(ds, plan, cols, opts.eval_model, opts.rfe.seed);
        },
        space, pso);

    // Equal objectives resolve to the smaller subset.
    auto n = static_cast<std::size_t>(get_int(result.best_config, "n_select"));
    for (const auto& e : result.trace.evaluations)
        if (e.objective == result.best_value) n = std::min(n, static_cast<std::size_t>(get_int(e.config, "n_select")));
    out.selection.kept_indices = top(n);
    out.selection.n_selected = n;
    out.selection.ranking_fits = fits;
    out.selection.rfe_ranking.assign(m, 1);
    const std::size_t cut = m - n;
    for (std::size_t p = 0; p < cut; ++p) out.selection.rfe_ranking[order[p]] = cut - p + 1;
    out.trace = result.trace;
    out.best_objective = result.best_value;
    return out;
}

FeatureSelection compose(const FeatureSelection& outer, const FeatureSelection& inner) {
    FeatureSelection out;
    out.dropped_redundant = outer.dropped_redundant;
    for (const auto& d : inner.dropped_redundant)
        out.dropped_redundant.push_back({outer.kept_indices.at(d.dropped), outer.kept_indices.at(d.kept_partner), d.abs_r});
    for (auto c : inner.kept_indices) out.kept_indices.push_back(outer.kept_indices.at(c));
    std::sort(out.kept_indices.begin(), out.kept_indices.end());
    out.n_selected = out.kept_indices.size();
    out.rfe_ranking.assign(outer.rfe_ranking.size(), 0);
    for (std::size_t i = 0; i < inner.rfe_ranking.size() && i < outer.kept_indices.size(); ++i)
        out.rfe_ranking[outer.kept_indices[i]] = inner.rfe_ranking[i];
    out.ranking_fits = inner.ranking_fits;
    return out;
}

}  // namespace ztids::autofe
