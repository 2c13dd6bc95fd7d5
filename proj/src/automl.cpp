#include "ztids/automl.hpp"

#include <algorithm>
#include <map>
#include <mutex>

#include <nlohmann/json.hpp>

#include "ztids/error.hpp"
#include "ztids/parallel.hpp"
#include "ztids/seed.hpp"

namespace ztids::optimize {

using models::CandidateConfig;
using models::ModelKind;

PreparedFolds prepare_folds(const Dataset& ds, const FoldPlan& plan, const autodp::AutoDpOptions& dp) {
    PreparedFolds out;
    out.seed = plan.seed;
    out.folds.resize(plan.folds.size());
    parallel_for(plan.folds.size(), [&](std::size_t f) {
        auto opts = dp;
        opts.adasyn.seed = mix_seed(dp.adasyn.seed, f);
        auto fitted = autodp::fit_preprocess(ds.subset(plan.folds[f].train), opts);
        out.folds[f].test = autodp::apply_preprocess(fitted.report, ds.subset(plan.folds[f].test));
        out.folds[f].train = std::move(fitted.train);
    });
    return out;
}

CvOutcome cv_evaluate(const CandidateConfig& cfg, const PreparedFolds& folds, const models::FitOptions& fit_opts) {
    require(!folds.folds.empty(), ErrorCode::InvalidArgument, "no folds to evaluate");
    CvOutcome out;
    out.folds.resize(folds.folds.size());
    parallel_for(folds.folds.size(), [&](std::size_t f) {
        const auto& fold = folds.folds[f];
        const auto model = models::fit(cfg, fold.train, mix_seed(folds.seed, f), fit_opts);
        out.folds[f] = score(fold.test.labels, models::predict(model, fold.test.features));
        out.folds[f].seconds = model.fit_seconds;
    });
    const double n = static_cast<double>(out.folds.size());
    for (const auto& s : out.folds) {
        out.objective.fold_scores.push_back(s.f1);
        out.mean.accuracy += s.accuracy / n;
        out.mean.precision += s.precision / n;
        out.mean.recall += s.recall / n;
        out.mean.f1 += s.f1 / n;
        out.mean.seconds += s.seconds / n;
        out.mean.confusion.tp += s.confusion.tp;
        out.mean.confusion.fp += s.confusion.fp;
        out.mean.confusion.tn += s.confusion.tn;
        out.mean.confusion.fn += s.confusion.fn;
    }
    double f1_sum = 0.0;
    for (double v : out.objective.fold_scores) f1_sum += v;
    out.objective.value = 1.0 - f1_sum / n;
    return out;
}

double cv_objective(const CandidateConfig& cfg, const Dataset& ds, const FoldPlan& plan,
                    const autodp::AutoDpOptions& dp) {
    return cv_evaluate(cfg, prepare_folds(ds, plan, dp)).objective.value;
}

std::vector<CashEntry> cash_select(const PreparedFolds& folds, const std::vector<ModelKind>& kinds, std::size_t top) {
    require(kinds.size() >= 2, ErrorCode::InvalidArgument, "model selection needs at least two kinds");
    std::vector<CashEntry> entries(kinds.size());
    parallel_for(kinds.size(), [&](std::size_t i) {
        auto [outcome, secs] = timed([&] { return cv_evaluate(models::default_config(kinds[i]), folds); });
        entries[i] = {kinds[i], outcome.objective.value, outcome.objective.fold_scores, secs, false};
    });
    std::stable_sort(entries.begin(), entries.end(), [](const CashEntry& a, const CashEntry& b) {
        if (a.objective != b.objective) return a.objective < b.objective;
        return static_cast<int>(a.kind) < static_cast<int>(b.kind);
    });
    for (std::size_t i = 0; i < entries.size() && i < top; ++i) entries[i].selected_for_hpo = true;
    return entries;
}

Dataset Pipeline::transform(const Dataset& raw) const {
    std::vector<std::size_t> cols;
    cols.reserve(input_columns.size());
    for (const auto& name : input_columns) {
        const auto it = std::find(raw.feature_names.begin(), raw.feature_names.end(), name);
        require(it != raw.feature_names.end(), ErrorCode::ShapeMismatch, "input is missing column '" + name + "'");
        cols.push_back(static_cast<std::size_t>(it - raw.feature_names.begin()));
    }
    return autodp::apply_preprocess(preprocess, raw.project(cols));
}

std::string serialize(const Pipeline& p) {
    nlohmann::json j{{"format", "ztids-pipeline"},
                     {"version", Pipeline::kVersion},
                     {"input_columns", p.input_columns},
                     {"preprocess", autodp::to_json(p.preprocess)},
                     {"model", nlohmann::json::parse(models::serialize(p.model))}};
    return j.dump();
}

Pipeline deserialize_pipeline(std::string_view bytes) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::CorruptModel, std::string("unparsable pipeline: ") + e.what());
    }
    require(j.is_object() && j.value("format", "") == "ztids-pipeline", ErrorCode::CorruptModel,
            "not a pipeline file");
    require(j.value("version", -1) == Pipeline::kVersion, ErrorCode::VersionMismatch,
            "pipeline version " + j.value("version", nlohmann::json()).dump() + " is not supported");
    Pipeline p;
    try {
        p.input_columns = j.at("input_columns").get<std::vector<std::string>>();
        p.preprocess = autodp::report_from_json(j.at("preprocess"));
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::CorruptModel, std::string("malformed pipeline: ") + e.what());
    }
    p.model = models::deserialize(j.at("model").dump());
    require(p.model.n_features_expected == p.input_columns.size(), ErrorCode::CorruptModel,
            "model width does not match the pipeline columns");
    return p;
}

namespace {

autofe::FeatureSelection identity_selection(std::size_t m) {
    autofe::FeatureSelection s;
    for (std::size_t c = 0; c < m; ++c) s.kept_indices.push_back(c);
    s.rfe_ranking.assign(m, 1);
    s.n_selected = m;
    return s;
}

}  // namespace

OfflineResult run_automl_offline(const Dataset& ds, const OfflineConfig& cfg) {
    ds.validate();
    OfflineResult out;
    auto dp = cfg.autodp;
    dp.adasyn.seed = mix_seed(cfg.seed, 1);

    const double total = timed([&] {
        if (cfg.feature_selection && ds.cols() > 1) {
            const auto prepared = autodp::fit_preprocess(ds, dp);
            const auto outer = autofe::pearson_filter(prepared.train, cfg.pearson_threshold);
            const auto filtered = prepared.train.project(outer.kept_indices);
            auto fe = cfg.autofe;
            fe.rfe.seed = mix_seed(cfg.seed, 2);
            fe.pso.seed = mix_seed(cfg.seed, 3);
            out.feature_search =
                autofe::optimize_feature_count(filtered, stratified_kfold(filtered, cfg.k_folds, cfg.seed), fe);
            out.selection = autofe::compose(outer, out.feature_search.selection);
        } else {
            out.selection = identity_selection(ds.cols());
        }

        const Dataset work = ds.project(out.selection.kept_indices);
        const auto folds = prepare_folds(work, stratified_kfold(work, cfg.k_folds, cfg.seed), dp);
        out.ranking = cash_select(folds, cfg.kinds, cfg.top_k);

        std::mutex cache_mutex;
        std::map<std::string, CvOutcome> outcomes;
        auto evaluate = [&](const CandidateConfig& c) {
            const auto key = models::to_string(c.kind) + "|" + canonical_key(c.params);
            {
                std::lock_guard lock(cache_mutex);
                if (const auto it = outcomes.find(key); it != outcomes.end()) return it->second;
            }
            auto outcome = cv_evaluate(c, folds);
            std::lock_guard lock(cache_mutex);
            return outcomes.emplace(key, std::move(outcome)).first->second;
        };

        for (const auto& entry : out.ranking) {
            if (!entry.selected_for_hpo) continue;
            const auto defaults = models::default_config(entry.kind);
            auto pso = cfg.pso;
            pso.seed = mix_seed(cfg.seed, 10 + static_cast<std::uint64_t>(entry.kind));
            pso.warm_start = defaults.params;
            TunedKind tuned{entry.kind, entry.objective, {}};
            tuned.search = pso_minimize(
                [&, kind = entry.kind](const ParamMap& p) { return evaluate({kind, p}).objective; },
                models::search_space(entry.kind), pso);
            out.tuned.push_back(std::move(tuned));
        }

        // Ranking order breaks ties between the tuned kinds.
        const TunedKind* best = nullptr;
        for (const auto& t : out.tuned)
            if (!best || t.search.best_value < best->search.best_value) best = &t;
        require(best != nullptr, ErrorCode::InvalidArgument, "top_k must be at least 1");
        out.winner = {best->kind, best->search.best_config};
        out.winner_objective = best->search.best_value;
        out.winner_cv = evaluate(out.winner);

        const auto fitted = autodp::fit_preprocess(work, dp);
        out.pipeline.preprocess = fitted.report;
        out.pipeline.input_columns = work.feature_names;
        out.pipeline.model = models::fit(out.winner, fitted.train, mix_seed(cfg.seed, 4));
        out.final_fit_seconds = out.pipeline.model.fit_seconds;

        if (cfg.measure_full_feature_fit) {
            if (out.selection.n_selected == ds.cols()) {
                out.full_feature_fit_seconds = out.final_fit_seconds;
            } else {
                const auto all = autodp::fit_preprocess(ds, dp);
                out.full_feature_fit_seconds = models::fit(out.winner, all.train, mix_seed(cfg.seed, 4)).fit_seconds;
            }
        }
    });
    out.total_seconds = total;
    return out;
}

nlohmann::json to_json(const OfflineResult& r, bool include_timing) {
    const auto scores = [&](const Scores& s) {
        auto j = ztids::to_json(s);
        if (!include_timing) j.erase("seconds");
        return j;
    };
    nlohmann::json cash = nlohmann::json::array();
    for (const auto& e : r.ranking) {
        nlohmann::json j{{"kind", models::to_string(e.kind)},
                         {"objective", e.objective},
                         {"fold_f1", e.fold_scores},
                         {"selected_for_hpo", e.selected_for_hpo}};
        if (include_timing) j["seconds"] = e.seconds;
        cash.push_back(std::move(j));
    }
    nlohmann::json hpo = nlohmann::json::array();
    for (const auto& t : r.tuned)
        hpo.push_back({{"kind", models::to_string(t.kind)},
                       {"default_objective", t.default_objective},
                       {"best_objective", t.search.best_value},
                       {"best_config", ztids::to_json(t.search.best_config)},
                       {"trace", to_json(t.search.trace, include_timing)}});
    nlohmann::json folds = nlohmann::json::array();
    for (const auto& s : r.winner_cv.folds) folds.push_back(scores(s));

    nlohmann::json j{{"preprocess", autodp::to_json(r.pipeline.preprocess)},
                     {"feature_selection", autofe::to_json(r.selection)},
                     {"selected_columns", r.pipeline.input_columns},
                     {"feature_count_search", to_json(r.feature_search.trace, include_timing)},
                     {"model_selection", cash},
                     {"hpo", hpo},
                     {"winner",
                      {{"kind", models::to_string(r.winner.kind)},
                       {"config", ztids::to_json(r.winner.params)},
                       {"objective", r.winner_objective}}},
                     {"cv_metrics", scores(r.winner_cv.mean)},
                     {"cv_folds", folds}};
    if (include_timing)
        j["timing"] = {{"final_fit_seconds", r.final_fit_seconds},
                       {"full_feature_fit_seconds", r.full_feature_fit_seconds},
                       {"total_seconds", r.total_seconds}};
    return j;
}

}  // namespace ztids::optimize
