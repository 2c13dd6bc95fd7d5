#include "doctest.h"

#include <nlohmann/json.hpp>

#include "support.hpp"
#include "ztids/automl.hpp"
#include "ztids/error.hpp"
#include "ztids/parallel.hpp"
#include "ztids/seed.hpp"

using namespace ztids;
using namespace ztids::optimize;
using models::CandidateConfig;
using models::ModelKind;

namespace {

Dataset points(std::vector<double> xs, std::vector<int> ys) {
    Matrix m(xs.size(), 1);
    for (std::size_t i = 0; i < xs.size(); ++i) m(i, 0) = xs[i];
    return Dataset::from_matrix(std::move(m), std::move(ys));
}

CandidateConfig knn1() { return {ModelKind::KNN, {{"n_neighbors", std::int64_t{1}}}}; }

OfflineConfig quick_config(std::uint64_t seed) {
    OfflineConfig c;
    c.seed = seed;
    c.k_folds = 3;
    c.pso.swarm = 3;
    c.pso.iters = 2;
    c.autofe.pso.swarm = 3;
    c.autofe.pso.iters = 2;
    c.autofe.rfe.n_trees = 10;
    return c;
}

}  // namespace

TEST_CASE("separable data gives a zero objective") {
    const auto ds = testing::axis_separable(200, 2, 3);
    const auto plan = stratified_kfold(ds, 5, 1);
    for (auto k : {ModelKind::KNN, ModelKind::RF, ModelKind::GBDT})
        CHECK(cv_objective(models::default_config(k), ds, plan) == 0.0);
}

TEST_CASE("all-benign predictions on attack folds give one") {
    PreparedFolds f;
    f.folds.push_back({points({0, 1, 2}, {0, 0, 0}), points({5, 6}, {1, 1})});
    f.folds.push_back({points({0, 1, 2}, {0, 0, 0}), points({7}, {1})});
    CHECK(cv_evaluate(knn1(), f).objective.value == 1.0);
}

TEST_CASE("objective averages fold F1") {
    PreparedFolds f;
    f.folds.push_back({points({0, 10}, {0, 1}), points({0, 10}, {0, 1})});
    f.folds.push_back({points({0, 10}, {0, 1}), points({10, 9, 1}, {1, 0, 1})});
    const auto out = cv_evaluate(knn1(), f);
    CHECK(out.objective.fold_scores == std::vector<double>{1.0, 0.5});
    CHECK(out.objective.value == doctest::Approx(0.25));
    CHECK(out.mean.f1 == doctest::Approx(0.75));
    CHECK(out.mean.confusion.total() == 5);
}

TEST_CASE("model selection ranks, ties and preconditions") {
    const auto ds = testing::axis_separable(150, 1, 4);
    const auto folds = prepare_folds(ds, stratified_kfold(ds, 3, 2), {});
    const auto r = cash_select(folds, {ModelKind::RF, ModelKind::KNN, ModelKind::GBDT});
    REQUIRE(r.size() == 3);
    CHECK(r[0].objective == 0.0);
    CHECK(r[1].objective == 0.0);
    CHECK(r[0].kind == ModelKind::KNN);
    CHECK(r[1].kind == ModelKind::RF);
    CHECK(r[0].selected_for_hpo);
    CHECK(r[1].selected_for_hpo);
    CHECK_FALSE(r[2].selected_for_hpo);
    CHECK_THROWS_AS(cash_select(folds, {ModelKind::RF}), Error);
}

TEST_CASE("per-fold preprocessing never sees test rows") {
    auto ds = testing::blobs(120, 3, 1.0, 6);
    for (std::size_t i = 0; i < 120; i += 7) ds.features(i, 1) = kMissing;
    const auto plan = stratified_kfold(ds, 4, 3);
    const auto folds = prepare_folds(ds, plan, {});
    for (std::size_t f = 0; f < 4; ++f) {
        const auto fitted = autodp::fit_preprocess(ds.subset(plan.folds[f].train), [&] {
            autodp::AutoDpOptions o;
            o.adasyn.seed = mix_seed(0, f);
            return o;
        }());
        CHECK(folds.folds[f].test.features ==
              autodp::apply_preprocess(fitted.report, ds.subset(plan.folds[f].test)).features);
        CHECK(folds.folds[f].test.rows() == plan.folds[f].test.size());
    }
}

TEST_CASE("offline pipeline on a separable toy set") {
    auto ds = testing::axis_separable(240, 3, 11);
    const auto cfg = quick_config(7);
    const auto r = run_automl_offline(ds, cfg);
    CHECK(r.winner_cv.mean.f1 == 1.0);
    CHECK(r.winner_objective == 0.0);
    CHECK(r.total_seconds < 60.0);
    REQUIRE(r.tuned.size() == 2);
    for (const auto& t : r.tuned) CHECK(r.winner_objective <= t.default_objective);
    CHECK(models::search_space(r.winner.kind).contains(r.winner.params));
    const auto raw_pred = models::predict(r.pipeline.model, r.pipeline.transform(ds).features);
    CHECK(score(ds.labels, raw_pred).f1 == 1.0);
}

TEST_CASE("offline pipeline is deterministic across thread counts") {
    const auto ds = testing::blobs(200, 6, 1.2, 19, 0.3);
    const auto cfg = quick_config(5);
    set_num_threads(1);
    const auto a = run_automl_offline(ds, cfg);
    set_num_threads(4);
    const auto b = run_automl_offline(ds, cfg);
    set_num_threads(0);
    CHECK(serialize(a.pipeline) == serialize(b.pipeline));
    CHECK(to_json(a, false) == to_json(b, false));
    for (const auto& t : a.tuned) CHECK(a.winner_objective <= t.default_objective);
    for (const auto& t : a.tuned) {
        const auto& best = t.search.trace.best_so_far;
        for (std::size_t i = 1; i < best.size(); ++i) CHECK(best[i] <= best[i - 1]);
    }
}

TEST_CASE("pipeline files round-trip") {
    const auto ds = testing::blobs(150, 4, 2.0, 23);
    const auto r = run_automl_offline(ds, quick_config(1));
    const auto bytes = serialize(r.pipeline);
    const auto back = deserialize_pipeline(bytes);
    CHECK(serialize(back) == bytes);
    CHECK(models::predict_proba(back.model, back.transform(ds).features) ==
          models::predict_proba(r.pipeline.model, r.pipeline.transform(ds).features));
    auto j = nlohmann::json::parse(bytes);
    j["version"] = 99;
    try {
        deserialize_pipeline(j.dump());
        FAIL("expected VersionMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::VersionMismatch);
    }
    CHECK_THROWS_AS(deserialize_pipeline("{\"format\":"), Error);
    auto narrow = ds;
    narrow.feature_names[r.pipeline.input_columns.empty() ? 0 : 0] = "renamed";
    if (std::find(r.pipeline.input_columns.begin(), r.pipeline.input_columns.end(), "f0") !=
        r.pipeline.input_columns.end())
        CHECK_THROWS_AS(r.pipeline.transform(narrow), Error);
}
