#include "doctest.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "support.hpp"
#include "ztids/autofe.hpp"
#include "ztids/error.hpp"

using namespace ztids;
using namespace ztids::autofe;

namespace {

Dataset gaussian_columns(std::size_t n, std::size_t m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0, 1);
    Matrix x(n, m);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < m; ++c) x(i, c) = g(rng);
        y[i] = static_cast<int>(i % 2);
    }
    return Dataset::from_matrix(std::move(x), std::move(y));
}

// label = [x0 > 0]; the other columns are noise.
Dataset one_signal(std::size_t n, std::size_t noise, std::uint64_t seed) {
    auto ds = gaussian_columns(n, noise + 1, seed);
    for (std::size_t i = 0; i < n; ++i) ds.labels[i] = ds.features(i, 0) > 0 ? 1 : 0;
    return ds;
}

}  // namespace

TEST_CASE("exact linear dependence is dropped") {
    auto ds = gaussian_columns(100, 2, 1);
    for (std::size_t i = 0; i < 100; ++i) ds.features(i, 1) = 2 * ds.features(i, 0);
    const auto s = pearson_filter(ds, 0.9);
    CHECK(s.kept_indices == std::vector<std::size_t>{0});
    REQUIRE(s.dropped_redundant.size() == 1);
    CHECK(s.dropped_redundant[0].dropped == 1);
    CHECK(s.dropped_redundant[0].kept_partner == 0);
    CHECK(s.dropped_redundant[0].abs_r == doctest::Approx(1.0));
}

TEST_CASE("independent columns all survive") {
    const auto ds = gaussian_columns(1000, 10, 2);
    double worst = 0;
    for (std::size_t a = 0; a < 10; ++a)
        for (std::size_t b = a + 1; b < 10; ++b) {
            std::vector<double> ca, cb;
            for (std::size_t i = 0; i < 1000; ++i) {
                ca.push_back(ds.features(i, a));
                cb.push_back(ds.features(i, b));
            }
            worst = std::max(worst, std::abs(pearson(ca, cb)));
        }
    CHECK(worst < 0.9);
    CHECK(pearson_filter(ds, 0.9).kept_indices.size() == 10);
}

TEST_CASE("threshold one without duplicates keeps everything") {
    const auto ds = gaussian_columns(200, 6, 3);
    const auto s = pearson_filter(ds, 1.0);
    CHECK(s.kept_indices == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});
}

TEST_CASE("constant columns correlate with nothing") {
    auto ds = gaussian_columns(50, 3, 4);
    for (std::size_t i = 0; i < 50; ++i) {
        ds.features(i, 0) = 5.0;
        ds.features(i, 2) = 5.0;
    }
    CHECK(pearson_filter(ds, 0.5).kept_indices.size() == 3);
}

TEST_CASE("pearson filter is idempotent") {
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 10; ++trial) {
        auto ds = gaussian_columns(200, 8, rng());
        for (std::size_t i = 0; i < 200; ++i) {
            ds.features(i, 3) = ds.features(i, 1) * 0.95 + ds.features(i, 3) * 0.1;
            ds.features(i, 6) = -ds.features(i, 2) + 0.05 * ds.features(i, 6);
        }
        const auto first = pearson_filter(ds, 0.9);
        const auto second = pearson_filter(ds.project(first.kept_indices), 0.9);
        CHECK(second.dropped_redundant.empty());
    }
}

TEST_CASE("rfe examples") {
    const auto ds = one_signal(400, 9, 5);
    const auto all = rfe(ds, 10);
    CHECK(all.kept_indices.size() == 10);
    CHECK(all.ranking_fits == 1);
    const auto one = rfe(ds, 1);
    CHECK(one.kept_indices == std::vector<std::size_t>{0});
    CHECK(one.n_selected == 1);
    try {
        rfe(ds, 0);
        FAIL("expected InvalidTargetCount");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidTargetCount);
    }
    CHECK_THROWS_AS(rfe(ds, 11), Error);
}

TEST_CASE("rfe ranking is a consistent total order") {
    const auto ds = one_signal(300, 11, 6);
    for (std::size_t step : {1u, 3u}) {
        RfeOptions o;
        o.step = step;
        o.n_trees = 20;
        const auto s = rfe(ds, 2, o);
        s.validate(12);
        std::set<std::size_t> kept(s.kept_indices.begin(), s.kept_indices.end());
        for (std::size_t c = 0; c < 12; ++c) CHECK((s.rfe_ranking[c] == 1) == (kept.count(c) == 1));
        // ranks form 1..R with each removal batch of size <= step sharing a rank
        std::map<std::size_t, std::size_t> per_rank;
        for (auto r : s.rfe_ranking) ++per_rank[r];
        std::size_t expect = 1;
        for (const auto& [rank, count] : per_rank) {
            CHECK(rank == expect++);
            CHECK(count <= (rank == 1 ? 2 : step));
        }
        if (step == 1) CHECK(per_rank.size() == 11);
    }
    CHECK(default_step(64) == 1);
    CHECK(default_step(65) == 2);
    CHECK(default_step(200) == 4);
}

TEST_CASE("training on kept columns equals training on the reduced dataset") {
    const auto ds = one_signal(200, 5, 7);
    const auto s = rfe(ds, 3);
    const auto reduced = ds.project(s.kept_indices);
    const auto plan = stratified_kfold(ds, 3, 1);
    const auto cfg = models::default_config(models::ModelKind::RF);
    const auto a = cv_on_columns(ds, plan, s.kept_indices, cfg, 4);
    std::vector<std::size_t> identity(reduced.cols());
    std::iota(identity.begin(), identity.end(), 0);
    const auto b = cv_on_columns(reduced, plan, identity, cfg, 4);
    CHECK(a.value == b.value);
    CHECK(a.fold_scores == b.fold_scores);
    const auto ma = models::fit(cfg, reduced, 2);
    const auto mb = models::fit(cfg, ds.project(s.kept_indices), 2);
    CHECK(models::serialize(ma) == models::serialize(mb));
}

TEST_CASE("feature-count search prefers the informative column") {
    const auto ds = one_signal(300, 20, 8);
    const auto plan = stratified_kfold(ds, 3, 2);
    FeatureCountOptions o;
    o.pso.seed = 3;
    const auto r = optimize_feature_count(ds, plan, o);
    CHECK(r.selection.n_selected == r.selection.kept_indices.size());
    CHECK(r.selection.n_selected >= 3);  // ceil(0.1 * 21)

    // brute force every admissible count with the same elimination path
    const auto order = elimination_order(ds, o.rfe);
    double best = 1.0, at_full = 1.0;
    for (std::size_t n = 3; n <= 21; ++n) {
        std::vector<std::size_t> cols(order.end() - static_cast<std::ptrdiff_t>(n), order.end());
        std::sort(cols.begin(), cols.end());
        const double v = cv_on_columns(ds, plan, cols, o.eval_model, o.rfe.seed).value;
        best = std::min(best, v);
        if (n == 21) at_full = v;
    }
    CHECK(r.best_objective <= at_full);
    CHECK(r.best_objective >= best);
    CHECK(r.selection.n_selected < 21);

    const auto again = optimize_feature_count(ds, plan, o);
    CHECK(again.selection.n_selected == r.selection.n_selected);
    CHECK(again.selection.kept_indices == r.selection.kept_indices);
}

TEST_CASE("a single column is returned as is") {
    const auto ds = one_signal(60, 0, 9);
    const auto r = optimize_feature_count(ds, stratified_kfold(ds, 3, 0), {});
    CHECK(r.selection.kept_indices == std::vector<std::size_t>{0});
}

TEST_CASE("compose maps inner indices back to the original columns") {
    FeatureSelection outer;
    outer.kept_indices = {0, 2, 5};
    outer.dropped_redundant = {{1, 0, 0.95}};
    outer.rfe_ranking = {1, 0, 1, 1, 1, 1};
    outer.n_selected = 3;
    FeatureSelection inner;
    inner.kept_indices = {1, 2};
    inner.rfe_ranking = {2, 1, 1};
    inner.n_selected = 2;
    const auto c = compose(outer, inner);
    CHECK(c.kept_indices == std::vector<std::size_t>{2, 5});
    CHECK(c.dropped_redundant.size() == 1);
    CHECK(c.rfe_ranking[0] == 2);
    CHECK(c.rfe_ranking[1] == 0);
}
