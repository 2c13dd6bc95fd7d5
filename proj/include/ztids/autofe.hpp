#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ztids/dataset.hpp"
#include "ztids/models.hpp"
#include "ztids/search.hpp"

namespace ztids::autofe {

struct RedundantDrop {
    std::size_t dropped = 0;
    std::size_t kept_partner = 0;
    double abs_r = 0.0;
};

struct FeatureSelection {
    std::vector<std::size_t> kept_indices;  // ascending column indices of the input dataset
    std::vector<RedundantDrop> dropped_redundant;
    // One entry per input column: 1 for kept columns, larger for columns
    // eliminated earlier, 0 for columns removed by the correlation filter.
    std::vector<std::size_t> rfe_ranking;
    std::size_t n_selected = 0;
    std::size_t ranking_fits = 0;

    void validate(std::size_t n_columns) const;
};

nlohmann::json to_json(const FeatureSelection& s);

double pearson(std::span<const double> a, std::span<const double> b);

// Drops the later column of every pair with |r| >= threshold, comparing each
// column only against columns already kept.
FeatureSelection pearson_filter(const Dataset& ds, double threshold = 0.9);

struct RfeOptions {
    std::size_t step = 0;  // 0 = 1 for M <= 64, else ceil(M/64)
    std::size_t n_trees = 50;
    std::size_t max_depth = 12;
    std::uint64_t seed = 0;
};

std::size_t default_step(std::size_t n_features) noexcept;

FeatureSelection rfe(const Dataset& ds, std::size_t n_select, const RfeOptions& opts = {});

// Column indices ordered from first eliminated to last survivor, from one
// elimination run down to a single feature. The last n entries are the RFE
// selection of size n.
std::vector<std::size_t> elimination_order(const Dataset& ds, const RfeOptions& opts, std::size_t* fits = nullptr);

inline optimize::PsoOptions small_pso() {
    optimize::PsoOptions p;
    p.swarm = 6;
    p.iters = 5;
    return p;
}

struct FeatureCountOptions {
    RfeOptions rfe;
    optimize::PsoOptions pso = small_pso();
    models::CandidateConfig eval_model{models::ModelKind::RF,
                                       {{"n_estimators", std::int64_t{20}},
                                        {"max_depth", std::int64_t{50}},
                                        {"min_samples_split", std::int64_t{2}},
                                        {"min_samples_leaf", std::int64_t{1}},
                                        {"criterion", std::string("gini")}}};
};

struct FeatureCountResult {
    FeatureSelection selection;
    optimize::SearchTrace trace;
    double best_objective = 0.0;
};

// PSO over n_select in [ceil(0.1 M), M] minimizing 1 - mean CV F1 of the
// evaluation model on the top-n RFE features.
FeatureCountResult optimize_feature_count(const Dataset& ds, const FoldPlan& plan, const FeatureCountOptions& opts);

// CV objective (1 - mean F1) of a config on a subset of columns; folds are
// used as-is (no per-fold preprocessing).
optimize::ObjectiveResult cv_on_columns(const Dataset& ds, const FoldPlan& plan, std::span<const std::size_t> columns,
                                        const models::CandidateConfig& cfg, std::uint64_t seed);

}  // namespace ztids::autofe

namespace ztids::autofe {

// Maps a selection made on `outer.kept_indices` columns back to the original
// column space, keeping outer's redundancy records.
FeatureSelection compose(const FeatureSelection& outer, const FeatureSelection& inner);

}  // namespace ztids::autofe
