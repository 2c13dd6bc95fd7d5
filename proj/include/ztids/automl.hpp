#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ztids/autodp.hpp"
#include "ztids/autofe.hpp"
#include "ztids/dataset.hpp"
#include "ztids/metrics.hpp"
#include "ztids/models.hpp"
#include "ztids/search.hpp"

namespace ztids::optimize {

// Train/test pair of one fold after AutoDP was fitted on the fold's train split.
struct PreparedFold {
    Dataset train;
    Dataset test;
};

struct PreparedFolds {
    std::vector<PreparedFold> folds;
    std::uint64_t seed = 0;
};

PreparedFolds prepare_folds(const Dataset& ds, const FoldPlan& plan, const autodp::AutoDpOptions& dp);

struct CvOutcome {
    ObjectiveResult objective;  // 1 - mean F1 with per-fold F1
    std::vector<Scores> folds;
    Scores mean;  // per-fold means; confusion summed
};

CvOutcome cv_evaluate(const models::CandidateConfig& cfg, const PreparedFolds& folds,
                      const models::FitOptions& fit_opts = {});

// 1 - mean test-fold F1 with AutoDP refitted on every training split.
double cv_objective(const models::CandidateConfig& cfg, const Dataset& ds, const FoldPlan& plan,
                    const autodp::AutoDpOptions& dp = {});

struct CashEntry {
    models::ModelKind kind = models::ModelKind::RF;
    double objective = 0.0;
    std::vector<double> fold_scores;
    double seconds = 0.0;
    bool selected_for_hpo = false;
};

// Every kind at its default config, ranked ascending by objective; ties follow
// the order KNN, MLP, RF, GBDT. The first `top` entries are flagged.
std::vector<CashEntry> cash_select(const PreparedFolds& folds, const std::vector<models::ModelKind>& kinds,
                                   std::size_t top = 2);

struct OfflineConfig {
    std::size_t k_folds = 5;
    std::uint64_t seed = 0;
    autodp::AutoDpOptions autodp;
    bool feature_selection = true;
    double pearson_threshold = 0.9;
    autofe::FeatureCountOptions autofe;
    std::vector<models::ModelKind> kinds{std::begin(models::kAllKinds), std::end(models::kAllKinds)};
    std::size_t top_k = 2;
    PsoOptions pso;
    // Also refit the winner on every feature, for the fit-time comparison.
    bool measure_full_feature_fit = true;
};

struct TunedKind {
    models::ModelKind kind = models::ModelKind::RF;
    double default_objective = 0.0;
    SearchResult search;
};

// Frozen preprocessing, column selection and model; applies to raw rows.
struct Pipeline {
    static constexpr int kVersion = 1;

    autodp::PreprocessReport preprocess;
    std::vector<std::string> input_columns;  // raw columns the pipeline consumes, in order
    models::TrainedModel model;

    // Selects input_columns by name from a raw dataset, then applies AutoDP.
    Dataset transform(const Dataset& raw) const;
};

std::string serialize(const Pipeline& p);
Pipeline deserialize_pipeline(std::string_view bytes);

struct OfflineResult {
    Pipeline pipeline;
    autofe::FeatureSelection selection;  // indices into the input dataset's columns
    std::vector<CashEntry> ranking;
    std::vector<TunedKind> tuned;
    models::CandidateConfig winner;
    double winner_objective = 0.0;
    CvOutcome winner_cv;
    autofe::FeatureCountResult feature_search;
    double final_fit_seconds = 0.0;
    double full_feature_fit_seconds = 0.0;  // 0 when not measured
    double total_seconds = 0.0;
};

OfflineResult run_automl_offline(const Dataset& ds, const OfflineConfig& cfg);

nlohmann::json to_json(const OfflineResult& r, bool include_timing = true);

}  // namespace ztids::optimize
