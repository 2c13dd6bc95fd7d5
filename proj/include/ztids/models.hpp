#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ztids/dataset.hpp"
#include "ztids/params.hpp"
#include "ztids/tree.hpp"

namespace ztids::models {

enum class ModelKind { KNN, MLP, RF, GBDT };

inline constexpr ModelKind kAllKinds[] = {ModelKind::KNN, ModelKind::MLP, ModelKind::RF, ModelKind::GBDT};

std::string to_string(ModelKind k);
ModelKind kind_from_string(std::string_view s);

struct CandidateConfig {
    ModelKind kind = ModelKind::RF;
    ParamMap params;
};

CandidateConfig default_config(ModelKind kind);
// RF and GBDT spaces follow the tuned ranges used for the IDS; KNN and MLP
// spaces are declared here so every kind can be searched.
HyperparameterSpace search_space(ModelKind kind);

struct FitOptions {
    // When false only structural validity is checked (e.g. n_estimators >= 0),
    // which lets tests build stumps and empty ensembles.
    bool enforce_search_space = true;
};

// Throws BadHyperparameter for missing, mistyped or out-of-range values.
void validate_config(const CandidateConfig& cfg, const FitOptions& opts = {});

struct KnnParams {
    Matrix x;
    std::vector<int> y;
    std::size_t k = 5;
};

struct DenseLayer {
    std::size_t in = 0, out = 0;
    std::vector<double> w;  // out x in, row-major
    std::vector<double> b;  // out
};

// Fully connected ReLU network with a single sigmoid output unit.
struct MlpParams {
    std::vector<DenseLayer> layers;
};

struct ForestParams {
    std::vector<Tree> trees;  // leaf value = P(attack) of the leaf
};

struct BoostParams {
    double base_score = 0.0;  // prior log-odds
    double learning_rate = 0.1;
    std::vector<Tree> trees;  // raw (unscaled) leaf values
};

using ModelParams = std::variant<KnnParams, MlpParams, ForestParams, BoostParams>;

struct TrainedModel {
    ModelKind kind = ModelKind::RF;
    CandidateConfig config;
    ModelParams params;
    std::size_t n_features_expected = 0;
    double fit_seconds = 0.0;  // wall time of fit; not serialized
    std::vector<double> feature_importance;  // RF impurity importance, empty otherwise

    bool is_tree_based() const noexcept { return kind == ModelKind::RF || kind == ModelKind::GBDT; }
};

TrainedModel fit(const CandidateConfig& cfg, const Dataset& train, std::uint64_t seed, const FitOptions& opts = {});

double predict_proba_row(const TrainedModel& m, std::span<const double> x);
std::vector<double> predict_proba(const TrainedModel& m, const Matrix& rows);
std::vector<int> predict(const TrainedModel& m, const Matrix& rows);
inline int label_of(double proba) noexcept { return proba >= 0.5 ? 1 : 0; }

// Raw pre-sigmoid score of a boosted model using only its first `n_trees` trees.
double boosted_score(const BoostParams& p, std::span<const double> x, std::size_t n_trees);

// Gradient of binary cross-entropy w.r.t. the input row. MLP only.
std::vector<double> input_gradient(const TrainedModel& m, std::span<const double> x, int y);

// Versioned JSON. fit_seconds is omitted so identical fits give identical bytes.
std::string serialize(const TrainedModel& m);
TrainedModel deserialize(std::string_view bytes);

inline constexpr int kModelFormatVersion = 1;

}  // namespace ztids::models
