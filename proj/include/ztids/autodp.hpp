#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ztids/dataset.hpp"

namespace ztids::autodp {

// Label encoder for one categorical column. Codes follow first appearance in
// the fitting rows; any value not seen at fit time maps to values.size().
struct ColumnEncoder {
    std::size_t column = 0;
    std::vector<std::string> values;

    int code(const std::string& value) const;
    int unknown_code() const noexcept { return static_cast<int>(values.size()); }
};

using Encoders = std::vector<ColumnEncoder>;

enum class NormChoice { ZScore, MinMax };

std::string to_string(NormChoice c);
NormChoice norm_choice_from_string(const std::string& s);

struct BalanceStats {
    std::size_t n_majority = 0;
    std::size_t n_minority = 0;
    std::size_t n_synthesized = 0;
    int minority_label = 1;
};

struct PreprocessReport {
    static constexpr int kVersion = 1;

    Encoders encoders;
    std::vector<double> medians;  // one per column, over non-missing training values
    NormChoice norm_choice = NormChoice::MinMax;
    // (mean, stddev) for z-score or (min, max) for min-max, one pair per column.
    std::vector<std::pair<double, double>> norm_params;
    BalanceStats balance_stats;
    std::size_t fitted_on_rows = 0;
    // Per-column [min, max] of the normalized training rows; the feature box
    // that adversarial rows are clipped to.
    std::vector<std::pair<double, double>> feature_box;
};

nlohmann::json to_json(const PreprocessReport& r);
PreprocessReport report_from_json(const nlohmann::json& j);

Encoders fit_encoding(const Dataset& ds);
Dataset apply_encoding(const Dataset& ds, const Encoders& enc);

std::vector<double> fit_imputer(const Dataset& ds);
Dataset apply_imputer(const Dataset& ds, const std::vector<double>& medians);

// Fraction of a column's values outside the Tukey fences [Q1-1.5 IQR, Q3+1.5 IQR].
double tukey_outlier_fraction(std::vector<double> column);

NormChoice select_normalization(const Dataset& ds, double outlier_fraction_threshold = 0.01);
std::vector<std::pair<double, double>> fit_normalization(const Dataset& ds, NormChoice choice);

Dataset normalize(const Dataset& ds, const PreprocessReport& report);
Dataset denormalize(const Dataset& ds, const PreprocessReport& report);

struct AdasynOptions {
    std::size_t k_neighbors = 5;
    double beta = 1.0;
    std::uint64_t seed = 0;
};

struct BalanceResult {
    Dataset data;  // input rows first, synthetic rows appended
    BalanceStats stats;
    bool already_balanced = false;
};

BalanceResult balance_adasyn(const Dataset& ds, const AdasynOptions& opts);

struct AutoDpOptions {
    double outlier_threshold = 0.01;
    bool balance = true;
    AdasynOptions adasyn;
};

struct FittedPreprocess {
    PreprocessReport report;
    Dataset train;  // encoded, imputed, normalized and (optionally) balanced
};

// encode -> impute -> normalize -> balance, all statistics from `train`.
FittedPreprocess fit_preprocess(const Dataset& train, const AutoDpOptions& opts);

// encode -> impute -> normalize with frozen statistics; never balances.
Dataset apply_preprocess(const PreprocessReport& report, const Dataset& ds);

}  // namespace ztids::autodp
