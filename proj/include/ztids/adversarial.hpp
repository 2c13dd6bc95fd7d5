#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ztids/autodp.hpp"
#include "ztids/dataset.hpp"
#include "ztids/metrics.hpp"
#include "ztids/models.hpp"
#include "ztids/params.hpp"

namespace ztids::adversarial {

enum class AttackKind { FGSM, BIM, DTA };

std::string to_string(AttackKind k);
AttackKind attack_from_string(std::string_view s);

// Per-feature [lo, hi] bounds. An empty box leaves rows unclipped.
struct FeatureBox {
    std::vector<double> lo, hi;

    static FeatureBox of(const Matrix& rows);
    bool empty() const noexcept { return lo.empty(); }
    double clip(std::size_t feature, double v) const noexcept;
};

struct AdversarialBatch {
    AttackKind attack = AttackKind::FGSM;
    ParamMap params;
    Matrix origin;
    Matrix adv;
    std::vector<int> labels;             // true labels of the source rows
    std::vector<std::uint8_t> flipped;   // prediction of the attacked model changed
    std::vector<std::uint8_t> is_adversarial;

    std::size_t rows() const noexcept { return labels.size(); }
    std::size_t flipped_count() const noexcept;
};

AdversarialBatch fgsm(const models::TrainedModel& surrogate, const Matrix& rows, std::span<const int> labels,
                      double eps, const FeatureBox& box = {});

AdversarialBatch bim(const models::TrainedModel& surrogate, const Matrix& rows, std::span<const int> labels,
                     double eps, double alpha, std::size_t iters, const FeatureBox& box = {});

// Leaf-path search over the victim's trees. Each move puts a feature `offset`
// past a threshold; candidate leaves whose moves leave the box are skipped.
AdversarialBatch dta(const models::TrainedModel& victim, const Matrix& rows, std::span<const int> labels,
                     double offset, const FeatureBox& box = {});

// Clean rows labelled 0 and adversarial rows labelled 1.
Dataset detection_dataset(const Matrix& clean, const AdversarialBatch& batch);

models::TrainedModel fit_detector(const Matrix& clean, const AdversarialBatch& batch,
                                  const models::CandidateConfig& config, std::uint64_t seed);

// Rows the detector labels adversarial are dropped; survivors keep their order.
Dataset filter_adversarial(const models::TrainedModel& detector, const Dataset& mixed);

struct AttackParams {
    double eps = 0.1;
    double alpha = 0.02;
    std::size_t iters = 10;
    double offset = 0.001;
};

// GBDT at the values tuned on CICIDS2017.
models::CandidateConfig tuned_ids_config();

struct ExerciseConfig {
    AttackKind attack = AttackKind::DTA;
    AttackParams params;
    std::uint64_t seed = 0;
    double test_fraction = 0.2;
    // Share of the training split used as attack sources.
    double adversarial_fraction = 0.25;
    double detector_holdout = 0.2;
    models::CandidateConfig ids = tuned_ids_config();
    models::CandidateConfig surrogate = models::default_config(models::ModelKind::MLP);
    autodp::AutoDpOptions autodp;
};

struct ExerciseCounts {
    std::size_t train_rows = 0;
    std::size_t test_rows = 0;
    std::size_t injected = 0;
    std::size_t flipped = 0;          // adversarial rows whose attacked-model prediction changed
    std::size_t detected = 0;         // mixed training rows the detector flagged
    std::size_t true_detections = 0;  // flagged rows that were adversarial
    std::size_t false_positives = 0;
    std::size_t filtered = 0;
};

struct ExerciseReport {
    AttackKind attack = AttackKind::DTA;
    AttackParams params;
    std::uint64_t seed = 0;
    Scores baseline;            // IDS on the clean test split
    Scores under_attack;        // IDS on the adversarial rows alone
    Scores under_attack_mixed;  // IDS on the clean test split plus the adversarial rows
    Scores detector;            // detector on its held-out split
    Scores recovered;           // retrained IDS on the clean test split
    ExerciseCounts counts;
};

ExerciseReport run_defense_exercise(const Dataset& raw, const ExerciseConfig& cfg);

nlohmann::json to_json(const ExerciseReport& r, bool include_timing = true);

}  // namespace ztids::adversarial
