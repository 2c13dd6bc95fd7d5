#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ztids/autodp.hpp"
#include "ztids/autofe.hpp"
#include "ztids/dataset.hpp"
#include "ztids/params.hpp"
#include "ztids/search.hpp"

namespace ztids::online {

enum class DriftState { Stable, Warning, Drift };

struct DriftSignal {
    DriftState state = DriftState::Stable;
    std::size_t at_index = 0;  // number of updates seen by the detector, 1-based
};

class DriftDetector {
public:
    virtual ~DriftDetector() = default;
    virtual DriftSignal update(double value) = 0;
    virtual void reset() = 0;
    virtual std::unique_ptr<DriftDetector> fresh() const = 0;
};

// Adaptive windowing over an exponential histogram of buckets.
class Adwin final : public DriftDetector {
public:
    // With `increase_only`, a cut is reported as drift only when it raised the
    // window mean (rising error), and otherwise just shrinks the window.
    explicit Adwin(double delta = 0.002, std::size_t clock = 32, std::size_t max_buckets = 5,
                   std::size_t min_sub_window = 5, bool increase_only = false);

    DriftSignal update(double value) override;
    void reset() override;
    std::unique_ptr<DriftDetector> fresh() const override;

    std::size_t width() const noexcept { return width_; }
    double mean() const noexcept { return width_ ? total_ / static_cast<double>(width_) : 0.0; }
    double variance() const noexcept { return width_ ? sq_dev_ / static_cast<double>(width_) : 0.0; }
    double delta() const noexcept { return delta_; }

    // Cut threshold for sub-windows of n0 and n1 samples under the current window.
    double epsilon_cut(double n0, double n1) const;

private:
    struct Bucket {
        double total = 0.0;
        double sq_dev = 0.0;
    };

    void insert(double value);
    void compress();
    void drop_oldest();
    bool detect();

    double delta_;
    std::size_t clock_;
    std::size_t max_buckets_;
    std::size_t min_sub_window_;
    bool increase_only_;
    std::vector<std::deque<Bucket>> levels_;  // level i holds buckets of 2^i samples, front = oldest
    std::size_t width_ = 0;
    double total_ = 0.0;
    double sq_dev_ = 0.0;
    std::size_t seen_ = 0;
};

// Error-rate monitor with warning at 2 and drift at 3 minimum-deviation units.
class Ddm final : public DriftDetector {
public:
    explicit Ddm(std::size_t min_instances = 30, double warning_level = 2.0, double drift_level = 3.0);

    DriftSignal update(double error) override;
    void reset() override;
    std::unique_ptr<DriftDetector> fresh() const override;

    double error_rate() const noexcept { return p_; }

private:
    std::size_t min_instances_;
    double warning_level_, drift_level_;
    std::size_t n_ = 0;
    std::size_t seen_ = 0;
    double p_ = 0.0;
    double p_min_ = 0.0, s_min_ = 0.0;
    bool has_min_ = false;
};

// Hoeffding bound sqrt(R^2 ln(1/delta) / (2n)).
double hoeffding_bound(double range, double delta, double n);

class StreamLearner {
public:
    virtual ~StreamLearner() = default;
    virtual int predict_one(std::span<const double> x) const = 0;
    virtual void learn_one(std::span<const double> x, int y) = 0;
    virtual std::string name() const = 0;
    // Cumulative drift detections, used to annotate prequential curves.
    virtual std::size_t drifts_detected() const { return 0; }
};

struct HoeffdingOptions {
    std::size_t grace_period = 200;
    double delta = 1e-7;
    double tie_threshold = 0.05;
    std::size_t n_split_points = 10;
    double min_branch_fraction = 0.01;
    // Features examined per leaf; 0 = all. Leaves draw their subset at creation.
    std::size_t subspace = 0;
    bool naive_bayes_leaves = true;
};

struct SplitRecord {
    std::size_t node = 0;
    std::size_t feature = 0;
    double threshold = 0.0;
    double n = 0.0;
    double best_gain = 0.0;
    double second_gain = 0.0;
    double epsilon = 0.0;
    bool tie_break = false;
};

class HoeffdingTree final : public StreamLearner {
public:
    HoeffdingTree(std::size_t n_features, HoeffdingOptions opts = {}, std::uint64_t seed = 0);

    int predict_one(std::span<const double> x) const override;
    double predict_proba_one(std::span<const double> x) const;
    void learn_one(std::span<const double> x, int y) override;
    void learn_one(std::span<const double> x, int y, double weight);
    std::string name() const override { return "HT"; }

    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t leaf_count() const noexcept;
    const std::vector<SplitRecord>& split_log() const noexcept { return splits_; }
    const HoeffdingOptions& options() const noexcept { return opts_; }

private:
    struct Gaussian {
        double weight = 0.0, mean = 0.0, m2 = 0.0;
        double min = 0.0, max = 0.0;
        void add(double v, double w);
        double stddev() const;
        double cdf(double t) const;
        double log_pdf(double v) const;
    };

    struct Leaf {
        double class_weight[2] = {0.0, 0.0};
        double weight_at_last_attempt = 0.0;
        double mc_correct = 0.0, nb_correct = 0.0;
        std::vector<std::size_t> features;
        std::vector<Gaussian> stats;  // features.size() x 2
    };

    struct Node {
        int feature = -1;
        double threshold = 0.0;
        int left = -1, right = -1;
        int leaf = -1;  // index into leaves_ when the node is a leaf
    };

    int new_leaf(double w0, double w1);
    std::size_t sort(std::span<const double> x) const;
    double leaf_proba(const Leaf& leaf, std::span<const double> x) const;
    int nb_predict(const Leaf& leaf, std::span<const double> x) const;
    void attempt_split(std::size_t node_index);
    void check_width(std::span<const double> x) const;

    std::size_t n_features_;
    HoeffdingOptions opts_;
    std::mt19937_64 rng_;
    std::vector<Node> nodes_;
    std::vector<Leaf> leaves_;
    std::vector<SplitRecord> splits_;
    bool empty_ = true;
};

struct KnnAdwinOptions {
    std::size_t k = 5;
    std::size_t max_window = 1000;
    double delta = 0.002;
};

class KnnAdwin final : public StreamLearner {
public:
    KnnAdwin(std::size_t n_features, KnnAdwinOptions opts = {});

    int predict_one(std::span<const double> x) const override;
    void learn_one(std::span<const double> x, int y) override;
    std::string name() const override { return "KNN-ADWIN"; }
    std::size_t drifts_detected() const override { return drifts_; }

    std::size_t buffer_size() const noexcept { return labels_.size(); }

private:
    std::size_t n_features_;
    KnnAdwinOptions opts_;
    std::deque<std::vector<double>> rows_;
    std::deque<int> labels_;
    Adwin adwin_;
    std::size_t drifts_ = 0;
};

enum class DetectorKind { ADWIN, DDM };

std::string to_string(DetectorKind k);
DetectorKind detector_from_string(const std::string& s);

struct EnsembleOptions {
    std::size_t n_models = 10;
    DetectorKind detector = DetectorKind::ADWIN;
    double lambda = 6.0;
    double adwin_warning_delta = 0.01;
    double adwin_drift_delta = 0.001;
    // Member trees split sooner than a standalone tree.
    HoeffdingOptions tree{.grace_period = 50, .delta = 0.01};
    // Fraction of features per member patch (patches mode only).
    double patch_fraction = 0.6;
};

// Online bagging ensemble of Hoeffding trees with per-member drift handling.
// Random-forest mode draws ceil(sqrt(M)) features at every leaf; patches mode
// trains each member on a fixed random feature patch.
class DriftEnsemble final : public StreamLearner {
public:
    enum class Mode { RandomForest, Patches };

    DriftEnsemble(Mode mode, std::size_t n_features, EnsembleOptions opts = {}, std::uint64_t seed = 0);

    int predict_one(std::span<const double> x) const override;
    void learn_one(std::span<const double> x, int y) override;
    std::string name() const override { return mode_ == Mode::RandomForest ? "ARF" : "SRP"; }
    std::size_t drifts_detected() const override { return drifts_; }

    std::size_t size() const noexcept { return members_.size(); }
    // Class-1 votes of each member for x, in member order.
    std::vector<int> member_votes(std::span<const double> x) const;
    // Removes member i (ablation).
    void remove_member(std::size_t i);
    std::size_t background_count() const noexcept;

private:
    struct Member {
        std::vector<std::size_t> patch;  // empty = all features
        std::unique_ptr<HoeffdingTree> tree;
        std::vector<std::size_t> background_patch;
        std::unique_ptr<HoeffdingTree> background;
        std::unique_ptr<DriftDetector> warning;  // null when the drift detector also warns
        std::unique_ptr<DriftDetector> drift;
        bool in_warning = false;
    };

    Member make_member();
    std::unique_ptr<HoeffdingTree> make_tree(const std::vector<std::size_t>& patch);
    std::vector<std::size_t> draw_patch();
    static std::vector<double> project(std::span<const double> x, const std::vector<std::size_t>& patch);

    Mode mode_;
    std::size_t n_features_;
    EnsembleOptions opts_;
    std::mt19937_64 rng_;
    std::vector<Member> members_;
    std::size_t drifts_ = 0;
};

struct PrequentialCurve {
    std::size_t window = 0;
    std::vector<double> running_accuracy;
    std::vector<double> windowed_accuracy;
    std::vector<std::uint8_t> drift_flags;
    std::vector<std::size_t> drift_events;
    double seconds = 0.0;

    double final_accuracy() const { return running_accuracy.empty() ? 0.0 : running_accuracy.back(); }
};

// Test-then-train over the rows of `stream` in order.
PrequentialCurve prequential_evaluate(StreamLearner& learner, const Dataset& stream, std::size_t window = 500);

struct DriftRecovery {
    double pre_level = 0.0;    // windowed accuracy on the last pre-drift sample
    double dip = 0.0;          // lowest windowed accuracy from the drift on
    std::size_t dip_index = 0;
    // Samples from the drift until the windowed accuracy, after the dip, first
    // comes back within `tolerance` of pre_level; empty if it never does.
    std::optional<std::size_t> samples;
};

DriftRecovery drift_recovery(const PrequentialCurve& curve, std::size_t drift_at, double tolerance);

// index,running_acc,windowed_acc,drift_flag
void write_curve_csv(const PrequentialCurve& curve, std::ostream& out);
// Several named curves side by side: learner,index,running_acc,windowed_acc,drift_flag
void write_curves_csv(const std::vector<std::pair<std::string, const PrequentialCurve*>>& curves, std::ostream& out);

enum class OnlineKind { HT, KnnAdwin, ARF, SRP };

inline constexpr OnlineKind kAllOnlineKinds[] = {OnlineKind::KnnAdwin, OnlineKind::HT, OnlineKind::ARF, OnlineKind::SRP};

std::string to_string(OnlineKind k);
OnlineKind online_kind_from_string(std::string_view s);

ParamMap default_online_params(OnlineKind k);
HyperparameterSpace online_search_space(OnlineKind k);
std::unique_ptr<StreamLearner> make_learner(OnlineKind kind, const ParamMap& params, std::size_t n_features,
                                            std::uint64_t seed);

struct OnlineConfig {
    std::uint64_t seed = 0;
    std::size_t window = 500;
    std::vector<OnlineKind> kinds{std::begin(kAllOnlineKinds), std::end(kAllOnlineKinds)};
    std::size_t top_k = 2;
    // Kinds tuned in addition to the top-k.
    std::vector<OnlineKind> always_tune;
    optimize::PsoOptions pso = [] {
        optimize::PsoOptions p;
        p.swarm = 4;
        p.iters = 4;
        return p;
    }();
    double outlier_threshold = 0.01;
    bool redundancy_filter = true;
    double pearson_threshold = 0.9;
};

struct OnlineEntry {
    OnlineKind kind = OnlineKind::HT;
    double accuracy = 0.0;
    double seconds = 0.0;
    bool selected_for_hpo = false;
};

struct OnlineTuned {
    OnlineKind kind = OnlineKind::HT;
    double default_accuracy = 0.0;
    optimize::SearchResult search;  // objective = 1 - prequential accuracy
    PrequentialCurve best_curve;
    double best_accuracy() const { return 1.0 - search.best_value; }
};

struct OnlineResult {
    autodp::PreprocessReport preprocess;
    autofe::FeatureSelection selection;
    std::vector<OnlineEntry> ranking;
    std::vector<OnlineTuned> tuned;
    OnlineKind winner = OnlineKind::HT;
    ParamMap winner_params;
    double winner_accuracy = 0.0;
    std::vector<std::pair<std::string, PrequentialCurve>> curves;  // defaults, then the tuned winner
    double total_seconds = 0.0;
};

// Encoding, imputation and normalization fitted on the whole replayable
// stream (no balancing), optional Pearson filter, then learner selection and
// PSO of the top kinds warm-started at their defaults.
OnlineResult run_automl_online(const Dataset& raw_stream, const OnlineConfig& cfg);

// Tunes one kind on an already preprocessed stream.
OnlineTuned tune_online(OnlineKind kind, const Dataset& stream, std::size_t window, const optimize::PsoOptions& pso,
                        std::uint64_t seed);

nlohmann::json to_json(const OnlineResult& r, bool include_timing = true);

}  // namespace ztids::online
