#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ztids/matrix.hpp"

namespace ztids {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) noexcept { return std::isnan(v); }

enum class ColumnKind { Numeric, Categorical };

// Feature matrix plus binary labels (0 = benign, 1 = attack). Categorical
// columns hold their raw strings in `categorical_values` and NaN in `features`
// until an encoder writes integer codes into them.
struct Dataset {
    Matrix features;
    std::vector<int> labels;
    std::vector<std::string> feature_names;
    std::vector<ColumnKind> column_kinds;
    std::string positive_label_name = "ATTACK";
    std::vector<std::vector<std::string>> categorical_values;

    std::size_t rows() const noexcept { return labels.size(); }
    std::size_t cols() const noexcept { return feature_names.size(); }

    // Throws ShapeMismatch / InvalidArgument when an invariant is broken.
    void validate() const;

    std::size_t count_label(int label) const noexcept;

    Dataset subset(std::span<const std::size_t> row_idx) const;
    Dataset project(std::span<const std::size_t> col_idx) const;

    // Builds an all-numeric dataset; feature names default to f0..fN-1.
    static Dataset from_matrix(Matrix x, std::vector<int> y, std::vector<std::string> names = {});
};

struct CsvOptions {
    std::string label_column = "Label";
    std::set<std::string> benign_labels = {"BENIGN", "Benign"};
};

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& opts = {});
Dataset parse_csv(std::string_view text, const CsvOptions& opts = {});

// Writes features (codes for encoded categoricals, raw strings otherwise) and a
// trailing label column holding "BENIGN" / positive_label_name.
void write_csv(const Dataset& ds, std::ostream& out, const std::string& label_column = "Label");

struct Fold {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

struct FoldPlan {
    std::size_t k = 0;
    std::vector<Fold> folds;
    std::uint64_t seed = 0;
};

FoldPlan stratified_kfold(const Dataset& ds, std::size_t k, std::uint64_t seed);

// Single stratified split; returns (train_idx, test_idx), both ascending.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(
    std::span<const int> labels, double test_fraction, std::uint64_t seed);

// Stratified random subsample of at most n rows, keeping stored order.
Dataset stratified_subsample(const Dataset& ds, std::size_t n, std::uint64_t seed);

struct StreamSample {
    std::span<const double> x;
    int y;
};

// Ordered single-pass view over a dataset's rows. Re-iterating from begin()
// yields the identical sequence.
class RowStream {
public:
    explicit RowStream(const Dataset& ds) : ds_(&ds) {}

    class iterator {
    public:
        using value_type = StreamSample;
        using difference_type = std::ptrdiff_t;

        iterator() = default;
        iterator(const Dataset* ds, std::size_t pos) : ds_(ds), pos_(pos) {}
        StreamSample operator*() const { return {ds_->features.row(pos_), ds_->labels[pos_]}; }
        iterator& operator++() { ++pos_; return *this; }
        void operator++(int) { ++pos_; }
        bool operator==(const iterator& o) const { return pos_ == o.pos_; }

    private:
        const Dataset* ds_ = nullptr;
        std::size_t pos_ = 0;
    };

    iterator begin() const { return {ds_, 0}; }
    iterator end() const { return {ds_, ds_->rows()}; }
    std::size_t size() const noexcept { return ds_->rows(); }
    std::size_t width() const noexcept { return ds_->cols(); }

private:
    const Dataset* ds_;
};

inline RowStream stream(const Dataset& ds) { return RowStream(ds); }

struct DatasetDigest {
    std::size_t rows = 0;
    std::size_t cols = 0;
    double attack_ratio = 0.0;
    std::uint64_t content_hash = 0;
};

DatasetDigest digest(const Dataset& ds);

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) noexcept;

}  // namespace ztids
