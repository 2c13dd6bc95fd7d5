#include "ztids/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_set>

#include "ztids/error.hpp"

namespace ztids {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

// RFC-4180 record splitter: quoted fields may contain separators, doubled
// quotes and line breaks.
std::vector<std::vector<std::string>> split_records(std::string_view text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        const bool blank = record.size() == 1 && trim(record[0]).empty();
        if (!blank) records.push_back(std::move(record));
        record.clear();
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        if (c == '"' && !field_started) {
            in_quotes = true;
            field_started = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\n') {
            end_record();
        } else if (c == '\r') {
            if (i + 1 < text.size() && text[i + 1] == '\n') continue;
            end_record();
        } else {
            field.push_back(c);
            field_started = true;
        }
    }
    if (field_started || !field.empty() || !record.empty()) end_record();
    return records;
}

bool is_missing_token(std::string_view s) {
    static const std::unordered_set<std::string_view> tokens = {
        "", "NaN", "nan", "NAN", "NA", "N/A", "null", "NULL", "Infinity", "-Infinity", "+Infinity",
        "inf", "-inf", "+inf", "Inf", "-Inf", "INF"};
    return tokens.contains(s);
}

std::optional<double> parse_number(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

bool is_duration_column(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    return lower.find("duration") != std::string::npos;
}

}  // namespace

void Dataset::validate() const {
    require(features.rows() == labels.size(), ErrorCode::ShapeMismatch, "feature rows != label count");
    require(features.cols() == feature_names.size() || features.rows() == 0, ErrorCode::ShapeMismatch,
            "feature columns != feature_names size");
    require(column_kinds.size() == feature_names.size(), ErrorCode::ShapeMismatch, "column_kinds size");
    std::unordered_set<std::string> seen;
    for (const auto& n : feature_names)
        require(seen.insert(n).second, ErrorCode::InvalidArgument, "duplicate feature name '" + n + "'");
    for (int y : labels) require(y == 0 || y == 1, ErrorCode::InvalidArgument, "labels must be 0/1");
}

std::size_t Dataset::count_label(int label) const noexcept {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

Dataset Dataset::subset(std::span<const std::size_t> row_idx) const {
    Dataset out;
    out.features = features.select_rows(row_idx);
    out.features.set_cols(cols());
    out.labels.reserve(row_idx.size());
    for (auto i : row_idx) out.labels.push_back(labels[i]);
    out.feature_names = feature_names;
    out.column_kinds = column_kinds;
    out.positive_label_name = positive_label_name;
    out.categorical_values.resize(categorical_values.size());
    for (std::size_t c = 0; c < categorical_values.size(); ++c) {
        if (categorical_values[c].empty()) continue;
        out.categorical_values[c].reserve(row_idx.size());
        for (auto i : row_idx) out.categorical_values[c].push_back(categorical_values[c][i]);
    }
    return out;
}

Dataset Dataset::project(std::span<const std::size_t> col_idx) const {
    Dataset out;
    out.features = features.select_cols(col_idx);
    out.labels = labels;
    out.positive_label_name = positive_label_name;
    for (auto c : col_idx) {
        out.feature_names.push_back(feature_names.at(c));
        out.column_kinds.push_back(column_kinds.at(c));
        out.categorical_values.push_back(c < categorical_values.size() ? categorical_values[c]
                                                                        : std::vector<std::string>{});
    }
    return out;
}

Dataset Dataset::from_matrix(Matrix x, std::vector<int> y, std::vector<std::string> names) {
    Dataset ds;
    if (names.empty())
        for (std::size_t c = 0; c < x.cols(); ++c) names.push_back("f" + std::to_string(c));
    ds.features = std::move(x);
    ds.labels = std::move(y);
    ds.column_kinds.assign(names.size(), ColumnKind::Numeric);
    ds.categorical_values.assign(names.size(), {});
    ds.feature_names = std::move(names);
    ds.validate();
    return ds;
}

Dataset parse_csv(std::string_view text, const CsvOptions& opts) {
    auto records = split_records(text);
    if (records.empty()) fail(ErrorCode::EmptyFile, "no header row");
    std::vector<std::string> header;
    for (auto& h : records.front()) header.push_back(trim(h));
    const auto label_it = std::find(header.begin(), header.end(), trim(opts.label_column));
    if (label_it == header.end()) fail(ErrorCode::MissingLabelColumn, "column '" + opts.label_column + "' not in header");
    const std::size_t label_col = static_cast<std::size_t>(label_it - header.begin());
    const std::size_t width = header.size();
    const std::size_t n = records.size() - 1;

    for (std::size_t r = 1; r < records.size(); ++r)
        if (records[r].size() != width)
            fail(ErrorCode::RaggedRow, "row " + std::to_string(r) + " has " + std::to_string(records[r].size()) +
                                           " fields, header has " + std::to_string(width));

    Dataset ds;
    std::vector<std::size_t> feature_cols;
    for (std::size_t c = 0; c < width; ++c)
        if (c != label_col) feature_cols.push_back(c);
    ds.features = Matrix(n, feature_cols.size(), kMissing);
    ds.labels.resize(n);
    ds.categorical_values.resize(feature_cols.size());

    std::set<std::string> attack_names;
    for (std::size_t r = 0; r < n; ++r) {
        const std::string label = trim(records[r + 1][label_col]);
        const bool benign = opts.benign_labels.contains(label);
        ds.labels[r] = benign ? 0 : 1;
        if (!benign) attack_names.insert(label);
    }
    ds.positive_label_name = attack_names.size() == 1 ? *attack_names.begin() : "ATTACK";

    for (std::size_t j = 0; j < feature_cols.size(); ++j) {
        const std::size_t c = feature_cols[j];
        const std::string& name = header[c];
        ds.feature_names.push_back(name);
        std::size_t parsed = 0, unparsable = 0;
        std::vector<std::optional<double>> values(n);
        for (std::size_t r = 0; r < n; ++r) {
            const std::string cell = trim(records[r + 1][c]);
            if (is_missing_token(cell)) continue;
            values[r] = parse_number(cell);
            values[r] ? ++parsed : ++unparsable;
        }
        // A column is categorical when most of its present cells are not numbers;
        // otherwise stray text cells are treated as missing.
        if (unparsable > parsed) {
            ds.column_kinds.push_back(ColumnKind::Categorical);
            auto& raw = ds.categorical_values[j];
            raw.reserve(n);
            for (std::size_t r = 0; r < n; ++r) raw.push_back(trim(records[r + 1][c]));
            continue;
        }
        ds.column_kinds.push_back(ColumnKind::Numeric);
        const bool duration = is_duration_column(name);
        for (std::size_t r = 0; r < n; ++r) {
            if (!values[r] || !std::isfinite(*values[r])) continue;
            if (duration && *values[r] < 0.0) continue;
            ds.features(r, j) = *values[r];
        }
    }
    ds.validate();
    return ds;
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& opts) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string text = std::move(buf).str();
    if (text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xEF) text.erase(0, 3);  // UTF-8 BOM
    if (trim(text).empty()) fail(ErrorCode::EmptyFile, path.string() + " is empty");
    return parse_csv(text, opts);
}

void write_csv(const Dataset& ds, std::ostream& out, const std::string& label_column) {
    auto quote = [](const std::string& s) {
        if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) q += (c == '"') ? std::string("\"\"") : std::string(1, c);
        return q + "\"";
    };
    for (std::size_t c = 0; c < ds.cols(); ++c) out << quote(ds.feature_names[c]) << ',';
    out << quote(label_column) << '\n';
    char buf[64];
    for (std::size_t r = 0; r < ds.rows(); ++r) {
        for (std::size_t c = 0; c < ds.cols(); ++c) {
            const bool raw = ds.column_kinds[c] == ColumnKind::Categorical && c < ds.categorical_values.size() &&
                             !ds.categorical_values[c].empty() && is_missing(ds.features(r, c));
            if (raw) {
                out << quote(ds.categorical_values[c][r]);
            } else if (!is_missing(ds.features(r, c))) {
                const auto res = std::to_chars(buf, buf + sizeof buf, ds.features(r, c));
                out.write(buf, res.ptr - buf);
            } else {
                out << "NaN";
            }
            out << ',';
        }
        out << quote(ds.labels[r] == 0 ? "BENIGN" : ds.positive_label_name) << '\n';
    }
}

FoldPlan stratified_kfold(const Dataset& ds, std::size_t k, std::uint64_t seed) {
    require(k >= 2, ErrorCode::InvalidArgument, "k must be >= 2");
    FoldPlan plan{k, std::vector<Fold>(k), seed};
    std::mt19937_64 rng(seed);
    std::vector<std::vector<std::size_t>> test(k);
    std::size_t next_fold = 0;
    for (int label : {0, 1}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < ds.rows(); ++i)
            if (ds.labels[i] == label) members.push_back(i);
        if (members.empty()) continue;
        require(members.size() >= k, ErrorCode::TooFewSamplesPerClass,
                "class " + std::to_string(label) + " has " + std::to_string(members.size()) + " rows < k=" +
                    std::to_string(k));
        std::shuffle(members.begin(), members.end(), rng);
        // Round-robin keeps every fold within one sample of the per-class ideal;
        // continuing the cursor across classes evens out total fold sizes.
        for (auto idx : members) {
            test[next_fold].push_back(idx);
            next_fold = (next_fold + 1) % k;
        }
    }
    for (std::size_t f = 0; f < k; ++f) {
        std::sort(test[f].begin(), test[f].end());
        std::vector<bool> in_test(ds.rows(), false);
        for (auto i : test[f]) in_test[i] = true;
        for (std::size_t i = 0; i < ds.rows(); ++i)
            if (!in_test[i]) plan.folds[f].train.push_back(i);
        plan.folds[f].test = std::move(test[f]);
    }
    return plan;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(std::span<const int> labels,
                                                                                 double test_fraction,
                                                                                 std::uint64_t seed) {
    require(test_fraction > 0.0 && test_fraction < 1.0, ErrorCode::InvalidArgument, "test_fraction in (0,1)");
    std::mt19937_64 rng(seed);
    std::vector<bool> is_test(labels.size(), false);
    for (int label : {0, 1}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == label) members.push_back(i);
        std::shuffle(members.begin(), members.end(), rng);
        const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(members.size())));
        for (std::size_t i = 0; i < n_test; ++i) is_test[members[i]] = true;
    }
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < labels.size(); ++i) (is_test[i] ? test : train).push_back(i);
    return {std::move(train), std::move(test)};
}

Dataset stratified_subsample(const Dataset& ds, std::size_t n, std::uint64_t seed) {
    if (n >= ds.rows()) return ds;
    const double keep = static_cast<double>(n) / static_cast<double>(ds.rows());
    auto [rest, kept] = stratified_split(ds.labels, keep, seed);
    return ds.subset(kept);
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h) noexcept {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

DatasetDigest digest(const Dataset& ds) {
    DatasetDigest d{ds.rows(), ds.cols(), 0.0, 0};
    if (ds.rows() > 0) d.attack_ratio = static_cast<double>(ds.count_label(1)) / static_cast<double>(ds.rows());
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& n : ds.feature_names) h = fnv1a(n, h);
    const auto& data = ds.features.data();
    h = fnv1a({reinterpret_cast<const char*>(data.data()), data.size() * sizeof(double)}, h);
    h = fnv1a({reinterpret_cast<const char*>(ds.labels.data()), ds.labels.size() * sizeof(int)}, h);
    for (const auto& col : ds.categorical_values)
        for (const auto& s : col) h = fnv1a(s, h);
    d.content_hash = h;
    return d;
}

}  // namespace ztids
