#include "ztids/autodp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "ztids/error.hpp"

namespace ztids::autodp {

namespace {

// Linear-interpolated quantile of sorted data.
double quantile_sorted(const std::vector<double>& s, double q) {
    const double pos = q * static_cast<double>(s.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, s.size() - 1);
    return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double sq_dist(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double t = a[i] - b[i];
        d += t * t;
    }
    return d;
}

// Indices of the k nearest rows of `pool` to `query` (ties broken by index),
// skipping `self`.
std::vector<std::size_t> k_nearest(const Matrix& x, std::span<const std::size_t> pool, std::size_t self,
                                   std::size_t k) {
    std::vector<std::pair<double, std::size_t>> d;
    d.reserve(pool.size());
    const auto q = x.row(self);
    for (auto j : pool)
        if (j != self) d.emplace_back(sq_dist(q, x.row(j)), j);
    k = std::min(k, d.size());
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
    std::vector<std::size_t> out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = d[i].second;
    return out;
}

}  // namespace

int ColumnEncoder::code(const std::string& value) const {
    const auto it = std::find(values.begin(), values.end(), value);
    return it == values.end() ? unknown_code() : static_cast<int>(it - values.begin());
}

std::string to_string(NormChoice c) { return c == NormChoice::ZScore ? "zscore" : "minmax"; }

NormChoice norm_choice_from_string(const std::string& s) {
    if (s == "zscore") return NormChoice::ZScore;
    if (s == "minmax") return NormChoice::MinMax;
    fail(ErrorCode::InvalidArgument, "unknown normalization '" + s + "'");
}

Encoders fit_encoding(const Dataset& ds) {
    Encoders enc;
    for (std::size_t c = 0; c < ds.cols(); ++c) {
        if (ds.column_kinds[c] != ColumnKind::Categorical) continue;
        if (c >= ds.categorical_values.size() || ds.categorical_values[c].empty()) continue;
        ColumnEncoder e{c, {}};
        std::unordered_map<std::string, int> seen;
        for (const auto& v : ds.categorical_values[c])
            if (seen.emplace(v, static_cast<int>(e.values.size())).second) e.values.push_back(v);
        enc.push_back(std::move(e));
    }
    return enc;
}

Dataset apply_encoding(const Dataset& ds, const Encoders& enc) {
    Dataset out = ds;
    for (const auto& e : enc) {
        require(e.column < out.cols(), ErrorCode::ShapeMismatch, "encoder column out of range");
        const auto& raw = ds.categorical_values.at(e.column);
        if (raw.empty()) continue;  // already encoded
        std::unordered_map<std::string, int> lookup;
        for (std::size_t i = 0; i < e.values.size(); ++i) lookup.emplace(e.values[i], static_cast<int>(i));
        for (std::size_t r = 0; r < out.rows(); ++r) {
            const auto it = lookup.find(raw[r]);
            out.features(r, e.column) = it == lookup.end() ? e.unknown_code() : it->second;
        }
        out.categorical_values[e.column].clear();
    }
    return out;
}

std::vector<double> fit_imputer(const Dataset& ds) {
    std::vector<double> medians(ds.cols());
    for (std::size_t c = 0; c < ds.cols(); ++c) {
        std::vector<double> present;
        present.reserve(ds.rows());
        for (std::size_t r = 0; r < ds.rows(); ++r)
            if (!is_missing(ds.features(r, c))) present.push_back(ds.features(r, c));
        require(!present.empty(), ErrorCode::DegenerateColumn, "column '" + ds.feature_names[c] + "' has no values");
        medians[c] = median_of(std::move(present));
    }
    return medians;
}

Dataset apply_imputer(const Dataset& ds, const std::vector<double>& medians) {
    require(medians.size() == ds.cols(), ErrorCode::ShapeMismatch, "median count != column count");
    Dataset out = ds;
    for (std::size_t r = 0; r < out.rows(); ++r)
        for (std::size_t c = 0; c < out.cols(); ++c)
            if (is_missing(out.features(r, c))) out.features(r, c) = medians[c];
    return out;
}

double tukey_outlier_fraction(std::vector<double> column) {
    if (column.empty()) return 0.0;
    std::sort(column.begin(), column.end());
    const double q1 = quantile_sorted(column, 0.25);
    const double q3 = quantile_sorted(column, 0.75);
    const double iqr = q3 - q1;
    const double lo = q1 - 1.5 * iqr, hi = q3 + 1.5 * iqr;
    const auto outside = std::count_if(column.begin(), column.end(), [&](double v) { return v < lo || v > hi; });
    return static_cast<double>(outside) / static_cast<double>(column.size());
}

NormChoice select_normalization(const Dataset& ds, double outlier_fraction_threshold) {
    for (std::size_t c = 0; c < ds.cols(); ++c) {
        std::vector<double> col(ds.rows());
        for (std::size_t r = 0; r < ds.rows(); ++r) col[r] = ds.features(r, c);
        if (tukey_outlier_fraction(std::move(col)) > outlier_fraction_threshold) return NormChoice::ZScore;
    }
    return NormChoice::MinMax;
}

std::vector<std::pair<double, double>> fit_normalization(const Dataset& ds, NormChoice choice) {
    std::vector<std::pair<double, double>> params(ds.cols());
    const auto n = static_cast<double>(ds.rows());
    for (std::size_t c = 0; c < ds.cols(); ++c) {
        if (choice == NormChoice::ZScore) {
            double mean = 0.0;
            for (std::size_t r = 0; r < ds.rows(); ++r) mean += ds.features(r, c);
            mean = ds.rows() ? mean / n : 0.0;
            double var = 0.0;
            for (std::size_t r = 0; r < ds.rows(); ++r) var += (ds.features(r, c) - mean) * (ds.features(r, c) - mean);
            params[c] = {mean, ds.rows() ? std::sqrt(var / n) : 0.0};
        } else {
            double lo = 0.0, hi = 0.0;
            if (ds.rows()) {
                lo = hi = ds.features(0, c);
                for (std::size_t r = 1; r < ds.rows(); ++r) {
                    lo = std::min(lo, ds.features(r, c));
                    hi = std::max(hi, ds.features(r, c));
                }
            }
            params[c] = {lo, hi};
        }
    }
    return params;
}

Dataset normalize(const Dataset& ds, const PreprocessReport& report) {
    require(report.norm_params.size() == ds.cols(), ErrorCode::ShapeMismatch, "normalization params width");
    Dataset out = ds;
    const bool z = report.norm_choice == NormChoice::ZScore;
    for (std::size_t c = 0; c < ds.cols(); ++c) {
        const auto [a, b] = report.norm_params[c];
        const double scale = z ? b : b - a;
        for (std::size_t r = 0; r < ds.rows(); ++r)
            out.features(r, c) = scale == 0.0 ? 0.0 : (ds.features(r, c) - a) / scale;
    }
    return out;
}

Dataset denormalize(const Dataset& ds, const PreprocessReport& report) {
    require(report.norm_params.size() == ds.cols(), ErrorCode::ShapeMismatch, "normalization params width");
    Dataset out = ds;
    const bool z = report.norm_choice == NormChoice::ZScore;
    for (std::size_t c = 0; c < ds.cols(); ++c) {
        const auto [a, b] = report.norm_params[c];
        const double scale = z ? b : b - a;
        for (std::size_t r = 0; r < ds.rows(); ++r)
            out.features(r, c) = scale == 0.0 ? a : ds.features(r, c) * scale + a;
    }
    return out;
}

BalanceResult balance_adasyn(const Dataset& ds, const AdasynOptions& opts) {
    require(opts.beta > 0.0 && opts.beta <= 1.0, ErrorCode::InvalidArgument, "beta must be in (0,1]");
    require(opts.k_neighbors >= 1, ErrorCode::InvalidArgument, "k_neighbors must be >= 1");
    const std::size_t n1 = ds.count_label(1), n0 = ds.rows() - n1;
    require(n0 > 0 && n1 > 0, ErrorCode::InvalidArgument, "ADASYN needs both classes present");
    const int minority = n1 < n0 ? 1 : 0;
    const std::size_t n_min = std::min(n0, n1), n_maj = std::max(n0, n1);

    BalanceResult result{ds, {n_maj, n_min, 0, minority}, false};
    const auto g_total = static_cast<std::size_t>(std::floor(static_cast<double>(n_maj - n_min) * opts.beta));
    if (g_total == 0) {
        result.already_balanced = true;
        return result;
    }
    require(n_min >= opts.k_neighbors + 1, ErrorCode::MinorityTooSmall,
            "minority class has " + std::to_string(n_min) + " rows, need k+1=" + std::to_string(opts.k_neighbors + 1));

    std::vector<std::size_t> all(ds.rows()), min_idx;
    std::iota(all.begin(), all.end(), 0);
    for (std::size_t i = 0; i < ds.rows(); ++i)
        if (ds.labels[i] == minority) min_idx.push_back(i);

    // Density ratio: share of majority rows among each minority row's k neighbours.
    std::vector<double> ratio(n_min);
    std::vector<std::vector<std::size_t>> min_neighbors(n_min);
    for (std::size_t m = 0; m < n_min; ++m) {
        const auto nn = k_nearest(ds.features, all, min_idx[m], opts.k_neighbors);
        const auto majority = std::count_if(nn.begin(), nn.end(), [&](auto j) { return ds.labels[j] != minority; });
        ratio[m] = static_cast<double>(majority) / static_cast<double>(opts.k_neighbors);
        min_neighbors[m] = k_nearest(ds.features, min_idx, min_idx[m], opts.k_neighbors);
    }
    double total = std::accumulate(ratio.begin(), ratio.end(), 0.0);
    if (total == 0.0) {
        std::fill(ratio.begin(), ratio.end(), 1.0);
        total = static_cast<double>(n_min);
    }

    // Largest-remainder rounding so allocations sum to exactly G.
    std::vector<std::size_t> alloc(n_min);
    std::vector<std::pair<double, std::size_t>> remainders(n_min);
    std::size_t assigned = 0;
    for (std::size_t m = 0; m < n_min; ++m) {
        const double share = ratio[m] / total * static_cast<double>(g_total);
        alloc[m] = static_cast<std::size_t>(std::floor(share));
        assigned += alloc[m];
        remainders[m] = {-(share - std::floor(share)), m};
    }
    std::sort(remainders.begin(), remainders.end());
    for (std::size_t i = 0; assigned < g_total; ++i, ++assigned) ++alloc[remainders[i % n_min].second];

    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto& out = result.data;
    out.features.reserve_rows(ds.rows() + g_total);
    std::vector<double> synth(ds.cols());
    for (std::size_t m = 0; m < n_min; ++m) {
        const auto& nbrs = min_neighbors[m];
        std::uniform_int_distribution<std::size_t> pick(0, nbrs.size() - 1);
        const auto base = ds.features.row(min_idx[m]);
        for (std::size_t g = 0; g < alloc[m]; ++g) {
            const auto partner = ds.features.row(nbrs[pick(rng)]);
            const double lambda = unit(rng);
            for (std::size_t c = 0; c < synth.size(); ++c) synth[c] = base[c] + lambda * (partner[c] - base[c]);
            out.features.append_row(synth);
            out.labels.push_back(minority);
        }
    }
    for (auto& col : out.categorical_values)
        if (!col.empty()) col.resize(out.rows());
    result.stats.n_synthesized = g_total;
    return result;
}

FittedPreprocess fit_preprocess(const Dataset& train, const AutoDpOptions& opts) {
    FittedPreprocess fp;
    auto& rep = fp.report;
    rep.fitted_on_rows = train.rows();
    rep.encoders = fit_encoding(train);
    Dataset work = apply_encoding(train, rep.encoders);
    rep.medians = fit_imputer(work);
    work = apply_imputer(work, rep.medians);
    rep.norm_choice = select_normalization(work, opts.outlier_threshold);
    rep.norm_params = fit_normalization(work, rep.norm_choice);
    work = normalize(work, rep);
    rep.feature_box = fit_normalization(work, NormChoice::MinMax);
    const std::size_t n_min = std::min(work.count_label(0), work.count_label(1));
    // Folds whose minority class cannot supply k neighbors are left unbalanced.
    if (opts.balance && n_min > opts.adasyn.k_neighbors) {
        auto bal = balance_adasyn(work, opts.adasyn);
        rep.balance_stats = bal.stats;
        work = std::move(bal.data);
    } else {
        rep.balance_stats = {std::max(work.count_label(0), work.count_label(1)),
                             std::min(work.count_label(0), work.count_label(1)), 0,
                             work.count_label(1) <= work.count_label(0) ? 1 : 0};
    }
    fp.train = std::move(work);
    return fp;
}

Dataset apply_preprocess(const PreprocessReport& report, const Dataset& ds) {
    Dataset work = apply_encoding(ds, report.encoders);
    work = apply_imputer(work, report.medians);
    return normalize(work, report);
}

nlohmann::json to_json(const PreprocessReport& r) {
    nlohmann::json enc = nlohmann::json::array();
    for (const auto& e : r.encoders) enc.push_back({{"column", e.column}, {"values", e.values}});
    nlohmann::json params = nlohmann::json::array();
    for (const auto& [a, b] : r.norm_params) params.push_back({a, b});
    nlohmann::json box = nlohmann::json::array();
    for (const auto& [a, b] : r.feature_box) box.push_back({a, b});
    return {{"version", PreprocessReport::kVersion},
            {"encoders", enc},
            {"medians", r.medians},
            {"norm_choice", to_string(r.norm_choice)},
            {"norm_params", params},
            {"balance_stats",
             {{"n_majority", r.balance_stats.n_majority},
              {"n_minority", r.balance_stats.n_minority},
              {"n_synthesized", r.balance_stats.n_synthesized},
              {"minority_label", r.balance_stats.minority_label}}},
            {"fitted_on_rows", r.fitted_on_rows},
            {"feature_box", box}};
}

PreprocessReport report_from_json(const nlohmann::json& j) {
    try {
        if (j.at("version").get<int>() != PreprocessReport::kVersion)
            fail(ErrorCode::VersionMismatch, "unsupported preprocess report version");
        PreprocessReport r;
        for (const auto& e : j.at("encoders"))
            r.encoders.push_back({e.at("column").get<std::size_t>(), e.at("values").get<std::vector<std::string>>()});
        r.medians = j.at("medians").get<std::vector<double>>();
        r.norm_choice = norm_choice_from_string(j.at("norm_choice").get<std::string>());
        for (const auto& p : j.at("norm_params")) r.norm_params.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
        const auto& b = j.at("balance_stats");
        r.balance_stats = {b.at("n_majority").get<std::size_t>(), b.at("n_minority").get<std::size_t>(),
                           b.at("n_synthesized").get<std::size_t>(), b.at("minority_label").get<int>()};
        r.fitted_on_rows = j.at("fitted_on_rows").get<std::size_t>();
        for (const auto& p : j.at("feature_box")) r.feature_box.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
        return r;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::CorruptModel, std::string("malformed preprocess report: ") + e.what());
    }
}

}  // namespace ztids::autodp
