#pragma once

#include <cstdint>
#include <string>

#include "ztids/dataset.hpp"

namespace ztids::synth {

struct FlowOptions {
    std::size_t rows = 10000;
    double attack_ratio = 0.2;
    double label_noise = 0.001;
    std::uint64_t seed = 0;
};

// Network flows with CICIDS2017 column names and quirks: heavy-tailed
// volumes and rates, "Infinity" rates for zero-length flows, occasional
// negative durations, a textual Protocol column, duplicated columns and
// several attack families. Returned as CSV text with a "Label" column.
std::string flow_csv(const FlowOptions& opts);

// Same flows, parsed with the default CSV options.
Dataset flows(const FlowOptions& opts);

struct DriftStreamOptions {
    std::size_t rows = 20000;
    std::size_t n_features = 10;
    std::size_t drift_at = 10000;  // first row of the flipped concept
    double label_noise = 0.01;
    double proxy_noise = 0.05;  // stddev of the redundant copies
    std::uint64_t seed = 0;
};

// The label depends on three uniform features on [0,1]. The middle columns are
// noisy copies of those three and the last two are pure noise. The label rule
// is inverted from row `drift_at` on.
Dataset drift_stream(const DriftStreamOptions& opts);

}  // namespace ztids::synth
