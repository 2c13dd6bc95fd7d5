#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ztids/params.hpp"

namespace ztids::optimize {

struct ObjectiveResult {
    double value = 0.0;
    std::vector<double> fold_scores;
};

// Minimized. Called concurrently from worker threads, so it must not mutate
// shared state without synchronization.
using Objective = std::function<ObjectiveResult(const ParamMap&)>;

Objective scalar_objective(std::function<double(const ParamMap&)> f);

struct Evaluation {
    ParamMap config;
    double objective = 0.0;
    std::vector<double> fold_scores;
    double seconds = 0.0;
    bool cached = false;  // identical config already evaluated; value reused
    std::size_t iteration = 0;
};

struct SearchTrace {
    std::vector<Evaluation> evaluations;
    std::vector<double> best_so_far;  // one entry per iteration (PSO) or trial (random search)
};

struct SearchResult {
    ParamMap best_config;
    double best_value = 0.0;
    SearchTrace trace;
};

struct PsoOptions {
    std::size_t swarm = 20;
    std::size_t iters = 30;
    double inertia = 0.729;
    double c1 = 1.49445;
    double c2 = 1.49445;
    std::uint64_t seed = 0;
    std::optional<ParamMap> warm_start;  // becomes particle 0; otherwise particle 0 sits at the midpoint
};

// Global-best PSO over a mixed space. Discrete dims are rounded at evaluation
// and categorical dims are relaxed to an index axis. In spaces without
// continuous dims a particle that lands on an already-evaluated point is moved
// to a random unvisited one, so a budget of swarm*iters >= cardinality visits
// every point.
SearchResult pso_minimize(const Objective& objective, const HyperparameterSpace& space, const PsoOptions& opts);

SearchResult random_search(const Objective& objective, const HyperparameterSpace& space, std::size_t n_trials,
                           std::uint64_t seed);

nlohmann::json to_json(const SearchTrace& t, bool include_timing = true);

}  // namespace ztids::optimize
