#include "ztids/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "ztids/error.hpp"
#include "ztids/parallel.hpp"

namespace ztids::optimize {

Objective scalar_objective(std::function<double(const ParamMap&)> f) {
    return [f = std::move(f)](const ParamMap& p) { return ObjectiveResult{f(p), {}}; };
}

namespace {

// Relaxed numeric bounds of a dimension.
std::pair<double, double> axis_bounds(const Dim& d) { return {d.lo, d.hi}; }

ParamValue decode_dim(const Dim& d, double x) {
    switch (d.kind) {
        case DimKind::Continuous: {
            const double margin = 1e-6 * (d.hi - d.lo);
            const double lo = d.lo_open ? d.lo + margin : d.lo;
            const double hi = d.hi_open ? d.hi - margin : d.hi;
            return std::clamp(x, lo, hi);
        }
        case DimKind::Discrete:
            return static_cast<std::int64_t>(std::clamp(std::llround(x), std::llround(d.lo), std::llround(d.hi)));
        case DimKind::Categorical: {
            const auto i = std::clamp<long long>(std::llround(x), 0, static_cast<long long>(d.options.size()) - 1);
            return d.options[static_cast<std::size_t>(i)];
        }
    }
    return 0.0;
}

double encode_dim(const Dim& d, const ParamValue& v) {
    switch (d.kind) {
        case DimKind::Categorical: {
            const auto& s = std::get<std::string>(v);
            const auto it = std::find(d.options.begin(), d.options.end(), s);
            require(it != d.options.end(), ErrorCode::InvalidArgument, d.name + ": unknown option " + s);
            return static_cast<double>(it - d.options.begin());
        }
        default:
            if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
            return std::get<double>(v);
    }
}

ParamMap decode(const HyperparameterSpace& s, const std::vector<double>& x) {
    ParamMap p;
    for (std::size_t i = 0; i < s.dims.size(); ++i) p[s.dims[i].name] = decode_dim(s.dims[i], x[i]);
    return p;
}

std::vector<double> encode(const HyperparameterSpace& s, const ParamMap& p) {
    std::vector<double> x(s.dims.size());
    for (std::size_t i = 0; i < s.dims.size(); ++i) {
        const auto it = p.find(s.dims[i].name);
        require(it != p.end(), ErrorCode::InvalidArgument, "warm start lacks '" + s.dims[i].name + "'");
        x[i] = encode_dim(s.dims[i], it->second);
    }
    return x;
}

// Point number `index` of a fully discrete space, mixed-radix over dims.
std::vector<double> point_at(const HyperparameterSpace& s, std::size_t index) {
    std::vector<double> x(s.dims.size());
    for (std::size_t i = 0; i < s.dims.size(); ++i) {
        const auto& d = s.dims[i];
        const std::size_t size =
            d.kind == DimKind::Categorical ? d.options.size() : static_cast<std::size_t>(d.hi - d.lo) + 1;
        x[i] = d.lo + static_cast<double>(index % size);
        index /= size;
    }
    return x;
}

std::vector<double> random_point(const HyperparameterSpace& s, std::mt19937_64& rng) {
    std::vector<double> x(s.dims.size());
    for (std::size_t i = 0; i < s.dims.size(); ++i) {
        const auto& d = s.dims[i];
        if (d.kind == DimKind::Continuous) {
            std::uniform_real_distribution<double> u(d.lo, d.hi);
            x[i] = u(rng);
        } else {
            std::uniform_int_distribution<long long> u(std::llround(d.lo), std::llround(d.hi));
            x[i] = static_cast<double>(u(rng));
        }
    }
    return x;
}

// Memoizing evaluator that runs a batch of configs on the worker pool and
// records evaluations in submission order.
class Evaluator {
public:
    Evaluator(const Objective& f, SearchTrace& trace) : f_(f), trace_(trace) {}

    bool seen(const std::string& key) const { return cache_.contains(key); }

    std::vector<double> run(const std::vector<ParamMap>& batch, std::size_t iteration) {
        std::vector<std::string> keys(batch.size());
        std::vector<std::size_t> fresh;
        std::unordered_set<std::string> pending;
        for (std::size_t i = 0; i < batch.size(); ++i) {
            keys[i] = canonical_key(batch[i]);
            if (!cache_.contains(keys[i]) && pending.insert(keys[i]).second) fresh.push_back(i);
        }
        std::vector<ObjectiveResult> results(fresh.size());
        std::vector<double> secs(fresh.size());
        parallel_for(fresh.size(), [&](std::size_t j) {
            const auto t0 = std::chrono::steady_clock::now();
            results[j] = f_(batch[fresh[j]]);
            secs[j] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        });
        std::unordered_map<std::string, std::size_t> fresh_slot;
        for (std::size_t j = 0; j < fresh.size(); ++j) fresh_slot[keys[fresh[j]]] = j;

        std::vector<double> values(batch.size());
        for (std::size_t i = 0; i < batch.size(); ++i) {
            Evaluation e;
            e.config = batch[i];
            e.iteration = iteration;
            const auto fs = fresh_slot.find(keys[i]);
            if (fs != fresh_slot.end() && fresh[fs->second] == i) {
                const auto& r = results[fs->second];
                require(!std::isnan(r.value), ErrorCode::InvalidArgument, "objective returned NaN");
                e.objective = r.value;
                e.fold_scores = r.fold_scores;
                e.seconds = secs[fs->second];
                cache_[keys[i]] = r;
            } else {
                const auto& r = cache_.at(keys[i]);
                e.objective = r.value;
                e.fold_scores = r.fold_scores;
                e.cached = true;
            }
            values[i] = e.objective;
            trace_.evaluations.push_back(std::move(e));
        }
        return values;
    }

private:
    const Objective& f_;
    SearchTrace& trace_;
    std::unordered_map<std::string, ObjectiveResult> cache_;
};

}  // namespace

SearchResult pso_minimize(const Objective& objective, const HyperparameterSpace& space, const PsoOptions& opts) {
    space.validate();
    require(opts.swarm >= 2, ErrorCode::InvalidArgument, "swarm must be >= 2");
    require(opts.iters >= 1, ErrorCode::InvalidArgument, "iters must be >= 1");

    const std::size_t d = space.dims.size();
    const std::size_t cardinality = space.cardinality();
    const bool enumerable = cardinality > 0;
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<std::vector<double>> pos(opts.swarm, std::vector<double>(d)), vel = pos;
    for (std::size_t i = 0; i < opts.swarm; ++i) {
        for (std::size_t k = 0; k < d; ++k) {
            const auto [lo, hi] = axis_bounds(space.dims[k]);
            pos[i][k] = i == 0 ? lo + (hi - lo) / 2.0 : lo + unit(rng) * (hi - lo);
            vel[i][k] = (2.0 * unit(rng) - 1.0) * 0.2 * (hi - lo);
        }
    }
    if (opts.warm_start) pos[0] = encode(space, *opts.warm_start);

    SearchResult result;
    Evaluator eval(objective, result.trace);
    std::vector<std::vector<double>> pbest = pos;
    std::vector<double> pbest_val(opts.swarm, std::numeric_limits<double>::infinity());
    std::vector<double> gbest = pos[0];
    double gbest_val = std::numeric_limits<double>::infinity();
    std::unordered_set<std::string> visited;

    for (std::size_t it = 0; it < opts.iters; ++it) {
        std::vector<ParamMap> batch(opts.swarm);
        for (std::size_t i = 0; i < opts.swarm; ++i) {
            batch[i] = decode(space, pos[i]);
            std::string key = canonical_key(batch[i]);
            if (enumerable && visited.contains(key) && visited.size() < cardinality) {
                // Revisit in a finite space: jump to an unvisited point instead.
                std::vector<double> target;
                if (cardinality <= 10000) {
                    std::vector<std::size_t> open;
                    for (std::size_t p = 0; p < cardinality; ++p)
                        if (!visited.contains(canonical_key(decode(space, point_at(space, p))))) open.push_back(p);
                    std::uniform_int_distribution<std::size_t> pick(0, open.size() - 1);
                    target = point_at(space, open[pick(rng)]);
                } else {
                    for (int tries = 0; tries < 64; ++tries) {
                        auto cand = random_point(space, rng);
                        if (!visited.contains(canonical_key(decode(space, cand)))) {
                            target = std::move(cand);
                            break;
                        }
                    }
                }
                if (!target.empty()) {
                    pos[i] = std::move(target);
                    batch[i] = decode(space, pos[i]);
                    key = canonical_key(batch[i]);
                }
            }
            visited.insert(std::move(key));
        }
        const auto values = eval.run(batch, it);
        for (std::size_t i = 0; i < opts.swarm; ++i) {
            if (values[i] < pbest_val[i]) {
                pbest_val[i] = values[i];
                pbest[i] = pos[i];
            }
            if (values[i] < gbest_val) {
                gbest_val = values[i];
                gbest = pos[i];
            }
        }
        result.trace.best_so_far.push_back(gbest_val);
        if (it + 1 == opts.iters) break;
        for (std::size_t i = 0; i < opts.swarm; ++i) {
            for (std::size_t k = 0; k < d; ++k) {
                const auto [lo, hi] = axis_bounds(space.dims[k]);
                const double range = hi - lo;
                double v = opts.inertia * vel[i][k] + opts.c1 * unit(rng) * (pbest[i][k] - pos[i][k]) +
                           opts.c2 * unit(rng) * (gbest[k] - pos[i][k]);
                v = std::clamp(v, -range, range);
                vel[i][k] = v;
                pos[i][k] = std::clamp(pos[i][k] + v, lo, hi);
            }
        }
    }
    result.best_config = decode(space, gbest);
    result.best_value = gbest_val;
    return result;
}

SearchResult random_search(const Objective& objective, const HyperparameterSpace& space, std::size_t n_trials,
                           std::uint64_t seed) {
    space.validate();
    require(n_trials >= 1, ErrorCode::InvalidArgument, "n_trials must be >= 1");
    std::mt19937_64 rng(seed);
    std::vector<ParamMap> batch(n_trials);
    for (auto& p : batch) p = decode(space, random_point(space, rng));
    SearchResult result;
    Evaluator eval(objective, result.trace);
    const auto values = eval.run(batch, 0);
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < n_trials; ++i) {
        result.trace.evaluations[i].iteration = i;
        if (values[i] < best) {
            best = values[i];
            best_i = i;
        }
        result.trace.best_so_far.push_back(best);
    }
    result.best_config = batch[best_i];
    result.best_value = best;
    return result;
}

nlohmann::json to_json(const SearchTrace& t, bool include_timing) {
    nlohmann::json evals = nlohmann::json::array();
    for (const auto& e : t.evaluations) {
        nlohmann::json j = {{"config", ztids::to_json(e.config)},
                            {"objective", e.objective},
                            {"fold_scores", e.fold_scores},
                            {"cached", e.cached},
                            {"iteration", e.iteration}};
        if (include_timing) j["seconds"] = e.seconds;
        evals.push_back(std::move(j));
    }
    return {{"evaluations", evals}, {"best_so_far", t.best_so_far}};
}

}  // namespace ztids::optimize
