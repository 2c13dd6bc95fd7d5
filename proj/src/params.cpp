#include "ztids/params.hpp"

#include <charconv>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "ztids/error.hpp"

namespace ztids {

Dim Dim::continuous(std::string name, double lo, double hi, bool lo_open, bool hi_open) {
    return {std::move(name), DimKind::Continuous, lo, hi, lo_open, hi_open, {}};
}

Dim Dim::discrete(std::string name, std::int64_t lo, std::int64_t hi) {
    return {std::move(name), DimKind::Discrete, static_cast<double>(lo), static_cast<double>(hi), false, false, {}};
}

Dim Dim::categorical(std::string name, std::vector<std::string> options) {
    const double hi = options.empty() ? 0.0 : static_cast<double>(options.size() - 1);
    return {std::move(name), DimKind::Categorical, 0.0, hi, false, false, std::move(options)};
}

bool Dim::contains(const ParamValue& v) const {
    switch (kind) {
        case DimKind::Continuous: {
            double x = 0.0;
            if (const auto* d = std::get_if<double>(&v)) x = *d;
            else if (const auto* i = std::get_if<std::int64_t>(&v)) x = static_cast<double>(*i);
            else return false;
            if (!std::isfinite(x)) return false;
            const bool above = lo_open ? x > lo : x >= lo;
            const bool below = hi_open ? x < hi : x <= hi;
            return above && below;
        }
        case DimKind::Discrete: {
            const auto* i = std::get_if<std::int64_t>(&v);
            return i && static_cast<double>(*i) >= lo && static_cast<double>(*i) <= hi;
        }
        case DimKind::Categorical: {
            const auto* s = std::get_if<std::string>(&v);
            return s && std::find(options.begin(), options.end(), *s) != options.end();
        }
    }
    return false;
}

void HyperparameterSpace::validate() const {
    require(!dims.empty(), ErrorCode::EmptySpace, "hyperparameter space has no dimensions");
    std::set<std::string> names;
    for (const auto& d : dims) {
        require(names.insert(d.name).second, ErrorCode::InvalidArgument, "duplicate dimension " + d.name);
        if (d.kind == DimKind::Categorical) {
            require(!d.options.empty(), ErrorCode::InvalidArgument, d.name + ": no categorical options");
            std::set<std::string> opts(d.options.begin(), d.options.end());
            require(opts.size() == d.options.size(), ErrorCode::InvalidArgument, d.name + ": duplicate options");
        } else {
            require(d.lo < d.hi, ErrorCode::InvalidArgument, d.name + ": lo must be < hi");
        }
    }
}

bool HyperparameterSpace::contains(const ParamMap& params) const {
    for (const auto& d : dims) {
        const auto it = params.find(d.name);
        if (it == params.end() || !d.contains(it->second)) return false;
    }
    return true;
}

std::size_t HyperparameterSpace::cardinality() const {
    std::size_t n = 1;
    for (const auto& d : dims) {
        if (d.kind == DimKind::Continuous) return 0;
        n *= d.kind == DimKind::Categorical ? d.options.size() : static_cast<std::size_t>(d.hi - d.lo) + 1;
    }
    return n;
}

const Dim* HyperparameterSpace::find(const std::string& name) const {
    for (const auto& d : dims)
        if (d.name == name) return &d;
    return nullptr;
}

namespace {
const ParamValue& lookup(const ParamMap& p, const std::string& name) {
    const auto it = p.find(name);
    if (it == p.end()) fail(ErrorCode::BadHyperparameter, "missing hyperparameter '" + name + "'");
    return it->second;
}
}  // namespace

double get_real(const ParamMap& p, const std::string& name) {
    const auto& v = lookup(p, name);
    if (const auto* d = std::get_if<double>(&v)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
    fail(ErrorCode::BadHyperparameter, "'" + name + "' is not numeric");
}

std::int64_t get_int(const ParamMap& p, const std::string& name) {
    const auto& v = lookup(p, name);
    if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
    if (const auto* d = std::get_if<double>(&v); d && std::floor(*d) == *d) return static_cast<std::int64_t>(*d);
    fail(ErrorCode::BadHyperparameter, "'" + name + "' is not an integer");
}

const std::string& get_string(const ParamMap& p, const std::string& name) {
    const auto& v = lookup(p, name);
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    fail(ErrorCode::BadHyperparameter, "'" + name + "' is not categorical");
}

nlohmann::json to_json(const ParamMap& p) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : p) std::visit([&](const auto& x) { j[k] = x; }, v);
    return j;
}

ParamMap param_map_from_json(const nlohmann::json& j) {
    ParamMap p;
    for (const auto& [k, v] : j.items()) {
        if (v.is_number_integer()) p[k] = v.get<std::int64_t>();
        else if (v.is_number()) p[k] = v.get<double>();
        else if (v.is_string()) p[k] = v.get<std::string>();
        else fail(ErrorCode::CorruptModel, "hyperparameter '" + k + "' has unsupported type");
    }
    return p;
}

std::string to_string(const ParamValue& v) {
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, std::get<double>(v));
    return std::string(buf, res.ptr);
}

std::string canonical_key(const ParamMap& p) {
    std::string key;
    for (const auto& [k, v] : p) key += k + "=" + to_string(v) + ";";
    return key;
}

}  // namespace ztids
