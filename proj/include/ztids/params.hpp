#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace ztids {

// One hyperparameter value: continuous real, discrete integer or categorical option.
using ParamValue = std::variant<double, std::int64_t, std::string>;
using ParamMap = std::map<std::string, ParamValue>;

enum class DimKind { Continuous, Discrete, Categorical };

struct Dim {
    std::string name;
    DimKind kind = DimKind::Continuous;
    double lo = 0.0;
    double hi = 0.0;
    bool lo_open = false;  // (lo, ... for ranges such as learning_rate (0, 1)
    bool hi_open = false;
    std::vector<std::string> options;

    static Dim continuous(std::string name, double lo, double hi, bool lo_open = false, bool hi_open = false);
    static Dim discrete(std::string name, std::int64_t lo, std::int64_t hi);
    static Dim categorical(std::string name, std::vector<std::string> options);

    bool contains(const ParamValue& v) const;
};

struct HyperparameterSpace {
    std::vector<Dim> dims;

    // Throws InvalidArgument when a bound or option list is malformed.
    void validate() const;
    bool contains(const ParamMap& params) const;
    // Number of distinct points, or 0 when any dimension is continuous.
    std::size_t cardinality() const;
    const Dim* find(const std::string& name) const;
};

double get_real(const ParamMap& p, const std::string& name);
std::int64_t get_int(const ParamMap& p, const std::string& name);
const std::string& get_string(const ParamMap& p, const std::string& name);

nlohmann::json to_json(const ParamMap& p);
ParamMap param_map_from_json(const nlohmann::json& j);
std::string to_string(const ParamValue& v);
// Canonical text form used as a memoization key.
std::string canonical_key(const ParamMap& p);

}  // namespace ztids
