#pragma once

#include <chrono>
#include <cstddef>
#include <span>
#include <type_traits>
#include <utility>

#include <nlohmann/json_fwd.hpp>

namespace ztids {

struct Confusion {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    std::size_t total() const noexcept { return tp + fp + tn + fn; }
    friend bool operator==(const Confusion&, const Confusion&) = default;
};

struct Scores {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    Confusion confusion;
    double seconds = 0.0;
};

// Positive class is 1 (attack). Zero denominators yield 0.
Scores score(std::span<const int> truth, std::span<const int> predicted);
Scores score(const Confusion& c);

// Percentages rounded to three decimals plus raw confusion counts.
nlohmann::json to_json(const Scores& s);

template <class F>
auto timed(F&& block) {
    const auto start = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<std::invoke_result_t<F>>) {
        std::forward<F>(block)();
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    } else {
        auto result = std::forward<F>(block)();
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return std::pair<decltype(result), double>{std::move(result), secs};
    }
}

}  // namespace ztids
