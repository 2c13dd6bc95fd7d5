#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ztids/dataset.hpp"

namespace ztids::testing {

// Two Gaussian blobs along the first coordinate; separable when `gap` is large.
inline Dataset blobs(std::size_t n, std::size_t dims, double gap, std::uint64_t seed, double attack_share = 0.5) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matrix x(n, dims);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = u(rng) < attack_share ? 1 : 0;
        for (std::size_t d = 0; d < dims; ++d) x(i, d) = noise(rng);
        x(i, 0) += y[i] ? gap / 2 : -gap / 2;
    }
    return Dataset::from_matrix(std::move(x), std::move(y));
}

// Linearly separable 2-feature set: label = [x0 + x1 > 0] with a margin.
inline Dataset separable_2d(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix x(n, 2);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double a, b;
        do {
            a = u(rng);
            b = u(rng);
        } while (std::abs(a + b) < 0.2);
        x(i, 0) = a;
        x(i, 1) = b;
        y[i] = a + b > 0 ? 1 : 0;
    }
    return Dataset::from_matrix(std::move(x), std::move(y));
}

// Separable along the first axis with a 0.2 gap; the other columns are noise.
inline Dataset axis_separable(std::size_t n, std::size_t dims, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.1, 1.0), noise(-1.0, 1.0);
    Matrix x(n, dims);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = static_cast<int>(rng() % 2);
        x(i, 0) = y[i] ? u(rng) : -u(rng);
        for (std::size_t d = 1; d < dims; ++d) x(i, d) = noise(rng);
    }
    return Dataset::from_matrix(std::move(x), std::move(y));
}

}  // namespace ztids::testing
