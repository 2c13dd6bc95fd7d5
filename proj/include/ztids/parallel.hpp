#pragma once

#include <cstddef>
#include <functional>

namespace ztids {

// Process-wide worker count used by the optimizers; 0 means hardware concurrency.
void set_num_threads(std::size_t n) noexcept;
std::size_t num_threads() noexcept;

// Runs body(i) for i in [0, n). Work is split into contiguous blocks, one per
// worker; callers write results into per-index slots so output order never
// depends on scheduling. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace ztids
