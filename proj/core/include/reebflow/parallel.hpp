#pragma once

#include <cstddef>
#include <functional>

namespace reebflow {

// Worker count: REEB_STEADY_THREADS if set (>= 1), else hardware concurrency.
std::size_t thread_cap();

// Runs body(i) for i in [0, n). Iterations must be independent.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace reebflow
