#pragma once

#include <cstddef>
#include <functional>

namespace flexcert {

// Upper bound on worker threads used by library loops (0 = hardware default).
void set_max_threads(std::size_t n);
std::size_t max_threads();

// Runs body(i) for i in [0, n). Iterations must be independent; results
// written per index make the outcome independent of scheduling. The first
// exception thrown by any iteration is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace flexcert
