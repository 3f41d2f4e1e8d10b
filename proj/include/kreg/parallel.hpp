#pragma once

#include <cstddef>
#include <functional>

namespace kreg {

/// Upper bound on worker threads used by parallel_for. 0 selects the hardware
/// concurrency; 1 disables parallelism.
void set_max_threads(unsigned threads);
[[nodiscard]] unsigned max_threads();

/// Calls body(i) for every i in [0, count). Each index is visited exactly once and
/// callers write results by index, so output does not depend on the thread count.
/// Nested calls from inside a worker run serially.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace kreg
