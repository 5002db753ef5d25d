#pragma once

#include <cstddef>
#include <functional>

namespace efl {

/// Number of worker threads used by parallel_for. Defaults to the hardware
/// concurrency; the EFL_THREADS environment variable caps it (EFL_THREADS=1
/// forces serial execution).
unsigned thread_budget();

/// Runs f(i) for i in [0, n), split across the thread budget in contiguous
/// chunks. Each index must write only to its own output slot; results are
/// then independent of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f);

}  // namespace efl
