#pragma once

#include <cstddef>
#include <functional>

namespace motiondrift {

/// Worker count: MOTIONDRIFT_THREADS if set (>= 1), otherwise the hardware
/// concurrency.
std::size_t worker_count();

/// Runs fn(i) for i in [0, n) on up to worker_count() threads using static
/// contiguous chunks. Each index must write only to its own output slot;
/// results are then independent of the thread count. The first exception
/// thrown by any worker is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace motiondrift
