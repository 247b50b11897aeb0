#pragma once

#include <cstddef>
#include <functional>

namespace sflab {

/// Worker count: SFLAB_THREADS if set and positive, otherwise the hardware concurrency.
unsigned worker_count();

/// Runs body(i) for i in [0, count). Each index is visited exactly once; callers
/// write only to per-index slots, so results do not depend on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace sflab
