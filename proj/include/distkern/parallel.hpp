#pragma once

#include <cstddef>
#include <functional>

namespace distkern {

/// 0 means "use std::thread::hardware_concurrency()".
unsigned resolve_threads(unsigned requested);

/// Runs fn(i) for every i in [0, count) over a static partition into
/// contiguous chunks. Callers write results into per-index slots, so output
/// never depends on the thread count. The first exception thrown is rethrown.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace distkern
