#pragma once

#include <cstddef>
#include <functional>

namespace csonbr {

/// Number of worker threads to use when the caller asks for "auto" (0).
std::size_t default_thread_count();

/// Runs body(i) for every i in [0, count) on up to `threads` threads.
///
/// Work is handed out dynamically, so body must only write to per-index
/// state. threads <= 1 runs inline on the calling thread. The first exception
/// thrown by any body is rethrown after all workers have joined.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace csonbr
