#pragma once

#include <cstddef>
#include <functional>

namespace simval {

/// Worker count used when a caller passes threads <= 0.
int default_thread_count();

/// Runs fn(i) for every i in [0, count) on up to `threads` workers. Work items
/// are claimed dynamically; callers must write results into disjoint slots so
/// the outcome is independent of scheduling. The first exception thrown by
/// any item is rethrown on the calling thread.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)> &fn);

}  // namespace simval
