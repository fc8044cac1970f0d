#pragma once

#include <cstddef>
#include <functional>

namespace subkb {

/// Runs `body(i)` for every i in [0, count) on up to `threads` worker
/// threads. Work is split into contiguous blocks; with threads <= 1 the
/// loop runs inline in index order. The first exception thrown by any
/// invocation is rethrown on the calling thread after all workers join.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

/// Thread count from the SUBSPACE_KB_THREADS environment variable, or 1.
int default_thread_count();

}  // namespace subkb
