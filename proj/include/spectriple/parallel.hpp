#pragma once

#include <cstddef>
#include <functional>

namespace spectriple {

// Worker count: SPECTRIPLE_THREADS if set to a positive integer, otherwise
// std::thread::hardware_concurrency().
unsigned thread_count();

// Runs body(i) for i in [0, n) on up to thread_count() threads.  Iterations
// must be independent.  The first exception thrown by any iteration is
// rethrown on the calling thread after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace spectriple
