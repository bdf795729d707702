#pragma once

#include <cstddef>
#include <functional>

namespace spherelag {

// Worker count used by every parallel loop in the library. Defaults to the
// SPHERELAG_THREADS environment variable, else hardware concurrency.
std::size_t thread_count();
void set_thread_count(std::size_t n);

// Runs body(begin, end) over contiguous chunks of [0, n). Chunk boundaries
// depend only on n and the thread count, so each index is always handled the
// same way; bodies must write disjoint outputs.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace spherelag
