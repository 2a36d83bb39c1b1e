#pragma once

#include <cstddef>
#include <functional>

namespace selectlik {

/// Worker threads to use: hardware concurrency, capped by the
/// SELECTLIK_THREADS environment variable when it holds a positive integer.
std::size_t worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads.
/// Each index is visited exactly once. If any call throws, the exception
/// from the lowest failing index is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace selectlik
