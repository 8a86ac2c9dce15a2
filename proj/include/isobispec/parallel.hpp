#pragma once

#include <cstddef>
#include <functional>

namespace isobispec {

/// Worker count: ISOBISPEC_THREADS when set to a positive integer, otherwise
/// the hardware concurrency.
int thread_count();

/// Runs fn(0..n-1) across thread_count() workers. The first exception thrown
/// by any task is rethrown after all workers have joined.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace isobispec
