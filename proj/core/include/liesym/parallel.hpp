#pragma once

#include <cstddef>
#include <functional>

namespace liesym {

/// Number of worker threads used by parallel_for (>= 1).
///
/// Defaults to the LIESYM_THREADS environment variable when set, otherwise 1.
std::size_t thread_count();
void set_thread_count(std::size_t n);

/// Runs body(i) for i in [0, n). Work is split into contiguous chunks, one per
/// thread; callers must only write to slots indexed by i so that results do
/// not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace liesym
