#pragma once

#include <cstddef>
#include <functional>

namespace cgns {

/// 0 means std::thread::hardware_concurrency().
unsigned resolve_threads(unsigned requested) noexcept;

/// Calls fn(i) for i in [0, n) on up to `threads` workers. Indices are handed
/// out in contiguous chunks; fn must write only to slot i. The first exception
/// by index is rethrown after all workers join.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace cgns
