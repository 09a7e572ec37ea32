#pragma once

#include <cstddef>
#include <functional>

namespace odtqc {

// Worker count from an explicit request, else ODTQC_THREADS, else hardware.
int resolve_threads(int requested);

// Calls fn(i) for every i in [0, n) on up to `threads` workers. Work items must
// be independent; the first exception thrown is rethrown after all workers join.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace odtqc
