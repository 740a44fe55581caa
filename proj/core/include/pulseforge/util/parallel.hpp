#pragma once

#include <functional>

namespace pulseforge::util {

// Number of worker threads: min(hardware, 8), capped by PULSEFORGE_THREADS.
int max_threads();

// Runs f(i) for i in [0, n). Work is split into contiguous chunks; every
// output index is computed entirely by one task with a fixed inner order,
// so results are identical for any thread count. f must not write shared
// state outside its own indices.
void parallel_for(int n, const std::function<void(int)>& f);

// Chunked variant: f(begin, end) over disjoint ranges.
void parallel_for_range(int n, const std::function<void(int, int)>& f);

}  // namespace pulseforge::util
