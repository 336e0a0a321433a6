#pragma once

#include <functional>

namespace ghostbeam {

// Worker count for data-parallel loops: GHOSTBEAM_THREADS if set (>=1),
// otherwise the hardware concurrency.
int worker_count();

// Runs fn(i) for i in [0, n). Splits into contiguous chunks across workers;
// chunk assignment is by index, so results written by index are deterministic.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace ghostbeam
