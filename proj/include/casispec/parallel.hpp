#pragma once

#include <cstddef>
#include <functional>

namespace casispec {

// Worker-count knob set once by the CLI (--workers). 0 means hardware default.
void set_max_workers(int n);
int max_workers();

// Index-parallel map over [0, n). fn(i) may only write to slot i of shared
// outputs; under that contract results are identical for every worker count.
// The first exception thrown by any fn(i) is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace casispec
