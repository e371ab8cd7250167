#pragma once

#include <cstddef>
#include <functional>

namespace zf {

// Worker count: ZOLLFORGE_THREADS if set, else hardware concurrency.
int thread_count();
void set_thread_count(int n);

// Runs body(i) for i in [0, n). Each index is handled by exactly one thread,
// so results written to slot i are deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace zf
