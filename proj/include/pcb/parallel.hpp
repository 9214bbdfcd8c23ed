#pragma once

#include <cstddef>
#include <functional>

namespace pcb {

/// Number of worker threads used by the per-point loops. Defaults to the
/// PCB_THREADS environment variable, else the hardware concurrency.
std::size_t thread_count();
void set_thread_count(std::size_t n);

/// Calls `body(i)` for every i in [0, n). Work is split into contiguous static
/// chunks; each index is processed exactly once, so results that are written
/// per index do not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace pcb
