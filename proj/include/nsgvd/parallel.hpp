#pragma once

#include <cstddef>
#include <functional>

namespace nsgvd {

/// Upper bound on worker threads used inside the engine. 1 = bit-reproducible mode.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Runs body(i) for i in [0, n). Work is split into contiguous chunks; callers
/// must write results by index so output does not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace nsgvd
