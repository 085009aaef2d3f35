#ifndef DRONEARRAY_PARALLEL_HPP
#define DRONEARRAY_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace dronearray {

// Global worker cap for parallel_for (CLI --threads). 0 = hardware default.
void set_thread_budget(unsigned n);
unsigned thread_budget();

// Runs fn(i) for i in [0, n). Each index must be independent and write only
// to its own output slot; the result is then identical for any worker count.
// Nested calls run serially on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace dronearray

#endif
