#pragma once

#include <cstddef>
#include <functional>

namespace fracint {

// Process-wide worker count used by parallel_for. 0 selects hardware concurrency.
void set_thread_count(unsigned threads);
unsigned thread_count();

// Runs body(i) for every i in [0, count). Each index must write only to its own
// output slot so results do not depend on how indices are split across workers.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace fracint
