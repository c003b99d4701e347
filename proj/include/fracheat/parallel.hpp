#pragma once

#include <cstddef>
#include <functional>

namespace fracheat {

void set_threads(int n);
int threads();

// Static block partition of [0, n); each index is visited exactly once.
// Results written to per-index slots are independent of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)> &body);

} // namespace fracheat
