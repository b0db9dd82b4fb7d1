#pragma once

#include <cstdint>
#include <functional>

namespace torsoseg {

// Worker cap shared by all parallel loops. 0 restores the hardware default.
void set_thread_count(unsigned n);
unsigned thread_count();

// Splits [begin, end) into contiguous blocks, one per worker. Each index is
// visited exactly once; callers must make results independent of the split.
void parallel_for(std::int64_t begin, std::int64_t end,
                  const std::function<void(std::int64_t, std::int64_t)>& body);

}  // namespace torsoseg
