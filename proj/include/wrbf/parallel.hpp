#pragma once

#include <cstddef>
#include <functional>

namespace wrbf {

/// Worker count used by parallel loops (>= 1); 1 runs everything on the caller.
void set_num_threads(int threads);
int num_threads() noexcept;

/// Calls body(i) for i in [0, count). Indices are split into contiguous
/// static chunks and every index writes only its own output, so results do
/// not depend on the thread count. The first exception thrown is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace wrbf
