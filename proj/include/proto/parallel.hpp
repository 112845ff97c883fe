#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace proto {

enum class Execution { Serial, Parallel };

inline int hardware_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

/// Runs fn(i) for i in [0, n). The parallel path interleaves iterations
/// round-robin, which balances uneven per-instance work; fn must only write
/// to state owned by iteration i, so the schedule cannot affect results.
template <class Fn>
void parallel_for(std::size_t n, Execution exec, Fn&& fn) {
#ifdef _OPENMP
    if (exec == Execution::Parallel && n > 1) {
#pragma omp parallel for schedule(static, 1)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
            fn(static_cast<std::size_t>(i));
        }
        return;
    }
#else
    (void)exec;
#endif
    for (std::size_t i = 0; i < n; ++i) fn(i);
}

/// Parallel map with an ordered fold. map(i, slot) fills a caller-owned slot;
/// fold(i, slot) is then applied strictly in index order, so the reduction is
/// bit-identical regardless of thread count. slots.size() bounds the scratch
/// memory and sets the map block size.
template <class T, class MapFn, class FoldFn>
void blocked_map_fold(std::size_t n, Execution exec, std::vector<T>& slots, MapFn map, FoldFn fold) {
    const std::size_t block = slots.size();
    for (std::size_t base = 0; base < n; base += block) {
        const std::size_t count = std::min(block, n - base);
        parallel_for(count, exec, [&](std::size_t i) { map(base + i, slots[i]); });
        for (std::size_t i = 0; i < count; ++i) fold(base + i, slots[i]);
    }
}

}  // namespace proto
