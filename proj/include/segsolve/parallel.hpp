#pragma once

#include <cstddef>
#include <functional>

namespace segsolve {

// Worker count resolution: an explicit request wins; otherwise the
// SEGSOLVE_THREADS environment variable; otherwise (or when that is 0) the
// hardware concurrency, clamped to a sane range.
int resolve_threads(int requested);

// Static block partition of [0, count) across `threads` workers. Each worker
// sees a contiguous [begin, end) range; ranges never overlap, so callers can
// write to disjoint slices without synchronization. Work assignment depends
// only on count, never on the thread count's scheduling, and callers are
// expected to produce identical results for any worker count.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace segsolve
