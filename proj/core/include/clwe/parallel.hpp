#pragma once

#include <cstddef>
#include <functional>

namespace clwe {

/// Worker count: the CLWE_THREADS environment variable if set to a positive
/// integer, otherwise std::thread::hardware_concurrency() (at least 1).
std::size_t thread_count();

/// Runs body(begin, end) over [0, n) split into fixed chunks of `chunk`
/// items. Chunk boundaries depend only on n and chunk, never on the thread
/// count, so per-chunk work is reproducible. Bodies must write to disjoint
/// output slots. The first exception thrown by any chunk is rethrown.
void parallel_for_chunks(std::size_t n, std::size_t chunk,
                         const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace clwe
