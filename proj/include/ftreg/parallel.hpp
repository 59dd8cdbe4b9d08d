#pragma once

#include <cstddef>
#include <functional>
#include <optional>

namespace ftreg {

// Thread count resolution: explicit request wins, then the FTREG_THREADS
// environment variable, then hardware concurrency.
unsigned resolve_threads(std::optional<unsigned> requested = std::nullopt);

// Runs fn(0..count-1) on up to `threads` workers. Tasks write to their own
// output slots, so results are deterministic regardless of scheduling. The
// first exception thrown by a task is rethrown after all workers join.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace ftreg
