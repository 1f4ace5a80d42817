#pragma once

#include <cstddef>
#include <functional>

namespace nids {

// Process-wide worker budget for training and prediction. Defaults to 1.
void set_max_threads(int n);
int max_threads();

// Runs fn(index) for index in [0, n). Work items are claimed dynamically but
// each result must be written to a slot keyed by index, which keeps the
// combined outcome independent of thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// Runs fn(chunk, begin, end) over fixed-size chunks of [0, n). Chunk
// boundaries depend only on chunk_size, never on the thread count; callers
// reduce per-chunk results in chunk order to stay bit-deterministic.
void parallel_chunks(std::size_t n, std::size_t chunk_size,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

}  // namespace nids
