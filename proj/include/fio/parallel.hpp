#pragma once

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

#include <atomic>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace fio {

/// Thrown from inside a sweep once cancellation has been requested.
struct Cancelled : std::runtime_error {
    Cancelled() : std::runtime_error("cancelled") {}
};

/// Worker count used by every data-parallel loop (0 = hardware concurrency).
void set_worker_count(int workers);
int worker_count();

void request_cancel();
void clear_cancel();
bool cancel_requested();
inline void throw_if_cancelled() {
    if (cancel_requested()) throw Cancelled();
}

tbb::task_arena& arena();

/// Runs body(i) for i in [0, n).  Chunks are fixed-size so work splitting does
/// not depend on the worker count.
template <typename Body>
void parallel_for_index(std::size_t n, Body&& body, std::size_t grain = 64) {
    if (n == 0) return;
    arena().execute([&] {
        tbb::parallel_for(
            tbb::blocked_range<std::size_t>(0, n, grain),
            [&](const tbb::blocked_range<std::size_t>& r) {
                throw_if_cancelled();
                for (std::size_t i = r.begin(); i != r.end(); ++i) body(i);
            },
            tbb::simple_partitioner());
    });
}

/// Deterministic reduction: [0, n) is cut into chunks of `chunk` indices, each
/// chunk is reduced sequentially by chunk_fn(begin, end) and the chunk results
/// are merged left to right, so the result is bit-identical for any worker count.
template <typename T, typename ChunkFn, typename Merge>
T parallel_reduce_ordered(std::size_t n, T init, ChunkFn&& chunk_fn, Merge&& merge, std::size_t chunk = 1024) {
    if (n == 0) return init;
    std::size_t chunks = (n + chunk - 1) / chunk;
    std::vector<T> partial(chunks, init);
    parallel_for_index(
        chunks,
        [&](std::size_t c) {
            std::size_t b = c * chunk;
            std::size_t e = std::min(n, b + chunk);
            partial[c] = chunk_fn(b, e);
        },
        1);
    T acc = init;
    for (auto& p : partial) acc = merge(acc, p);
    return acc;
}

}  // namespace fio
