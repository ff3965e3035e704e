#include "fio/parallel.hpp"

#include <memory>
#include <mutex>
#include <thread>

namespace fio {

namespace {
std::atomic<bool> g_cancel{false};
std::mutex g_arena_mutex;
int g_workers = 0;
std::unique_ptr<tbb::task_arena> g_arena;
}  // namespace

void set_worker_count(int workers) {
    if (workers < 0) throw std::invalid_argument("worker count must be non-negative");
    std::lock_guard<std::mutex> lock(g_arena_mutex);
    g_workers = workers;
    g_arena.reset();
}

int worker_count() {
    if (g_workers > 0) return g_workers;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

tbb::task_arena& arena() {
    std::lock_guard<std::mutex> lock(g_arena_mutex);
    if (!g_arena) g_arena = std::make_unique<tbb::task_arena>(worker_count());
    return *g_arena;
}

void request_cancel() { g_cancel.store(true); }
void clear_cancel() { g_cancel.store(false); }
bool cancel_requested() { return g_cancel.load(std::memory_order_relaxed); }

}  // namespace fio
