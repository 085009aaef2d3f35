#include "dronearray/parallel.hpp"

#include <atomic>
#include <thread>
#include <vector>

namespace dronearray {

namespace {
std::atomic<unsigned> g_budget{0};
thread_local bool t_inside_region = false;
}  // namespace

void set_thread_budget(unsigned n) { g_budget.store(n); }

unsigned thread_budget() {
  unsigned b = g_budget.load();
  if (b == 0) {
    b = std::thread::hardware_concurrency();
    if (b == 0) b = 1;
  }
  return b;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const unsigned workers = thread_budget();
  if (n == 0) return;
  if (workers <= 1 || n == 1 || t_inside_region) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    t_inside_region = true;
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) break;
      fn(i);
    }
    t_inside_region = false;
  };
  const unsigned spawn = static_cast<unsigned>(
      std::min<std::size_t>(workers, n) - 1);
  std::vector<std::thread> pool;
  pool.reserve(spawn);
  for (unsigned t = 0; t < spawn; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
}

}  // namespace dronearray
