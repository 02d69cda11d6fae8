#include "segsolve/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace segsolve {

namespace {
constexpr int kMaxThreads = 64;
}

int resolve_threads(int requested) {
  int t = requested;
  if (t <= 0) {
    if (const char* env = std::getenv("SEGSOLVE_THREADS")) {
      t = std::atoi(env);
    }
  }
  if (t <= 0) {
    t = static_cast<int>(std::thread::hardware_concurrency());
  }
  return std::clamp(t, 1, kMaxThreads);
}

void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t, std::size_t)>& body) {
  if (count == 0) return;
  const std::size_t workers =
      std::min<std::size_t>(std::max(threads, 1), count);
  if (workers == 1) {
    body(0, count);
    return;
  }
  const std::size_t chunk = count / workers;
  const std::size_t extra = count % workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::size_t begin = 0;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t len = chunk + (w < extra ? 1 : 0);
    const std::size_t end = begin + len;
    pool.emplace_back([&body, begin, end] { body(begin, end); });
    begin = end;
  }
  for (std::thread& t : pool) t.join();
}

}  // namespace segsolve
