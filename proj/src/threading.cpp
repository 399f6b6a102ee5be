#include "mtve/threading.hpp"

#include <atomic>
#include <mutex>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>

namespace mtve::threading {

int worker_count() {
  if (const char* env = std::getenv("MTVE_THREADS")) {
    int n = 0;
    try {
      n = std::stoi(env);
    } catch (const std::exception&) {
      throw std::runtime_error("MTVE_THREADS must be a positive integer");
    }
    if (n <= 0) throw std::runtime_error("MTVE_THREADS must be a positive integer");
    return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  int workers = worker_count();
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const std::size_t chunk = std::max<std::size_t>(1, n / (4 * workers));
  auto work = [&]() {
    try {
      while (!failed.load(std::memory_order_relaxed)) {
        std::size_t start = next.fetch_add(chunk);
        if (start >= n) return;
        std::size_t end = std::min(n, start + chunk);
        for (std::size_t i = start; i < end; ++i) fn(i);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
      failed.store(true, std::memory_order_relaxed);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace mtve::threading
