#include "mvsc/common.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <thread>
#include <vector>

#include "parallel.hpp"

namespace mvsc {

namespace {

void default_warn_sink(const std::string& message) {
  std::cerr << "warning: " << message << "\n";
}

std::atomic<void (*)(const std::string&)> g_warn_sink{&default_warn_sink};
std::atomic<int> g_thread_cap{0};

int resolve_default_threads() {
  if (const char* env = std::getenv("MVSC_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<int>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace

void warn(const std::string& message) { g_warn_sink.load()(message); }

void set_warn_sink(void (*sink)(const std::string&)) {
  g_warn_sink.store(sink ? sink : &default_warn_sink);
}

void set_thread_cap(int threads) { g_thread_cap.store(threads > 0 ? threads : 0); }

int thread_cap() {
  int cap = g_thread_cap.load();
  return cap > 0 ? cap : resolve_default_threads();
}

namespace detail {

void run_chunks(Index count, Index chunk_size,
                const std::function<void(Index, Index, Index)>& fn) {
  const Index nchunks = chunk_count(count, chunk_size);
  if (nchunks == 0) return;

  auto body = [&](Index c) {
    const Index begin = c * chunk_size;
    const Index end = std::min(count, begin + chunk_size);
    fn(c, begin, end);
  };

  const int workers = static_cast<int>(std::min<Index>(thread_cap(), nchunks));
  if (workers <= 1) {
    for (Index c = 0; c < nchunks; ++c) body(c);
    return;
  }

  std::atomic<Index> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (Index c = next.fetch_add(1); c < nchunks; c = next.fetch_add(1)) {
      if (failed.load()) return;
      try {
        body(c);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace detail

}  // namespace mvsc
