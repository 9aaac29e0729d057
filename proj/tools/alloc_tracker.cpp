#include "alloc_tracker.hpp"

#include <malloc.h>

#include <atomic>
#include <cerrno>
#include <cstdlib>

// glibc exposes its real allocator under __libc_* aliases, so defining the
// standard entry points here overrides them for the whole binary without
// dlsym bootstrapping (which would itself allocate).
extern "C" {
void* __libc_malloc(size_t size);
void __libc_free(void* ptr);
void* __libc_calloc(size_t nmemb, size_t size);
void* __libc_realloc(void* ptr, size_t size);
void* __libc_memalign(size_t alignment, size_t size);
}

namespace {

std::atomic<long long> g_live{0};
std::atomic<long long> g_peak{0};

void account(long long delta) {
  const long long live = g_live.fetch_add(delta, std::memory_order_relaxed) + delta;
  if (delta <= 0) return;
  long long peak = g_peak.load(std::memory_order_relaxed);
  while (live > peak &&
         !g_peak.compare_exchange_weak(peak, live, std::memory_order_relaxed)) {
  }
}

}  // namespace

namespace memtrack {

void reset_peak() { g_peak.store(g_live.load()); }

std::size_t peak_bytes() {
  const long long v = g_peak.load();
  return v > 0 ? static_cast<std::size_t>(v) : 0;
}

std::size_t live_bytes() {
  const long long v = g_live.load();
  return v > 0 ? static_cast<std::size_t>(v) : 0;
}

}  // namespace memtrack

extern "C" {

void* malloc(size_t size) {
  void* p = __libc_malloc(size);
  if (p) account(static_cast<long long>(malloc_usable_size(p)));
  return p;
}

void free(void* ptr) {
  if (ptr) account(-static_cast<long long>(malloc_usable_size(ptr)));
  __libc_free(ptr);
}

void* calloc(size_t nmemb, size_t size) {
  void* p = __libc_calloc(nmemb, size);
  if (p) account(static_cast<long long>(malloc_usable_size(p)));
  return p;
}

void* realloc(void* ptr, size_t size) {
  const long long before = ptr ? static_cast<long long>(malloc_usable_size(ptr)) : 0;
  void* p = __libc_realloc(ptr, size);
  if (p) {
    account(static_cast<long long>(malloc_usable_size(p)) - before);
  } else if (size == 0) {
    account(-before);
  }
  return p;
}

void* memalign(size_t alignment, size_t size) {
  void* p = __libc_memalign(alignment, size);
  if (p) account(static_cast<long long>(malloc_usable_size(p)));
  return p;
}

void* aligned_alloc(size_t alignment, size_t size) {
  void* p = __libc_memalign(alignment, size);
  if (p) account(static_cast<long long>(malloc_usable_size(p)));
  return p;
}

int posix_memalign(void** memptr, size_t alignment, size_t size) {
  if (alignment % sizeof(void*) != 0 || (alignment & (alignment - 1)) != 0) return EINVAL;
  void* p = __libc_memalign(alignment, size);
  if (!p) return ENOMEM;
  account(static_cast<long long>(malloc_usable_size(p)));
  *memptr = p;
  return 0;
}

}  // extern "C"
