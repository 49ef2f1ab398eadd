#include "csdk/config.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace csdk {

namespace {

int default_threads() {
  if (const char* env = std::getenv("CSDK_THREADS")) {
    try {
      const int t = std::stoi(env);
      if (t > 0) return t;
    } catch (const std::exception&) {
      // fall through to the OpenMP default
    }
  }
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

std::atomic<int>& limit() {
  static std::atomic<int> value{default_threads()};
  return value;
}

}  // namespace

int thread_limit() { return limit().load(std::memory_order_relaxed); }

void set_thread_limit(int threads) { limit().store(threads > 0 ? threads : 1); }

}  // namespace csdk
