#include "thermalign/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include <omp.h>

namespace thermalign {
namespace {

std::atomic<int> g_override{0};

int env_threads() {
  static const int value = [] {
    const char* raw = std::getenv(kThreadsEnvVar);
    if (raw == nullptr) return 0;
    try {
      return std::max(0, std::stoi(raw));
    } catch (...) {
      return 0;
    }
  }();
  return value;
}

}  // namespace

int thread_count() {
  if (const int o = g_override.load(); o > 0) return o;
  if (const int e = env_threads(); e > 0) return e;
  return omp_get_max_threads();
}

void set_thread_count(int threads) { g_override.store(threads > 0 ? threads : 0); }

}  // namespace thermalign
