#pragma once

#include <cstddef>

namespace thermalign {

/// Environment variable read once to cap worker threads.
inline constexpr const char* kThreadsEnvVar = "THERMALIGN_THREADS";

/// Number of worker threads used by per-point loops.
int thread_count();

/// Overrides the worker count for the rest of the process (<= 0 restores the default).
void set_thread_count(int threads);

}  // namespace thermalign
