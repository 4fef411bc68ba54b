#pragma once

#include <cstddef>
#include <functional>

namespace embaudit {

// Worker cap from EMBED_AUDIT_THREADS, else hardware concurrency (min 1).
std::size_t worker_count();

// Runs fn(i) for i in [0, n) across up to worker_count() threads. Each index
// is visited exactly once; callers write results to per-index slots so the
// outcome does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace embaudit
