#pragma once

#include <cstddef>
#include <functional>

namespace dissipate {

/// Worker cap from DISSIPATE_WORKERS (positive integer), else the hardware concurrency.
unsigned worker_count();

/// Runs body(i) for i in [0, count) on up to `workers` threads. Each index runs exactly once;
/// callers write results by index so the outcome does not depend on scheduling.
/// The first exception thrown by any body is rethrown after all threads join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, unsigned workers = 0);

}  // namespace dissipate
