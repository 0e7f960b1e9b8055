#pragma once

#include <cstddef>
#include <functional>

namespace spoisson {

/// Worker count: explicit setting, else SPOISSON_THREADS, else hardware concurrency.
std::size_t worker_count();
void set_worker_count(std::size_t n);

/// Runs body(i) for i in [0, n) across workers. Each index writes only its own
/// output slot, so results do not depend on scheduling. The first exception
/// (lowest index) is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace spoisson
