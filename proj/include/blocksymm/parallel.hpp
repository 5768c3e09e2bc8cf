#pragma once

#include <cstddef>
#include <functional>

namespace blocksymm {

/// Worker count from BLOCKSYMM_WORKERS, else the hardware concurrency.
/// Affects speed only: every replication writes to its own slot.
[[nodiscard]] std::size_t worker_count();

/// Runs body(i) for i in [0, count) across worker_count() threads. The first
/// exception thrown by any worker is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace blocksymm
