// SPDX-License-Identifier: MIT
#pragma once

#include <cstddef>
#include <functional>

namespace convint {

// Worker count: CONVINT_THREADS if set, else hardware concurrency.
int worker_count();

// Runs body(i) for i in [0, count). Each index is processed exactly once and
// independently, so results do not depend on the schedule.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace convint
