#pragma once

#include <cstddef>
#include <functional>

namespace aerialsim {

/// Runs fn(begin, end) over disjoint chunks of [0, count) on at most `workers`
/// threads. workers <= 1 runs inline on the caller.
void parallel_for_envs(std::size_t count, int workers,
                       const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace aerialsim
