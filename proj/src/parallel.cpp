#include "aerialsim/parallel.hpp"

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

namespace aerialsim {

void parallel_for_envs(std::size_t count, int workers,
                       const std::function<void(std::size_t, std::size_t)>& fn) {
  if (count == 0) return;
  if (workers <= 1) {
    fn(0, count);
    return;
  }
  tbb::task_arena arena(workers);
  arena.execute([&] {
    const std::size_t grain = std::max<std::size_t>(1, count / (4 * static_cast<std::size_t>(workers)));
    tbb::parallel_for(tbb::blocked_range<std::size_t>(0, count, grain),
                      [&](const tbb::blocked_range<std::size_t>& r) { fn(r.begin(), r.end()); });
  });
}

}  // namespace aerialsim
