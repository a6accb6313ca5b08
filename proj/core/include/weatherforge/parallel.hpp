#pragma once

#include <cstddef>
#include <functional>

namespace weatherforge {

// Runs fn(0..count-1) on a pool of `jobs` worker threads. jobs <= 0 means
// hardware concurrency. Tasks must be independent; the first exception is
// rethrown on the calling thread after all workers join.
void parallel_for(std::size_t count, int jobs,
                  const std::function<void(std::size_t)>& fn);

int default_job_count();

}  // namespace weatherforge
