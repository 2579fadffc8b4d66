#pragma once

#include <cstddef>
#include <functional>

namespace cspec {

/// Worker count: CRYSTAL_SPECTRA_THREADS when set to a positive integer,
/// otherwise std::thread::hardware_concurrency().
std::size_t thread_count();

/// Calls fn(i) for i in [0, n) over contiguous blocks, one block per worker.
/// Results must be written by index; the first exception (lowest block) is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace cspec
