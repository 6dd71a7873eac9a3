#pragma once

#include <cstddef>
#include <functional>

namespace ecggin {

/// Runs fn(i) for every i in [0, n) on up to `jobs` threads. Work items are
/// claimed in index order; the first exception thrown is rethrown after all
/// workers stop.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

/// Keeps freed buffers in the heap (glibc only). Call once at program start.
void tune_allocator() noexcept;

}  // namespace ecggin
