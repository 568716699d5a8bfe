#pragma once

#include <atomic>
#include <cstddef>
#include <exception>

namespace augdist::detail {

// OpenMP loop over [0, n) that rethrows the first exception raised by a body.
// Once a body has failed, the remaining bodies are skipped.
template <class Body>
void parallel_for(std::size_t n, Body body) {
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    if (failed.load(std::memory_order_relaxed)) continue;
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(augdist_parallel_failure)
      if (!failure) failure = std::current_exception();
      failed.store(true, std::memory_order_relaxed);
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace augdist::detail
