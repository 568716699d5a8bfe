#include <omp.h>

#include <algorithm>
#include <vector>

#include "augdist/kernels.hpp"

namespace augdist::kernels::omp {

// Partition-then-min: each thread scans a contiguous block, then the block
// winners are merged with the same (distance, index) order as the serial scan.
Nearest nearest(const double* rows, std::size_t count, std::size_t dim, const double* query) {
  std::vector<Nearest> partial(static_cast<std::size_t>(omp_get_max_threads()));
#pragma omp parallel
  {
    Nearest best;
    const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const double d = squared_distance(rows + i * dim, query, dim);
      if (d < best.distance_sq) best = {d, static_cast<std::size_t>(i)};
    }
    partial[static_cast<std::size_t>(omp_get_thread_num())] = best;
  }
  Nearest best;
  for (const auto& p : partial) {
    if (better(p, best)) best = p;
  }
  return best;
}

void min_distances_sq(const double* a, std::size_t na, const double* b, std::size_t nb, std::size_t dim, double* out) {
  const auto n = static_cast<std::ptrdiff_t>(na);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = serial::nearest(b, nb, dim, a + i * dim).distance_sq;
}

// Parallel over blocks of columns; within a block rows are walked in order,
// so each column is summed exactly as in the serial kernel.
void column_means(const double* rows, std::size_t count, std::size_t dim, double* out) {
  constexpr std::size_t block = 32;
  const auto nblocks = static_cast<std::ptrdiff_t>((dim + block - 1) / block);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < nblocks; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * block, hi = std::min(dim, lo + block);
    double acc[block] = {};
    for (std::size_t i = 0; i < count; ++i) {
      const double* row = rows + i * dim;
      for (std::size_t d = lo; d < hi; ++d) acc[d - lo] += row[d];
    }
    for (std::size_t d = lo; d < hi; ++d) out[d] = acc[d - lo] / static_cast<double>(count);
  }
}

}  // namespace augdist::kernels::omp
