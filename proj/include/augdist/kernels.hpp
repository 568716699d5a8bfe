#pragma once

#include <cstddef>
#include <limits>

// Hot loops of the distance computations over row-major sample matrices.
// `serial` is the reference; `omp` must return bit-identical results for any
// thread count. Squared distances are always accumulated over dimensions in
// index order, so every element's distance is computed identically by both.

namespace augdist::kernels {

struct Nearest {
  double distance_sq = std::numeric_limits<double>::infinity();
  std::size_t index = 0;  // lowest index among ties
};

inline double squared_distance(const double* a, const double* b, std::size_t dim) noexcept {
  double s = 0.0;
  for (std::size_t d = 0; d < dim; ++d) {
    const double diff = a[d] - b[d];
    s += diff * diff;
  }
  return s;
}

inline bool better(const Nearest& a, const Nearest& b) noexcept {
  return a.distance_sq < b.distance_sq || (a.distance_sq == b.distance_sq && a.index < b.index);
}

namespace serial {
/// Nearest row of `rows` (count x dim) to `query`. count must be > 0.
Nearest nearest(const double* rows, std::size_t count, std::size_t dim, const double* query);
/// out[i] = min_j ||a_i - b_j||^2 for every row of a.
void min_distances_sq(const double* a, std::size_t na, const double* b, std::size_t nb, std::size_t dim, double* out);
/// out[d] = mean over rows of rows[., d], summed in row order.
void column_means(const double* rows, std::size_t count, std::size_t dim, double* out);
}  // namespace serial

namespace omp {
Nearest nearest(const double* rows, std::size_t count, std::size_t dim, const double* query);
void min_distances_sq(const double* a, std::size_t na, const double* b, std::size_t nb, std::size_t dim, double* out);
void column_means(const double* rows, std::size_t count, std::size_t dim, double* out);
}  // namespace omp

}  // namespace augdist::kernels
