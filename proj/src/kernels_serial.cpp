#include "augdist/kernels.hpp"

namespace augdist::kernels::serial {

Nearest nearest(const double* rows, std::size_t count, std::size_t dim, const double* query) {
  Nearest best;
  for (std::size_t i = 0; i < count; ++i) {
    const double d = squared_distance(rows + i * dim, query, dim);
    if (d < best.distance_sq) best = {d, i};
  }
  return best;
}

void min_distances_sq(const double* a, std::size_t na, const double* b, std::size_t nb, std::size_t dim, double* out) {
  for (std::size_t i = 0; i < na; ++i) out[i] = nearest(b, nb, dim, a + i * dim).distance_sq;
}

void column_means(const double* rows, std::size_t count, std::size_t dim, double* out) {
  for (std::size_t d = 0; d < dim; ++d) out[d] = 0.0;
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t d = 0; d < dim; ++d) out[d] += rows[i * dim + d];
  for (std::size_t d = 0; d < dim; ++d) out[d] /= static_cast<double>(count);
}

}  // namespace augdist::kernels::serial
