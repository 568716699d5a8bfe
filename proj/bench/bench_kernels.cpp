#include <benchmark/benchmark.h>

#include <vector>

#include "augdist/dataset.hpp"
#include "augdist/features.hpp"
#include "augdist/kernels.hpp"
#include "augdist/rng.hpp"

using namespace augdist;

namespace {

std::vector<double> random_rows(std::size_t n, std::size_t dim, std::uint64_t seed) {
  Rng rng(Seed{seed});
  std::vector<double> v(n * dim);
  for (auto& x : v) x = rng.normal();
  return v;
}

template <auto Fn>
void nearest(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0)), dim = static_cast<std::size_t>(state.range(1));
  const auto rows = random_rows(n, dim, 1), q = random_rows(1, dim, 2);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(rows.data(), n, dim, q.data()));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

template <auto Fn>
void min_distances(benchmark::State& state) {
  const std::size_t na = static_cast<std::size_t>(state.range(0)), nb = 75, dim = static_cast<std::size_t>(state.range(1));
  const auto a = random_rows(na, dim, 3), b = random_rows(nb, dim, 4);
  std::vector<double> out(na);
  for (auto _ : state) {
    Fn(a.data(), na, b.data(), nb, dim, out.data());
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(na * nb));
}

template <auto Fn>
void column_means(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0)), dim = static_cast<std::size_t>(state.range(1));
  const auto rows = random_rows(n, dim, 5);
  std::vector<double> out(dim);
  for (auto _ : state) {
    Fn(rows.data(), n, dim, out.data());
    benchmark::ClobberMemory();
  }
}

void embed_subset(benchmark::State& state) {
  const auto subset = synthetic_pool(static_cast<std::size_t>(state.range(0)), 32, 32, Seed{6});
  const auto ex = Extractor::builtin();
  for (auto _ : state) {
    EmbeddedSubset e(ex, subset);
    benchmark::DoNotOptimize(e.clean(0));
  }
}

}  // namespace

BENCHMARK(nearest<kernels::serial::nearest>)->Name("nearest/serial")->Args({100000, 78})->Args({100000, 640});
BENCHMARK(nearest<kernels::omp::nearest>)->Name("nearest/omp")->Args({100000, 78})->Args({100000, 640})->UseRealTime();
BENCHMARK(min_distances<kernels::serial::min_distances_sq>)->Name("min_distances/serial")->Args({10000, 78});
BENCHMARK(min_distances<kernels::omp::min_distances_sq>)->Name("min_distances/omp")->Args({10000, 78})->UseRealTime();
BENCHMARK(column_means<kernels::serial::column_means>)->Name("column_means/serial")->Args({100000, 640});
BENCHMARK(column_means<kernels::omp::column_means>)->Name("column_means/omp")->Args({100000, 640})->UseRealTime();
BENCHMARK(embed_subset)->Name("embed_subset")->Arg(100)->UseRealTime();

BENCHMARK_MAIN();
