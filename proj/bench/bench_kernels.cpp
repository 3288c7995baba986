#include <benchmark/benchmark.h>

#include <map>
#include <numbers>

#include <omp.h>

#include "lcflow/diagnostics.hpp"
#include "lcflow/fields.hpp"
#include "lcflow/operators.hpp"
#include "lcflow/reference.hpp"

namespace {

using namespace lcflow;

struct Setup {
  ChannelGrid g;
  State s;
  SlipMatrixB B{0.5, 0.0, 0.5};
  explicit Setup(int n) : g(make_grid({n, n, n, 2.0 * std::numbers::pi, 2.0 * std::numbers::pi, 1.0})) {
    InitialConditionSpec ic;
    ic.name = "random-solenoidal";
    ic.a = 0.5;
    ic.b = 0.3;
    s = init_state(g, ic);
  }
};

const Setup& setup(int n) {
  static std::map<int, Setup> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, Setup(n)).first;
  return it->second;
}

void threads_from(benchmark::State& st) { omp_set_num_threads(static_cast<int>(st.range(1))); }

void BM_LaplacianOmp(benchmark::State& st) {
  const Setup& su = setup(static_cast<int>(st.range(0)));
  threads_from(st);
  for (auto _ : st) benchmark::DoNotOptimize(laplacian(su.s.u, su.g, su.B));
}
void BM_LaplacianSerial(benchmark::State& st) {
  const Setup& su = setup(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(reference::laplacian(su.s.u, su.g, su.B));
}

void BM_AdvectOmp(benchmark::State& st) {
  const Setup& su = setup(static_cast<int>(st.range(0)));
  threads_from(st);
  for (auto _ : st) benchmark::DoNotOptimize(advect(su.s.u, su.s.u, su.g));
}
void BM_AdvectSerial(benchmark::State& st) {
  const Setup& su = setup(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(reference::advect(su.s.u, su.s.u, su.g));
}

void BM_ElasticStressOmp(benchmark::State& st) {
  const Setup& su = setup(static_cast<int>(st.range(0)));
  threads_from(st);
  for (auto _ : st) benchmark::DoNotOptimize(elastic_stress(su.s.d, su.g));
}
void BM_ElasticStressSerial(benchmark::State& st) {
  const Setup& su = setup(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(reference::elastic_stress(su.s.d, su.g));
}

void BM_EnergyOmp(benchmark::State& st) {
  const Setup& su = setup(static_cast<int>(st.range(0)));
  threads_from(st);
  for (auto _ : st) benchmark::DoNotOptimize(energy_terms(su.s.u, su.s.d, 0.01, su.B, su.g).kinetic);
}
void BM_EnergySerial(benchmark::State& st) {
  const Setup& su = setup(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(reference::kinetic_energy(su.s.u, su.g));
}

void omp_args(benchmark::internal::Benchmark* b) {
  const int maxt = omp_get_num_procs();
  for (int n : {32, 64})
    for (int t = 1; t <= maxt; t *= 2) b->Args({n, t});
}
void serial_args(benchmark::internal::Benchmark* b) {
  for (int n : {32, 64}) b->Args({n, 1});
}

}  // namespace

BENCHMARK(BM_LaplacianOmp)->Apply(omp_args)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_LaplacianSerial)->Apply(serial_args)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_AdvectOmp)->Apply(omp_args)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_AdvectSerial)->Apply(serial_args)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ElasticStressOmp)->Apply(omp_args)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ElasticStressSerial)->Apply(serial_args)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_EnergyOmp)->Apply(omp_args)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_EnergySerial)->Apply(serial_args)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
