// Serial reference against the OpenMP kernels on dense random grids.
// Run with --benchmark_filter=... to pick a kernel; the size argument is n
// for an n x n grid.

#include <benchmark/benchmark.h>

#include <map>
#include <random>

#include "mkdual/kernels.hpp"

namespace k = mkdual::kernels;

namespace {

struct Grid {
  std::size_t n;
  std::vector<double> mass, cost, phi, psi;
};

const Grid& grid(std::size_t n) {
  static std::map<std::size_t, Grid> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::mt19937_64 rng(n);
  std::uniform_real_distribution<double> u(0, 1);
  Grid g{n, {}, {}, {}, {}};
  g.mass.resize(n * n);
  g.cost.resize(n * n);
  for (auto& v : g.mass) v = u(rng) / double(n * n);
  for (auto& v : g.cost) v = u(rng) < 0.05 ? mkdual::kInf : 4 * u(rng);
  for (std::size_t i = 0; i < n; ++i) {
    g.phi.push_back(u(rng));
    g.psi.push_back(u(rng));
  }
  return cache.emplace(n, std::move(g)).first->second;
}

template <bool Par>
void BM_PlanCost(benchmark::State& st) {
  const auto& g = grid(st.range(0));
  for (auto _ : st)
    benchmark::DoNotOptimize(Par ? k::parallel::plan_cost(g.mass, g.cost, g.n) : k::serial::plan_cost(g.mass, g.cost, g.n));
  st.SetItemsProcessed(st.iterations() * g.n * g.n);
}

template <bool Par>
void BM_PairIntegral(benchmark::State& st) {
  const auto& g = grid(st.range(0));
  for (auto _ : st)
    benchmark::DoNotOptimize(Par ? k::parallel::pair_integral(g.mass, g.phi, g.psi)
                                 : k::serial::pair_integral(g.mass, g.phi, g.psi));
  st.SetItemsProcessed(st.iterations() * g.n * g.n);
}

template <bool Par>
void BM_FeasibilityScan(benchmark::State& st) {
  const auto& g = grid(st.range(0));
  for (auto _ : st) {
    auto v = Par ? k::parallel::feasibility_scan(g.phi, g.psi, g.cost, {}, 1e-9)
                 : k::serial::feasibility_scan(g.phi, g.psi, g.cost, {}, 1e-9);
    benchmark::DoNotOptimize(v.data());
  }
  st.SetItemsProcessed(st.iterations() * g.n * g.n);
}

template <bool Par>
void BM_RectangleResidual(benchmark::State& st) {
  const auto& g = grid(st.range(0));
  for (auto _ : st)
    benchmark::DoNotOptimize(Par ? k::parallel::max_rectangle_residual(g.cost, g.n, g.n)
                                 : k::serial::max_rectangle_residual(g.cost, g.n, g.n));
}

}  // namespace

BENCHMARK(BM_PlanCost<false>)->Name("plan_cost/serial")->Arg(256)->Arg(1024)->Arg(2048);
BENCHMARK(BM_PlanCost<true>)->Name("plan_cost/parallel")->Arg(256)->Arg(1024)->Arg(2048)->UseRealTime();
BENCHMARK(BM_PairIntegral<false>)->Name("pair_integral/serial")->Arg(256)->Arg(1024)->Arg(2048);
BENCHMARK(BM_PairIntegral<true>)->Name("pair_integral/parallel")->Arg(256)->Arg(1024)->Arg(2048)->UseRealTime();
BENCHMARK(BM_FeasibilityScan<false>)->Name("feasibility_scan/serial")->Arg(256)->Arg(1024)->Arg(2048);
BENCHMARK(BM_FeasibilityScan<true>)->Name("feasibility_scan/parallel")->Arg(256)->Arg(1024)->Arg(2048)->UseRealTime();
BENCHMARK(BM_RectangleResidual<false>)->Name("rectangle_residual/serial")->Arg(32)->Arg(64);
BENCHMARK(BM_RectangleResidual<true>)->Name("rectangle_residual/parallel")->Arg(32)->Arg(64)->UseRealTime();

BENCHMARK_MAIN();
