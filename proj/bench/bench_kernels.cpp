#include <benchmark/benchmark.h>

#include <random>

#include "vvot/kernels.hpp"
#include "vvot/lifted.hpp"
#include "vvot/pde.hpp"
#include "vvot/verify.hpp"

using namespace vvot;

namespace {

struct ProxInput {
  DualBlocks blocks;
  std::vector<double> offset, y;
};

ProxInput prox_input(int scale) {
  ProxInput in;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2.0, 2.0), w(0.05, 3.0);
  for (int k = 0; k < 4 * scale; ++k) in.blocks.face_weight.push_back(w(rng));
  for (int k = 0; k < 2 * scale; ++k) in.blocks.edge_weight.push_back(w(rng));
  in.blocks.sign_count = scale;
  in.offset.resize(in.blocks.size());
  in.y.resize(in.blocks.size());
  for (auto& v : in.offset) v = u(rng);
  for (auto& v : in.y) v = u(rng);
  return in;
}

template <auto Kernel>
void dual_prox(benchmark::State& state) {
  const auto in = prox_input(static_cast<int>(state.range(0)));
  const auto f = Interpolation::geometric();
  for (auto _ : state) {
    auto y = in.y;
    benchmark::DoNotOptimize(Kernel(in.blocks, f, 0.7, in.offset, y));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(in.blocks.count()));
}

template <auto Rhs>
void pde_rhs(benchmark::State& state) {
  const auto pc = confinement_case(1.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Rhs(pc.init, pc.cfg));
}

template <auto Pairwise>
void lot_pairwise(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::vector<DiscreteVectorMeasure> data;
  for (int k = 0; k < state.range(0); ++k) data.push_back(random_measure(rng, 2));
  const auto ref = sample_reference(64, 2, 1, 3);
  const auto metric = SimplexMetric::euclidean(2);
  for (auto _ : state) benchmark::DoNotOptimize(Pairwise(ref, data, metric));
}

}  // namespace

BENCHMARK(dual_prox<dual_prox_serial>)->Name("dual_prox/serial")->Arg(1 << 12)->Arg(1 << 15);
BENCHMARK(dual_prox<dual_prox_parallel>)->Name("dual_prox/parallel")->Arg(1 << 12)->Arg(1 << 15);
BENCHMARK(pde_rhs<rhs_serial>)->Name("pde_rhs/serial")->Arg(64)->Arg(512);
BENCHMARK(pde_rhs<rhs>)->Name("pde_rhs/parallel")->Arg(64)->Arg(512);
BENCHMARK(lot_pairwise<pairwise_matrix_serial>)->Name("lot_pairwise/serial")->Arg(16);
BENCHMARK(lot_pairwise<pairwise_matrix>)->Name("lot_pairwise/parallel")->Arg(16);

BENCHMARK_MAIN();
