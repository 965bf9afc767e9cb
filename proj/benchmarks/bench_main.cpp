#include <benchmark/benchmark.h>

#include "gvpj/discrete_operators.hpp"
#include "gvpj/kernels.hpp"
#include "gvpj/prediction.hpp"
#include "gvpj/verification.hpp"
#include "gvpj/wiener_hopf.hpp"

namespace {

using namespace gvpj;

void BM_FbmKernelQuadrature(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(fbm_kernel(1.0, 0.37, 0.75, 1e-12).value);
}
BENCHMARK(BM_FbmKernelQuadrature);

void BM_FbmKernelHypergeometric(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(fbm_kernel_hypergeometric(1.0, 0.37, 0.75));
}
BENCHMARK(BM_FbmKernelHypergeometric);

// The kernel table is cached per H, so this measures operator assembly.
void BM_BuildOperator(benchmark::State& state) {
  const TimeGrid g = TimeGrid::uniform(1.0, static_cast<std::size_t>(state.range(0)));
  auto model = std::make_shared<FbmModel>(0.75);
  for (auto _ : state) benchmark::DoNotOptimize(build_operator(model, g).B.data());
}
BENCHMARK(BM_BuildOperator)->Arg(128)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_AdjointInvert(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const DiscreteOperator op = build_operator(std::make_shared<FbmModel>(0.75), TimeGrid::uniform(1.0, n));
  const std::vector<double> g(n, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(adjoint_invert(op, g).data());
}
BENCHMARK(BM_AdjointInvert)->Arg(128)->Arg(512)->Arg(2048)->Unit(benchmark::kMicrosecond);

void BM_SolveWienerHopf(benchmark::State& state) {
  const TimeGrid g = TimeGrid::uniform(1.0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_wiener_hopf(g, 0.75).Ktilde.data());
}
BENCHMARK(BM_SolveWienerHopf)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_ClosedFormPsi(benchmark::State& state) {
  const DiscreteOperator op = build_operator(std::make_shared<FbmModel>(0.75), TimeGrid::uniform(1.0, 128));
  for (auto _ : state) benchmark::DoNotOptimize(discrete_psi(op, 0.75, 0.5, PsiMethod::closed_form).data());
}
BENCHMARK(BM_ClosedFormPsi)->Unit(benchmark::kMillisecond);

void BM_MixedDensity(benchmark::State& state) {
  auto op = std::make_shared<const DiscreteOperator>(
      build_operator(std::make_shared<FbmModel>(0.75), TimeGrid::uniform(1.0, 128)));
  const JumpSpec spec = state.range(0) == 0 ? JumpSpec(5.0, NormalJumps{0.1, 0.04})
                                            : JumpSpec(5.0, TwoPointJumps{-0.25, 0.4, 0.4});
  const MixedPath obs = simulate_mixed(*op, spec, 1);
  for (auto _ : state) benchmark::DoNotOptimize(mixed_conditional_density(op, spec, obs, 0.5, 0.75).m_hat);
  state.SetLabel(state.range(0) == 0 ? "normal" : "two_point");
}
BENCHMARK(BM_MixedDensity)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_MonteCarloContinuations(benchmark::State& state) {
  const DiscreteOperator op = build_operator(std::make_shared<FbmModel>(0.75), TimeGrid::uniform(1.0, 128));
  const JumpSpec spec(5.0, NormalJumps{0.1, 0.04});
  const MixedPath obs = simulate_mixed(op, spec, 1);
  const auto threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mc_conditional_sample(op, spec, obs, 0.5, 0.75, 100000, 2, threads).data());
}
BENCHMARK(BM_MonteCarloContinuations)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

// The packaged benchmark_main archive is LTO bytecode from another compiler release.
BENCHMARK_MAIN();
