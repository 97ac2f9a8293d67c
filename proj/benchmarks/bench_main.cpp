#include <benchmark/benchmark.h>

#include "fineq/bessel_certify.hpp"
#include "fineq/best_constants.hpp"
#include "fineq/moser.hpp"
#include "fineq/transport.hpp"
#include "fineq/verifier.hpp"
#include "fineq/weight_dsl.hpp"

using namespace fineq;

static void BM_ParseWeight(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(parse_weight("1/(4*pow(r,2)*pow(log(2.718281828/r),2))"));
}
BENCHMARK(BM_ParseWeight);

static void BM_CertifyHi(benchmark::State& state) {
  WeightExpr one = builtin("one");
  for (auto _ : state) benchmark::DoNotOptimize(is_hi_potential(one, 2.405));
}
BENCHMARK(BM_CertifyHi)->Unit(benchmark::kMicrosecond);

static void BM_BetaBisection(benchmark::State& state) {
  WeightExpr one(Expr::constant(1.0));
  BetaOptions opt;
  opt.cross_check = false;
  for (auto _ : state) benchmark::DoNotOptimize(beta_constant(one, 3, 1.0, opt));
}
BENCHMARK(BM_BetaBisection)->Unit(benchmark::kMillisecond);

static void BM_HardyRayleigh(benchmark::State& state) {
  const auto form = QuadraticForm::hardy_quotient(3, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(rayleigh_minimize(form, int(state.range(0))));
}
BENCHMARK(BM_HardyRayleigh)->RangeMultiplier(2)->Range(256, 2048)->Unit(benchmark::kMillisecond);

static void BM_ImprovedHardyFamily(benchmark::State& state) {
  WeightExpr one(Expr::constant(1.0));
  auto family = profile_family(1.0);
  for (auto _ : state)
    for (const auto& u : family) benchmark::DoNotOptimize(check_improved_hardy(one, u, 3, 1.0));
}
BENCHMARK(BM_ImprovedHardyFamily)->Unit(benchmark::kMillisecond);

static void BM_Wasserstein(benchmark::State& state) {
  auto a = DensityGrid::gaussian(0.0, 1.0, int(state.range(0))), b = DensityGrid::gaussian(1.0, 0.5, int(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(wasserstein_1d(a, b));
}
BENCHMARK(BM_Wasserstein)->Arg(1001)->Arg(4001)->Unit(benchmark::kMicrosecond);

static void BM_Legendre(benchmark::State& state) {
  GridFunction f;
  for (int i = 0; i < state.range(0); ++i) {
    f.x.push_back(-4.0 + 8.0 * i / double(state.range(0) - 1));
    f.v.push_back(0.5 * f.x.back() * f.x.back());
  }
  auto y = dual_grid(f);
  for (auto _ : state) benchmark::DoNotOptimize(legendre(f, y));
}
BENCHMARK(BM_Legendre)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);

static void BM_OnofriDescent(benchmark::State& state) {
  MoserOptions opt;
  opt.cells = int(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(minimize_I_alpha(1.0, opt));
}
BENCHMARK(BM_OnofriDescent)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

static void BM_GhigiPhi(benchmark::State& state) {
  auto u = ConvexFunction::sample([](double x) { return x * x; }, int(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ghigi_phi(u));
}
BENCHMARK(BM_GhigiPhi)->Arg(41)->Arg(401)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
