#include <benchmark/benchmark.h>

#include <random>

#include "cmp/certify.hpp"
#include "cmp/pursuit.hpp"
#include "cmp/random.hpp"
#include "cmp/restricted_solver.hpp"

using namespace cmp;

namespace {

Vec gaussian(int m, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec y(m);
  for (int i = 0; i < m; ++i) y(i) = g(rng);
  return y;
}

}  // namespace

static void BM_CmpRunFree(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const int n = 2 * m;
  std::mt19937_64 rng(1);
  const Mat a = gaussian_unit_matrix(m, n, rng);
  const ConstraintModel p = ConstraintModel::free(n);
  const Vec y = a * planted_vector(p, random_support(range_set(n), m / 4, rng), rng);
  for (auto _ : state) benchmark::DoNotOptimize(cmp_run(a, y, p));
}
BENCHMARK(BM_CmpRunFree)->Arg(16)->Arg(32)->Arg(64);

static void BM_CmpRunNonneg(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const int n = 2 * m;
  std::mt19937_64 rng(2);
  const Mat a = gaussian_unit_matrix(m, n, rng);
  const ConstraintModel p = ConstraintModel::nonneg(n);
  const Vec y = a * planted_vector(p, random_support(range_set(n), m / 4, rng), rng);
  for (auto _ : state) benchmark::DoNotOptimize(cmp_run(a, y, p));
}
BENCHMARK(BM_CmpRunNonneg)->Arg(16)->Arg(32)->Arg(64);

static void BM_Nnls(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(3);
  const Mat a = gaussian_unit_matrix(2 * n, n, rng);
  const Vec y = gaussian(2 * n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(nnls(a, y));
}
BENCHMARK(BM_Nnls)->Arg(5)->Arg(20)->Arg(50);

static void BM_Bvls(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(4);
  const Mat a = gaussian_unit_matrix(2 * n, n, rng);
  const Vec y = 3.0 * gaussian(2 * n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(bvls(a, y, Vec::Constant(n, -0.5), Vec::Constant(n, 0.5)));
}
BENCHMARK(BM_Bvls)->Arg(5)->Arg(20)->Arg(50);

static void BM_CheckFixedSupport(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  std::mt19937_64 rng(5);
  const Mat a = gaussian_unit_matrix(6, 10, rng);
  const ConstraintModel p = state.range(1) ? ConstraintModel::nonneg(10) : ConstraintModel::free(10);
  IndexSet s;
  for (int i = 0; i < k; ++i) s.push_back(i);
  CertifyOptions opt;
  opt.sample_on_failure = false;
  for (auto _ : state) benchmark::DoNotOptimize(check_fixed_support(a, s, p, opt));
}
BENCHMARK(BM_CheckFixedSupport)->Args({2, 0})->Args({3, 0})->Args({2, 1})->Args({3, 1});

static void BM_CheckFixedSupportRational(benchmark::State& state) {
  std::mt19937_64 rng(6);
  const Mat a = gaussian_unit_matrix(6, 10, rng);
  CertifyOptions opt;
  opt.mode = ArithmeticMode::Rational;
  opt.sample_on_failure = false;
  for (auto _ : state) benchmark::DoNotOptimize(check_fixed_support(a, {0, 1, 2}, ConstraintModel::nonneg(10), opt));
}
BENCHMARK(BM_CheckFixedSupportRational)->Unit(benchmark::kMillisecond);

static void BM_VerifyCounterexample(benchmark::State& state) {
  CounterexampleOptions opt;
  opt.grid_points = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(verify_counterexample(opt));
}
BENCHMARK(BM_VerifyCounterexample)->Arg(5)->Arg(17)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
