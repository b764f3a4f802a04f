#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "charkern/abelian_group.hpp"
#include "charkern/kernel.hpp"
#include "charkern/spectral.hpp"
#include "charkern/sphere.hpp"

using namespace charkern;

namespace {

KernelSpec random_kernel(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = g(rng);
  Eigen::MatrixXd k = a.transpose() * a;
  k = 0.5 * (k + k.transpose()).eval();
  return {std::make_shared<const DiscreteSpace>(DiscreteSpace::indexed(n)), k};
}

SignedMeasure uniform(const KernelSpec& k) { return SignedMeasure::reference(k.space_ptr()); }

}  // namespace

static void BM_KernelScore(benchmark::State& state) {
  const KernelSpec k = random_kernel(static_cast<std::size_t>(state.range(0)), 1);
  const SignedMeasure p = uniform(k);
  for (auto _ : state) benchmark::DoNotOptimize(kernel_score(k, p, std::size_t{0}));
}
BENCHMARK(BM_KernelScore)->RangeMultiplier(4)->Range(16, 1024);

static void BM_Verdict(benchmark::State& state) {
  const KernelSpec k = random_kernel(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(verdict(k));
}
BENCHMARK(BM_Verdict)->RangeMultiplier(4)->Range(16, 256);

static void BM_MercerDecompose(benchmark::State& state) {
  const KernelSpec k = random_kernel(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(mercer_decompose(k));
}
BENCHMARK(BM_MercerDecompose)->RangeMultiplier(4)->Range(16, 256);

static void BM_RealOnb(benchmark::State& state) {
  const group::GroupSpec g({static_cast<int>(state.range(0))});
  for (auto _ : state) benchmark::DoNotOptimize(group::real_onb(g));
}
BENCHMARK(BM_RealOnb)->RangeMultiplier(4)->Range(16, 1024);

static void BM_SchoenbergCoeffs(benchmark::State& state) {
  const int n_max = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(sphere::schoenberg_coeffs([](double th) { return std::exp(std::cos(th)); }, 2, n_max));
  }
}
BENCHMARK(BM_SchoenbergCoeffs)->DenseRange(8, 32, 8);

static void BM_ZonalEmbed(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  sphere::SchoenbergKernel sk;
  sk.d = 2;
  for (int i = 0; i <= n; ++i) sk.b.push_back(std::ldexp(1.0, -i));
  const sphere::SphereGrid grid = sphere::SphereGrid::for_degree(2, 2 * n);
  Eigen::VectorXd v0 = Eigen::Vector3d(0.0, 0.0, 1.0);
  for (auto _ : state) {
    const sphere::PnaDensity p = sphere::pna_density(grid, n, 0.5, v0, n);
    benchmark::DoNotOptimize(sphere::zonal_embed(sk, p.coeffs));
  }
}
BENCHMARK(BM_ZonalEmbed)->DenseRange(4, 16, 4);
BENCHMARK_MAIN();
