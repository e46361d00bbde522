// Serial references against the OpenMP kernels on pipeline-sized inputs.

#include "lrdeblur/convops.hpp"
#include "lrdeblur/nonblind.hpp"
#include "lrdeblur/serial.hpp"
#include "lrdeblur/synth.hpp"
#include "lrdeblur/xstep.hpp"

#include <benchmark/benchmark.h>

#include <map>
#include <random>

using namespace lrd;

namespace {

Matrix random_image(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
    return m;
}

const Matrix& kernel_for(int L) {
    static std::map<int, Matrix> cache;
    auto it = cache.find(L);
    if (it == cache.end()) it = cache.emplace(L, motion_kernel(L, 1).weights()).first;
    return it->second;
}

void BM_conv2(benchmark::State& st, bool parallel) {
    const Matrix x = random_image(static_cast<int>(st.range(0)), 1);
    const Matrix& k = kernel_for(static_cast<int>(st.range(1)));
    for (auto _ : st)
        benchmark::DoNotOptimize(parallel ? conv2_direct(x, k, BoundaryMode::ZeroPad)
                                          : serial::conv2_direct(x, k, BoundaryMode::ZeroPad));
}

void BM_conv2_adjoint(benchmark::State& st, bool parallel) {
    const Matrix r = random_image(static_cast<int>(st.range(0)), 2);
    const Matrix& k = kernel_for(static_cast<int>(st.range(1)));
    for (auto _ : st)
        benchmark::DoNotOptimize(parallel ? conv2_adjoint_direct(r, k, BoundaryMode::ZeroPad)
                                          : serial::conv2_adjoint_direct(r, k, BoundaryMode::ZeroPad));
}

void BM_solve_w(benchmark::State& st, bool parallel) {
    const Matrix v = random_image(static_cast<int>(st.range(0)), 3);
    for (auto _ : st)
        benchmark::DoNotOptimize(parallel ? solve_w_subproblem(v, 8.0, 2.0 / 3.0)
                                          : serial::solve_w_subproblem(v, 8.0, 2.0 / 3.0));
}

void BM_soft_threshold(benchmark::State& st, bool parallel) {
    const Matrix v = random_image(static_cast<int>(st.range(0)), 4);
    for (auto _ : st)
        benchmark::DoNotOptimize(parallel ? soft_threshold(v, 0.1) : serial::soft_threshold(v, 0.1));
}

}  // namespace

BENCHMARK_CAPTURE(BM_conv2, serial, false)->Args({128, 7})->Args({255, 15})->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_conv2, openmp, true)->Args({128, 7})->Args({255, 15})->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_conv2_adjoint, serial, false)->Args({128, 7})->Args({255, 15})->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_conv2_adjoint, openmp, true)->Args({128, 7})->Args({255, 15})->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_solve_w, serial, false)->Arg(255)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_solve_w, openmp, true)->Arg(255)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_soft_threshold, serial, false)->Arg(255)->Arg(512)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_soft_threshold, openmp, true)->Arg(255)->Arg(512)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
