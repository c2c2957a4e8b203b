#include <benchmark/benchmark.h>

#include <random>

#include "uhl/kernels.hpp"
#include "uhl/linalg.hpp"

using namespace uhl;

namespace {

Vec random_state(int n, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Vec v(1L << n);
    for (long i = 0; i < v.size(); ++i) v(i) = cd(nd(rng), nd(rng));
    v /= v.norm();
    return v;
}

void bm_unitary_serial(benchmark::State& st) {
    int n = static_cast<int>(st.range(0));
    std::mt19937_64 rng(7);
    Mat u = random_unitary(4, rng);
    Vec v = random_state(n, 11);
    for (auto _ : st) {
        kernels::apply_unitary_serial(v, u, {0, n / 2});
        benchmark::DoNotOptimize(v.data());
    }
    st.SetItemsProcessed(st.iterations() * (1L << n));
}

void bm_unitary_omp(benchmark::State& st) {
    int n = static_cast<int>(st.range(0));
    std::mt19937_64 rng(7);
    Mat u = random_unitary(4, rng);
    Vec v = random_state(n, 11);
    for (auto _ : st) {
        kernels::apply_unitary_omp(v, u, {0, n / 2});
        benchmark::DoNotOptimize(v.data());
    }
    st.SetItemsProcessed(st.iterations() * (1L << n));
}

void bm_kraus_serial(benchmark::State& st) {
    int n = static_cast<int>(st.range(0));
    std::mt19937_64 rng(3);
    std::vector<Mat> kraus{std::sqrt(0.9) * random_unitary(4, rng),
                           std::sqrt(0.1) * random_unitary(4, rng)};
    Vec v = random_state(n, 5);
    Mat rho = v * v.adjoint();
    for (auto _ : st) {
        kernels::apply_kraus_serial(rho, kraus, {0, n - 1});
        benchmark::DoNotOptimize(rho.data());
    }
}

void bm_kraus_omp(benchmark::State& st) {
    int n = static_cast<int>(st.range(0));
    std::mt19937_64 rng(3);
    std::vector<Mat> kraus{std::sqrt(0.9) * random_unitary(4, rng),
                           std::sqrt(0.1) * random_unitary(4, rng)};
    Vec v = random_state(n, 5);
    Mat rho = v * v.adjoint();
    for (auto _ : st) {
        kernels::apply_kraus_omp(rho, kraus, {0, n - 1});
        benchmark::DoNotOptimize(rho.data());
    }
}

}  // namespace

BENCHMARK(bm_unitary_serial)->Arg(12)->Arg(16)->Arg(20);
BENCHMARK(bm_unitary_omp)->Arg(12)->Arg(16)->Arg(20);
BENCHMARK(bm_kraus_serial)->Arg(5)->Arg(8)->Arg(10);
BENCHMARK(bm_kraus_omp)->Arg(5)->Arg(8)->Arg(10);

BENCHMARK_MAIN();
