// Microbenchmarks for the hot paths: amplitude discretization, the
// entanglement diagnostics (which scale with the bipartition count), and a
// full collapse.

#include <benchmark/benchmark.h>

#include <random>

#include "cmqm/collapse.hpp"
#include "cmqm/entanglement.hpp"
#include "cmqm/hilbert.hpp"
#include "cmqm/state.hpp"

namespace {

cmqm::MultipartiteState random_qubits(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    cmqm::MultipartiteState s;
    s.dims.assign(n, 2);
    std::size_t d = std::size_t{1} << n;
    s.amplitudes.reserve(d);
    double n2 = 0;
    for (std::size_t i = 0; i < d; ++i) {
        cmqm::cplx a{gauss(rng), gauss(rng)};
        n2 += std::norm(a);
        s.amplitudes.push_back(a);
    }
    double inv = 1.0 / std::sqrt(n2);
    for (cmqm::cplx& a : s.amplitudes) a *= inv;
    return s;
}

void bm_discretize(benchmark::State& state) {
    std::mt19937_64 rng(1);
    std::size_t n = static_cast<std::size_t>(state.range(0));
    cmqm::MultipartiteState s = random_qubits(n, rng);
    cmqm::ResolutionParams res(50);
    for (auto _ : state) {
        benchmark::DoNotOptimize(cmqm::discretize(s, res));
    }
    state.SetComplexityN(static_cast<benchmark::IterationCount>(1) << n);
}
BENCHMARK(bm_discretize)->DenseRange(4, 14, 2)->Complexity(benchmark::oN);

void bm_chi(benchmark::State& state) {
    std::mt19937_64 rng(2);
    std::size_t n = static_cast<std::size_t>(state.range(0));
    cmqm::MultipartiteState s = random_qubits(n, rng);
    cmqm::ResolutionParams res(40);
    for (auto _ : state) {
        benchmark::DoNotOptimize(cmqm::chi(s, res));
    }
}
BENCHMARK(bm_chi)->DenseRange(2, 10, 1);

void bm_xi(benchmark::State& state) {
    std::mt19937_64 rng(3);
    std::size_t n = static_cast<std::size_t>(state.range(0));
    cmqm::MultipartiteState s = random_qubits(n, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(cmqm::xi(s));
    }
}
BENCHMARK(bm_xi)->DenseRange(2, 10, 1);

void bm_collapse(benchmark::State& state) {
    std::size_t n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 state_rng(4);
    cmqm::MultipartiteState s = random_qubits(n, state_rng);
    cmqm::ResolutionParams res(40);
    std::mt19937_64 rng(5);
    for (auto _ : state) {
        auto [post, ev] = cmqm::collapse(s, res, rng, /*allow_stable=*/true);
        benchmark::DoNotOptimize(post);
    }
}
BENCHMARK(bm_collapse)->DenseRange(2, 6, 1);

}  // namespace

BENCHMARK_MAIN();
