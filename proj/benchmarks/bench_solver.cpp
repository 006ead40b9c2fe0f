#include <benchmark/benchmark.h>

#include "mdst/oracle.hpp"
#include "mdst/solver.hpp"

namespace {

using mdst::GenFamily;
using mdst::GenSpec;
using mdst::Graph;
using mdst::SolveResult;

Graph make_gnm(long long n, long long m_factor, std::uint64_t seed) {
    GenSpec spec;
    spec.family = GenFamily::gnm;
    spec.n = static_cast<mdst::Node>(n);
    spec.m = m_factor * n;
    spec.seed = seed;
    return mdst::generate(spec);
}

void report(benchmark::State& state, const Graph& graph, const SolveResult& result) {
    state.counters["n"] = static_cast<double>(graph.node_count());
    state.counters["m"] = static_cast<double>(graph.edge_count());
    state.counters["edge_scans"] = static_cast<double>(result.counters.edge_scans);
    state.counters["witness_replays"] = static_cast<double>(result.counters.witness_replays);
    state.counters["ancestor_hops"] = static_cast<double>(result.counters.ancestor_hops);
    state.counters["total_work"] = static_cast<double>(result.counters.total());
    state.counters["max_degree"] = static_cast<double>(result.max_degree);
}

int gnm_bound(const Graph& graph) {
    long long n = graph.node_count();
    long long m = graph.edge_count();
    return static_cast<int>(std::max<long long>(2, (2 * m + n - 1) / n));
}

void BM_solve_fast_gnm(benchmark::State& state) {
    Graph graph = make_gnm(state.range(0), 4, 1);
    std::vector<int> bounds(static_cast<std::size_t>(graph.node_count()), gnm_bound(graph));
    SolveResult result;
    for (auto _ : state) {
        result = mdst::solve_fast(graph, bounds);
        benchmark::DoNotOptimize(result.max_degree);
    }
    report(state, graph, result);
}
BENCHMARK(BM_solve_fast_gnm)->RangeMultiplier(4)->Range(1 << 10, 1 << 14)->Unit(benchmark::kMillisecond);

void BM_solve_fr_gnm(benchmark::State& state) {
    Graph graph = make_gnm(state.range(0), 4, 1);
    std::vector<int> bounds(static_cast<std::size_t>(graph.node_count()), gnm_bound(graph));
    SolveResult result;
    for (auto _ : state) {
        result = mdst::solve_fr(graph, bounds);
        benchmark::DoNotOptimize(result.max_degree);
    }
    report(state, graph, result);
}
BENCHMARK(BM_solve_fr_gnm)
    ->RangeMultiplier(4)
    ->Range(1 << 10, 1 << 14)
    ->Unit(benchmark::kMillisecond)
    ->Iterations(1);

void BM_solve_fast_grid(benchmark::State& state) {
    GenSpec spec;
    spec.family = GenFamily::grid;
    spec.n = static_cast<mdst::Node>(state.range(0));
    Graph graph = mdst::generate(spec);
    std::vector<int> bounds(static_cast<std::size_t>(graph.node_count()), 3);
    SolveResult result;
    for (auto _ : state) {
        result = mdst::solve_fast(graph, bounds);
        benchmark::DoNotOptimize(result.max_degree);
    }
    report(state, graph, result);
}
BENCHMARK(BM_solve_fast_grid)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_solve_fast_lot(benchmark::State& state) {
    GenSpec spec;
    spec.family = GenFamily::lot;
    spec.q = static_cast<int>(state.range(0));
    Graph graph = mdst::generate(spec);
    std::vector<int> bounds(static_cast<std::size_t>(graph.node_count()), 3);
    SolveResult result;
    for (auto _ : state) {
        result = mdst::solve_fast(graph, bounds);
        benchmark::DoNotOptimize(result.max_degree);
    }
    report(state, graph, result);
}
BENCHMARK(BM_solve_fast_lot)->DenseRange(4, 7)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
