#include "mdst/solver.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <stdexcept>

namespace mdst {

namespace {

class Timer {
  public:
    double ms() const {
        auto dt = std::chrono::steady_clock::now() - start_;
        return std::chrono::duration<double, std::milli>(dt).count();
    }

  private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void validate_bounds(const Graph& graph, std::span<const int> bounds) {
    if (static_cast<Node>(bounds.size()) != graph.node_count()) {
        throw InputError("bounds must list one value per node");
    }
    for (std::size_t v = 0; v < bounds.size(); ++v) {
        if (bounds[v] < 1) throw InputError("degree bounds must be at least 1");
    }
}

long long ceil_div(long long a, long long b) { return (a + b - 1) / b; }

// Progress floor of a completed blocking round: chains * denom * n^2 >= f^3.
bool meets_progress_floor(long long chains, long long denom, long long n, long long f) {
    unsigned __int128 lhs = static_cast<unsigned __int128>(chains) *
                            static_cast<unsigned __int128>(denom) * static_cast<unsigned __int128>(n) *
                            static_cast<unsigned __int128>(n);
    unsigned __int128 rhs = static_cast<unsigned __int128>(f) * static_cast<unsigned __int128>(f) *
                            static_cast<unsigned __int128>(f);
    return lhs >= rhs;
}

SolveResult run_two_stage(const Graph& graph, std::vector<int> bounds,
                          const SolveOptions& options, bool blocking_stage, const char* algo) {
    validate_bounds(graph, bounds);
    Timer timer;
    SolveResult result;
    result.algo = algo;
    const Node n = graph.node_count();

    Configuration config{RootedForest(graph), Decomposition{}, std::move(bounds),
                         std::vector<char>(static_cast<std::size_t>(n), 0)};
    config.forest.attach_counters(&result.counters);

    if (blocking_stage) {
        const long long gate = std::max<long long>(stage_gate(n), 20);
        while (true) {
            const int f = config.forest.component_count();
            if (f <= 1 || f < gate) break;
            RoundStats round;
            round.f = f;
            round.H = round.theta =
                static_cast<int>(ceil_div(static_cast<long long>(options.growth) * n, f));
            config.decomposition =
                theta_decomposition(config.forest, round.theta, config.bounds, &result.counters);
            std::fill(config.dirty.begin(), config.dirty.end(), 0);
            for (int ell = 1; ell <= round.H; ++ell) {
                RaiseStats rs = raise_configuration(config, ell, &result.counters, options.trace);
                round.chains_per_ell.push_back(rs.chains_applied);
                if (options.work_budget != 0 && result.counters.total() > options.work_budget) {
                    result.work_budget_hit = true;
                    break;
                }
            }
            const int applied = round.total_chains();
            const bool completed = !result.work_budget_hit;
            result.rounds.push_back(std::move(round));
            if (completed && options.assume_feasible && f >= 20 &&
                !meets_progress_floor(applied, options.progress_denominator, n, f)) {
                throw std::logic_error("blocking round fell below the feasible progress floor");
            }
            if (applied == 0 || result.work_budget_hit) break;
        }
    }

    while (config.forest.component_count() > 1) {
        if (!fr_iteration(config.forest, config.bounds, &result.counters)) {
            result.status = SolveStatus::infeasible_certified;
            result.wall_ms = timer.ms();
            return result;
        }
        ++result.fr_iterations;
    }

    result.status = SolveStatus::tree_found;
    result.tree = config.forest.forest_edges();
    result.max_degree = config.forest.max_degree();
    result.wall_ms = timer.ms();
    return result;
}

}  // namespace

int RoundStats::total_chains() const {
    return std::accumulate(chains_per_ell.begin(), chains_per_ell.end(), 0);
}

long long stage_gate(long long n) {
    if (n <= 1) return n < 1 ? 0 : 1;
    unsigned __int128 cubed = static_cast<unsigned __int128>(n) * static_cast<unsigned __int128>(n) *
                              static_cast<unsigned __int128>(n);
    // The answer is at most n^(3/4); capping the search keeps mid^4 within
    // 128 bits for every n whose cube fits there itself.
    long long lo = 1, hi = std::min(n, (1LL << 32) - 1);
    while (lo < hi) {
        long long mid = lo + (hi - lo) / 2;
        unsigned __int128 fourth = static_cast<unsigned __int128>(mid) *
                                   static_cast<unsigned __int128>(mid) *
                                   static_cast<unsigned __int128>(mid) *
                                   static_cast<unsigned __int128>(mid);
        if (fourth >= cubed) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    return lo;
}

bool fr_iteration(RootedForest& forest, std::span<const int> bounds, WorkCounters* wc) {
    if (forest.component_count() <= 1) {
        throw std::logic_error("fr_iteration: forest is already spanning");
    }
    Decomposition decomp = trivial_decomposition(forest, bounds, wc);
    const Graph& graph = forest.graph();
    for (EdgeId e = 0; e < graph.edge_count(); ++e) {
        if (wc) ++wc->edge_scans;
        const Edge edge = graph.edge(e);
        if (decomp.atom_of[edge.u] == kNoAtom || decomp.atom_of[edge.v] == kNoAtom) continue;
        if (forest.component_of(edge.u) == forest.component_of(edge.v)) continue;
        reduce_degree(forest, decomp, bounds, edge.u, wc);
        reduce_degree(forest, decomp, bounds, edge.v, wc);
        forest.link(edge.u, edge.v, e);
        return true;
    }
    return false;
}

SolveResult solve_fr(const Graph& graph, std::vector<int> bounds, const SolveOptions& options) {
    return run_two_stage(graph, std::move(bounds), options, false, "fr");
}

SolveResult solve_fast(const Graph& graph, std::vector<int> bounds, const SolveOptions& options) {
    return run_two_stage(graph, std::move(bounds), options, true, "fast");
}

SolveResult solve_bdst(const Graph& graph, std::vector<int> bounds, const SolveOptions& options) {
    return run_two_stage(graph, std::move(bounds), options, true, "fast");
}

SolveResult solve_auto(const Graph& graph, const SolveOptions& options) {
    Timer timer;
    const Node n = graph.node_count();
    if (n <= 1) {
        SolveResult result;
        result.status = SolveStatus::tree_found;
        result.max_degree = 0;
        result.algo = "auto";
        result.auto_bound = 0;
        result.wall_ms = timer.ms();
        return result;
    }

    SolveOptions probe_options = options;
    probe_options.assume_feasible = false;  // probes below the optimum may make no progress

    WorkCounters total;
    SolveResult best;
    long long best_k = -1;
    long long lo = 1, hi = n - 1;
    while (lo < hi) {
        long long mid = lo + (hi - lo) / 2;
        SolveResult probe =
            solve_bdst(graph, std::vector<int>(static_cast<std::size_t>(n), static_cast<int>(mid)),
                       probe_options);
        total += probe.counters;
        if (probe.status == SolveStatus::tree_found) {
            best = std::move(probe);
            best_k = mid;
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    if (best_k != lo) {
        SolveResult probe =
            solve_bdst(graph, std::vector<int>(static_cast<std::size_t>(n), static_cast<int>(lo)),
                       probe_options);
        total += probe.counters;
        if (probe.status != SolveStatus::tree_found) {
            throw std::logic_error("solve_auto: probe at the top of the search range failed");
        }
        best = std::move(probe);
        best_k = lo;
    }

    best.algo = "auto";
    best.auto_bound = static_cast<int>(best_k);
    best.counters = total;
    best.wall_ms = timer.ms();
    return best;
}

}  // namespace mdst
