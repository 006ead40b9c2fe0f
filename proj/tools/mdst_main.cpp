#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mdst/oracle.hpp"
#include "mdst/solver.hpp"

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw mdst::InputError("cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw mdst::InputError("cannot write " + path);
    out << content;
}

// Tree files are plain "u v" lines (the solve output format); blank lines and
// '#' comments are ignored.
std::vector<mdst::Edge> parse_tree_lines(const std::string& text) {
    std::vector<mdst::Edge> edges;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;
        std::istringstream fields(line);
        long long u = 0, v = 0;
        if (!(fields >> u >> v)) throw mdst::InputError("malformed tree line: " + line);
        std::string rest;
        if (fields >> rest) throw mdst::InputError("malformed tree line: " + line);
        edges.push_back({static_cast<mdst::Node>(u), static_cast<mdst::Node>(v)});
    }
    return edges;
}

// Resolves per-node bounds from --delta and/or a bounds file of "u b(u)"
// lines; file entries override, --delta fills the rest.
std::vector<int> resolve_bounds(const mdst::Graph& graph, std::optional<int> delta,
                                const std::string& bounds_path) {
    const mdst::Node n = graph.node_count();
    if (bounds_path.empty()) {
        if (!delta) throw mdst::InputError("provide --delta or --bounds-file");
        return std::vector<int>(static_cast<std::size_t>(n), *delta);
    }
    std::vector<int> bounds(static_cast<std::size_t>(n), delta ? *delta : -1);
    std::istringstream in(read_file(bounds_path));
    std::string line;
    while (std::getline(in, line)) {
        std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;
        std::istringstream fields(line);
        long long u = 0, b = 0;
        if (!(fields >> u >> b)) throw mdst::InputError("malformed bounds line: " + line);
        if (u < 0 || u >= n) throw mdst::InputError("bounds line names an unknown node: " + line);
        bounds[static_cast<std::size_t>(u)] = static_cast<int>(b);
    }
    for (mdst::Node v = 0; v < n; ++v) {
        if (bounds[static_cast<std::size_t>(v)] < 0) {
            throw mdst::InputError("bounds file misses node " + std::to_string(v) +
                                   " and no --delta fill was given");
        }
    }
    return bounds;
}

json stats_json(const mdst::Graph& graph, const mdst::SolveResult& result) {
    json rounds = json::array();
    for (const mdst::RoundStats& round : result.rounds) {
        rounds.push_back({{"f", round.f},
                          {"H", round.H},
                          {"theta", round.theta},
                          {"chains_per_ell", round.chains_per_ell}});
    }
    return json{
        {"n", graph.node_count()},
        {"m", graph.edge_count()},
        {"algo", result.algo},
        {"status", result.status == mdst::SolveStatus::tree_found ? "tree-found"
                                                                  : "infeasible-certified"},
        {"max_degree", result.max_degree},
        {"rounds", rounds},
        {"fr_iterations", result.fr_iterations},
        {"work_counters",
         {{"edge_scans", result.counters.edge_scans},
          {"witness_replays", result.counters.witness_replays},
          {"ancestor_hops", result.counters.ancestor_hops}}},
        {"wall_ms", result.wall_ms},
    };
}

std::string tree_lines(const mdst::Graph& graph, const std::vector<mdst::EdgeId>& tree) {
    std::ostringstream out;
    for (mdst::EdgeId id : tree) {
        mdst::Edge e = graph.edge(id);
        out << e.u << ' ' << e.v << '\n';
    }
    return out.str();
}

std::vector<long long> parse_number_list(const std::string& csv) {
    std::vector<long long> out;
    std::istringstream in(csv);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stoll(item));
    }
    if (out.empty()) throw mdst::InputError("empty list: " + csv);
    return out;
}

struct SolveArgs {
    std::string input;
    std::string out_path;
    std::string stats_path;
    std::string trace_path;
    std::string bounds_path;
    std::string algo = "fast";
    std::optional<int> delta;
    int growth = 20;
    long long progress_denominator = 100000;
    unsigned long long work_budget = 0;
};

int run_solve(const SolveArgs& args) {
    mdst::Graph graph = mdst::Graph::parse(read_file(args.input));

    mdst::SolveOptions options;
    options.growth = args.growth;
    options.progress_denominator = args.progress_denominator;
    options.work_budget = args.work_budget;
    std::ofstream trace_stream;
    if (!args.trace_path.empty()) {
        trace_stream.open(args.trace_path, std::ios::binary);
        if (!trace_stream) throw mdst::InputError("cannot write " + args.trace_path);
        options.trace = &trace_stream;
    }

    mdst::SolveResult result;
    if (args.algo == "auto") {
        if (args.delta || !args.bounds_path.empty()) {
            throw mdst::InputError("--algo auto searches for the bound; drop --delta/--bounds-file");
        }
        result = mdst::solve_auto(graph, options);
    } else {
        std::vector<int> bounds = resolve_bounds(graph, args.delta, args.bounds_path);
        if (args.algo == "fr") {
            result = mdst::solve_fr(graph, std::move(bounds), options);
        } else if (args.algo == "fast") {
            result = mdst::solve_bdst(graph, std::move(bounds), options);
        } else {
            throw mdst::InputError("unknown algo: " + args.algo);
        }
    }

    if (!args.stats_path.empty()) {
        write_file(args.stats_path, stats_json(graph, result).dump(2) + "\n");
    }
    if (result.status != mdst::SolveStatus::tree_found) {
        std::cerr << "infeasible: no spanning tree satisfies the bounds\n";
        return 2;
    }
    std::string lines = tree_lines(graph, result.tree);
    if (args.out_path.empty()) {
        std::cout << lines;
    } else {
        write_file(args.out_path, lines);
    }
    return 0;
}

struct VerifyArgs {
    std::string input;
    std::string tree_path;
    std::string bounds_path;
    std::optional<int> delta;
};

int run_verify(const VerifyArgs& args) {
    mdst::Graph graph = mdst::Graph::parse(read_file(args.input));
    std::vector<mdst::Edge> tree = parse_tree_lines(read_file(args.tree_path));
    const mdst::Node n = graph.node_count();

    if (static_cast<mdst::Node>(tree.size()) != n - 1) {
        std::cerr << "reject: expected " << (n - 1) << " edges, got " << tree.size() << '\n';
        return 1;
    }
    mdst::Dsu dsu(n);
    std::vector<int> degree(static_cast<std::size_t>(n), 0);
    for (const mdst::Edge& e : tree) {
        if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n) {
            std::cerr << "reject: edge endpoint out of range\n";
            return 1;
        }
        if (graph.find_edge(e.u, e.v) == mdst::kNoEdge) {
            std::cerr << "reject: " << e.u << ' ' << e.v << " is not a graph edge\n";
            return 1;
        }
        if (!dsu.unite(e.u, e.v)) {
            std::cerr << "reject: edge " << e.u << ' ' << e.v << " closes a cycle\n";
            return 1;
        }
        ++degree[static_cast<std::size_t>(e.u)];
        ++degree[static_cast<std::size_t>(e.v)];
    }
    if (dsu.set_count() != 1) {
        std::cerr << "reject: edges do not span the graph\n";
        return 1;
    }
    if (args.delta || !args.bounds_path.empty()) {
        std::vector<int> bounds = resolve_bounds(graph, args.delta, args.bounds_path);
        for (mdst::Node v = 0; v < n; ++v) {
            if (degree[static_cast<std::size_t>(v)] > bounds[static_cast<std::size_t>(v)]) {
                std::cerr << "reject: node " << v << " has degree "
                          << degree[static_cast<std::size_t>(v)] << " above bound "
                          << bounds[static_cast<std::size_t>(v)] << '\n';
                return 1;
            }
        }
    }
    int max_degree = n <= 1 ? 0 : *std::max_element(degree.begin(), degree.end());
    std::cout << max_degree << '\n';
    return 0;
}

struct GenArgs {
    std::string family = "gnm";
    long long n = 1;
    long long m = 0;
    std::uint64_t seed = 0;
    int q = 0;
    std::string out_path;
    std::string bad_tree_path;
    std::string good_tree_path;
};

int run_gen(const GenArgs& args) {
    mdst::GenSpec spec;
    spec.family = mdst::parse_family(args.family);
    spec.n = static_cast<mdst::Node>(args.n);
    spec.m = args.m;
    spec.seed = args.seed;
    spec.q = args.q;

    std::string graph_text;
    if (spec.family == mdst::GenFamily::lot) {
        mdst::LotInstance lot = mdst::generate_lot(spec.q);
        graph_text = lot.graph.write_edge_list();
        auto tree_text = [](const std::vector<mdst::Edge>& edges) {
            std::ostringstream out;
            for (const mdst::Edge& e : edges) out << e.u << ' ' << e.v << '\n';
            return out.str();
        };
        if (!args.bad_tree_path.empty()) write_file(args.bad_tree_path, tree_text(lot.bad_tree));
        if (!args.good_tree_path.empty()) write_file(args.good_tree_path, tree_text(lot.good_tree));
    } else {
        if (!args.bad_tree_path.empty() || !args.good_tree_path.empty()) {
            throw mdst::InputError("--emit-bad-tree/--emit-good-tree apply to the lot family only");
        }
        graph_text = mdst::generate(spec).write_edge_list();
    }
    if (args.out_path.empty()) {
        std::cout << graph_text;
    } else {
        write_file(args.out_path, graph_text);
    }
    return 0;
}

struct BenchArgs {
    std::string family = "gnm";
    std::string sizes = "1024";
    std::string seeds = "1";
    std::string algos = "fr,fast";
    long long m_factor = 4;
    std::string out_path;
};

int run_bench(const BenchArgs& args) {
    mdst::GenFamily family = mdst::parse_family(args.family);
    std::vector<long long> sizes = parse_number_list(args.sizes);
    std::vector<long long> seeds = parse_number_list(args.seeds);

    std::vector<std::string> algos;
    {
        std::istringstream in(args.algos);
        std::string item;
        while (std::getline(in, item, ',')) {
            if (item.empty()) continue;
            if (item != "fr" && item != "fast" && item != "auto") {
                throw mdst::InputError("unknown algo: " + item);
            }
            algos.push_back(item);
        }
        if (algos.empty()) throw mdst::InputError("no algos requested");
    }

    std::ostringstream csv;
    csv << "family,n,m,algo,seed,edge_scans,witness_replays,ancestor_hops,total_work,"
           "wall_ms,max_degree,status\n";
    for (long long size : sizes) {
        for (long long seed : seeds) {
            mdst::GenSpec spec;
            spec.family = family;
            spec.seed = static_cast<std::uint64_t>(seed);
            if (family == mdst::GenFamily::lot) {
                spec.q = static_cast<int>(size);
            } else {
                spec.n = static_cast<mdst::Node>(size);
                spec.m = family == mdst::GenFamily::gnm ? args.m_factor * size : 0;
            }
            mdst::Graph graph = mdst::generate(spec);

            for (const std::string& algo : algos) {
                mdst::SolveResult result;
                if (algo == "auto") {
                    result = mdst::solve_auto(graph);
                } else {
                    std::vector<int> bounds(static_cast<std::size_t>(graph.node_count()), 0);
                    // Benchmark bound: the family's known good target, else auto.
                    int delta = 0;
                    if (family == mdst::GenFamily::lot) {
                        delta = 3;
                    } else if (family == mdst::GenFamily::grid) {
                        delta = 3;
                    } else {
                        delta = std::max(2, static_cast<int>(
                                                (2 * graph.edge_count() + graph.node_count() - 1) /
                                                graph.node_count()));
                    }
                    bounds.assign(static_cast<std::size_t>(graph.node_count()), delta);
                    result = algo == "fr" ? mdst::solve_fr(graph, std::move(bounds))
                                          : mdst::solve_fast(graph, std::move(bounds));
                }
                csv << family_name(family) << ',' << graph.node_count() << ','
                    << graph.edge_count() << ',' << algo << ',' << seed << ','
                    << result.counters.edge_scans << ',' << result.counters.witness_replays << ','
                    << result.counters.ancestor_hops << ',' << result.counters.total() << ','
                    << result.wall_ms << ',' << result.max_degree << ','
                    << (result.status == mdst::SolveStatus::tree_found ? "tree-found"
                                                                       : "infeasible-certified")
                    << '\n';
            }
        }
    }
    if (args.out_path.empty()) {
        std::cout << csv.str();
    } else {
        write_file(args.out_path, csv.str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Minimum-degree and bounded-degree spanning tree solver"};
    app.require_subcommand(1);

    SolveArgs solve_args;
    CLI::App* solve = app.add_subcommand("solve", "Solve an instance and print the tree");
    solve->add_option("input", solve_args.input, "Graph file (edge list)")->required();
    solve->add_option("--algo", solve_args.algo, "fr | fast | auto")
        ->check(CLI::IsMember({"fr", "fast", "auto"}));
    solve->add_option("--delta", solve_args.delta, "Uniform degree bound");
    solve->add_option("--bounds-file", solve_args.bounds_path, "Per-node bounds, lines of: u b");
    solve->add_option("--out", solve_args.out_path, "Tree output path (default stdout)");
    solve->add_option("--stats", solve_args.stats_path, "Write run statistics JSON here");
    solve->add_option("--trace", solve_args.trace_path, "Write the search event stream here");
    solve->add_option("--growth", solve_args.growth, "Horizon constant (default 20)");
    solve->add_option("--progress-denominator", solve_args.progress_denominator,
                      "Progress floor constant (default 100000)");
    solve->add_option("--work-budget", solve_args.work_budget,
                      "Abort the blocking stage past this work count (0 = off)");

    VerifyArgs verify_args;
    CLI::App* verify = app.add_subcommand("verify", "Check a tree against a graph and bounds");
    verify->add_option("input", verify_args.input, "Graph file (edge list)")->required();
    verify->add_option("tree", verify_args.tree_path, "Tree file, lines of: u v")->required();
    verify->add_option("--delta", verify_args.delta, "Uniform degree bound");
    verify->add_option("--bounds-file", verify_args.bounds_path, "Per-node bounds file");

    GenArgs gen_args;
    CLI::App* gen = app.add_subcommand("gen", "Generate an instance");
    gen->add_option("--family", gen_args.family, "gnm | path | cycle | star | grid | lot")
        ->required();
    gen->add_option("--n", gen_args.n, "Node count (grid: side length)");
    gen->add_option("--m", gen_args.m, "Edge count (gnm)");
    gen->add_option("--seed", gen_args.seed, "Random seed (gnm)");
    gen->add_option("--q", gen_args.q, "Recursion level (lot)");
    gen->add_option("--out", gen_args.out_path, "Graph output path (default stdout)");
    gen->add_option("--emit-bad-tree", gen_args.bad_tree_path,
                    "Also write the lot family's max-degree-q spanning tree");
    gen->add_option("--emit-good-tree", gen_args.good_tree_path,
                    "Also write the lot family's max-degree-3 spanning tree");

    BenchArgs bench_args;
    CLI::App* bench = app.add_subcommand("bench", "Run a benchmark grid, emit CSV");
    bench->add_option("--family", bench_args.family, "gnm | grid | lot");
    bench->add_option("--sizes", bench_args.sizes, "Comma list: n (gnm), side (grid), q (lot)");
    bench->add_option("--seeds", bench_args.seeds, "Comma list of seeds (gnm)");
    bench->add_option("--algos", bench_args.algos, "Comma list from fr,fast,auto");
    bench->add_option("--m-factor", bench_args.m_factor, "gnm edge multiplier (m = factor*n)");
    bench->add_option("--out", bench_args.out_path, "CSV output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << '\n';
        return 1;
    }

    try {
        if (solve->parsed()) return run_solve(solve_args);
        if (verify->parsed()) return run_verify(verify_args);
        if (gen->parsed()) return run_gen(gen_args);
        if (bench->parsed()) return run_bench(bench_args);
    } catch (const mdst::ParseError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 1;
    } catch (const mdst::InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
