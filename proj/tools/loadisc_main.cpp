#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "loadisc/bench.hpp"
#include "loadisc/estimate.hpp"
#include "loadisc/graph_io.hpp"
#include "loadisc/load.hpp"
#include "loadisc/oracle.hpp"
#include "loadisc/simulate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace loadisc;

namespace {

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& s) {
    auto dots = s.find("..");
    if (dots == std::string::npos) {
        std::uint64_t v = std::stoull(s);
        return {v, v + 1};
    }
    std::uint64_t a = std::stoull(s.substr(0, dots));
    std::uint64_t b = std::stoull(s.substr(dots + 2));
    if (b < a) throw CLI::ValidationError("--seeds", "range end before start");
    return {a, b + 1};  // inclusive A..B
}

json direction_to_json(const DirectionResult& dir, const std::vector<std::string>& names) {
    json sets = json::array();
    for (const auto& s : dir.sets) {
        json one = json::array();
        for (NodeId v : s) one.push_back(names[v]);
        sets.push_back(one);
    }
    return json{{"relation", to_string(dir.relation)},
                {"identifiable", dir.is_ident},
                {"adjustment_kind", to_string(dir.kind)},
                {"adjustment_sets", sets}};
}

json load_result_to_json(const LoadResult& res, const std::vector<std::string>& names,
                         const TestStats& stats) {
    return json{{"x", names[res.x]},
                {"y", names[res.y]},
                {"x_to_y", direction_to_json(res.xy, names)},
                {"y_to_x", direction_to_json(res.yx, names)},
                {"ci_tests", {{"executed", stats.executed}, {"cache_hits", stats.cache_hits}}}};
}

struct TargetInput {
    std::unique_ptr<CiTester> tester;
    std::vector<std::string> names;
};

/// Builds the tester from either a graph file (exact d-separation) or a data
/// CSV (Fisher-Z or G^2 at the given level).
TargetInput make_tester(const std::string& graph_file, const std::string& data_file,
                        const std::string& tester_name, double alpha) {
    TargetInput out;
    if (!graph_file.empty()) {
        NamedGraph g = read_graph_file(graph_file);
        out.names = g.names;
        out.tester = caching_wrapper(dsep_tester(g.to_dag()));
        return out;
    }
    std::string text = read_file(data_file);
    Dataset data = tester_name == "fisherz"  ? Dataset::from_csv(text, ColumnKind::Continuous)
                   : tester_name == "g2"     ? Dataset::from_csv(text, ColumnKind::Discrete)
                                             : Dataset::from_csv_inferred(text);
    out.names = data.names();
    if (data.kind() == ColumnKind::Continuous)
        out.tester = caching_wrapper(fisher_z_tester(data, alpha));
    else
        out.tester = caching_wrapper(g_square_tester(data, alpha));
    return out;
}

int cmd_simulate(int n, double degree, int max_degree, std::uint64_t seed, int samples,
                 const std::string& scm_kind, const std::string& out_dir) {
    fs::create_directories(out_dir);
    int attempts = 0;
    Dag dag = random_dag(n, degree, max_degree, seed, 1000, &attempts);
    NamedGraph named = NamedGraph::from_dag(dag);
    write_file(fs::path(out_dir) / "graph.json", graph_to_json(named));

    json meta{{"nodes", n},
              {"expected_degree", degree},
              {"max_degree", max_degree},
              {"max_degree_enforcement", "whole-graph rejection"},
              {"draw_attempts", attempts},
              {"seed", seed},
              {"scm", scm_kind},
              {"samples", samples}};
    if (samples > 0) {
        Scm scm = scm_kind == "binary" ? Scm::binary_cpt(dag, derive_seed(seed, 0x300))
                                       : Scm::linear_gaussian(dag, derive_seed(seed, 0x300));
        Dataset data = sample_dataset(scm, samples, derive_seed(seed, 0x400));
        write_file(fs::path(out_dir) / "data.csv", data.to_csv());
        if (scm.kind() == ScmKind::LinearGaussian) {
            json weights = json::array();
            for (const auto& [p, c] : dag.edges())
                weights.push_back({named.names[p], named.names[c], scm.weight(p, c)});
            meta["weights"] = weights;
        }
    }
    write_file(fs::path(out_dir) / "meta.json", meta.dump(2));
    std::cout << "wrote " << out_dir << "/graph.json"
              << (samples > 0 ? ", data.csv" : "") << ", meta.json\n";
    return 0;
}

int cmd_load(const std::string& graph_file, const std::string& data_file,
             const std::string& tester_name, double alpha, const std::string& x_name,
             const std::string& y_name, bool known_direction) {
    TargetInput input = make_tester(graph_file, data_file, tester_name, alpha);
    auto index_of = [&](const std::string& name) {
        for (std::size_t i = 0; i < input.names.size(); ++i)
            if (input.names[i] == name) return static_cast<NodeId>(i);
        throw std::runtime_error("unknown node name: " + name);
    };
    NodeId x = index_of(x_name), y = index_of(y_name);
    LoadResult res = known_direction ? load_star(x, y, *input.tester) : load(x, y, *input.tester);
    std::cout << load_result_to_json(res, input.names, input.tester->stats()).dump(2) << "\n";
    return 0;
}

int cmd_pc(const std::string& graph_file, const std::string& data_file,
           const std::string& tester_name, double alpha, const std::string& out_file) {
    TargetInput input = make_tester(graph_file, data_file, tester_name, alpha);
    Cpdag learned = pc_algorithm(*input.tester);
    NamedGraph named = NamedGraph::from_cpdag(learned, input.names);
    std::string text = graph_to_json(named);
    if (out_file.empty()) {
        std::cout << text << "\n";
    } else {
        write_file(out_file, text);
    }
    std::cerr << "ci tests executed: " << input.tester->stats().executed << "\n";
    return 0;
}

int cmd_bench(const ExperimentConfig& config, const std::string& out_dir,
              const std::string& format) {
    fs::create_directories(out_dir);
    auto records = run_experiment(config);
    if (format == "json")
        write_file(fs::path(out_dir) / "records.jsonl", records_to_jsonl(records));
    else
        write_file(fs::path(out_dir) / "records.csv", records_to_csv(records));
    auto summary = summarize(records);
    write_file(fs::path(out_dir) / "summary.csv", summary_to_csv(summary));

    long long failures = 0;
    for (const auto& r : records) failures += r.failed ? 1 : 0;
    std::cout << records.size() << " records, " << failures << " failed; summary in " << out_dir
              << "/summary.csv\n";
    return failures == 0 ? 0 : 1;
}

int cmd_summarize(const std::string& records_file, const std::string& out_dir,
                  const std::string& format) {
    auto records = records_from_csv(read_file(records_file));
    auto summary = summarize(records);
    fs::create_directories(out_dir);
    if (format == "json")
        write_file(fs::path(out_dir) / "summary.json", summary_to_json(summary));
    else
        write_file(fs::path(out_dir) / "summary.csv", summary_to_csv(summary));
    std::cout << summary.size() << " summary rows written to " << out_dir << "\n";
    return 0;
}

/// Cross-checks the local pipeline against the brute-force oracles on random
/// instances; prints one line per check.
int cmd_verify(int trials, int max_nodes, std::uint64_t seed) {
    int bad_relations = 0, bad_amen = 0, bad_oset = 0, bad_focal = 0;
    for (int trial = 0; trial < trials; ++trial) {
        int n = 4 + static_cast<int>((seed + trial) % (max_nodes - 3));
        Dag d = random_dag(n, 2.0, n, derive_seed(seed, trial));
        Cpdag truth = cpdag_from_dag(d);
        NodeId x = static_cast<NodeId>(trial % n);
        NodeId y = static_cast<NodeId>((trial + 1 + trial % (n - 1)) % n);
        if (x == y) y = (y + 1) % n;

        auto tester = caching_wrapper(dsep_tester(d));
        DiscoveryCache cache;
        LocalGraph gx = mb_by_mb(x, *tester, cache);
        if (gx.parents() != truth.parents(x) || gx.children() != truth.children(x) ||
            gx.siblings() != truth.siblings(x))
            ++bad_focal;

        LoadResult res = load(x, y, *tester);
        bool expl_xy = explicit_ancestor(truth, x, y);
        bool expl_yx = explicit_ancestor(truth, y, x);
        Relation want_xy = expl_xy ? Relation::ExplAn
                           : expl_yx ? Relation::DefNonAn
                           : possible_ancestor(truth, x, y) ? Relation::PossAn
                                                            : Relation::DefNonAn;
        if (res.xy.relation != want_xy) ++bad_relations;

        bool want_ident = !possible_ancestor(truth, x, y) || is_amenable_global(truth, x, y);
        if (res.xy.is_ident != want_ident) ++bad_amen;

        if (res.xy.relation == Relation::ExplAn && res.xy.is_ident) {
            auto want = oset_from_cpdag(truth, x, y);
            if (!want || res.xy.sets.at(0) != *want) ++bad_oset;
        }
    }
    auto report = [&](const std::string& name, int bad) {
        std::cout << (bad == 0 ? "[ok]   " : "[FAIL] ") << name << ": " << (trials - bad) << "/"
                  << trials << "\n";
    };
    report("focal edges match the true cpdag", bad_focal);
    report("relations match the enumeration truth", bad_relations);
    report("identifiability matches amenability", bad_amen);
    report("optimal sets match the graphical formula", bad_oset);
    return (bad_relations + bad_amen + bad_oset + bad_focal) == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"local causal discovery and optimal adjustment benchmark"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "generate a random DAG, model and data");
    int sim_nodes = 50;
    double sim_degree = 2.0;
    int sim_maxdeg = 10;
    std::uint64_t sim_seed = 0;
    int sim_samples = 10000;
    std::string sim_scm = "linear", sim_out = "sim_out";
    sim->add_option("--nodes", sim_nodes, "node count")->check(CLI::PositiveNumber);
    sim->add_option("--degree", sim_degree, "expected degree");
    sim->add_option("--max-degree", sim_maxdeg, "degree cap");
    sim->add_option("--seed", sim_seed, "rng seed");
    sim->add_option("--samples", sim_samples, "rows to sample (0 for graph only)");
    sim->add_option("--scm", sim_scm, "model kind")->check(CLI::IsMember({"linear", "binary"}));
    sim->add_option("--out", sim_out, "output directory");

    // load
    auto* ld = app.add_subcommand("load", "run the local pipeline on a target pair");
    std::string ld_graph, ld_data, ld_tester = "auto", ld_x, ld_y;
    double ld_alpha = 0.01;
    bool ld_known = false;
    ld->add_option("--graph", ld_graph, "graph file (exact d-separation tester)");
    ld->add_option("--data", ld_data, "csv data file");
    ld->add_option("--tester", ld_tester, "tester for --data")
        ->check(CLI::IsMember({"auto", "fisherz", "g2"}));
    ld->add_option("--alpha", ld_alpha, "significance level");
    ld->add_option("--x", ld_x, "first target name")->required();
    ld->add_option("--y", ld_y, "second target name")->required();
    ld->add_flag("--known-direction", ld_known, "treat --x as treatment and skip step 1");

    // pc
    auto* pc = app.add_subcommand("pc", "run the global baseline");
    std::string pc_graph, pc_data, pc_tester = "auto", pc_out;
    double pc_alpha = 0.01;
    pc->add_option("--graph", pc_graph, "graph file (exact d-separation tester)");
    pc->add_option("--data", pc_data, "csv data file");
    pc->add_option("--tester", pc_tester, "tester for --data")
        ->check(CLI::IsMember({"auto", "fisherz", "g2"}));
    pc->add_option("--alpha", pc_alpha, "significance level");
    pc->add_option("--out", pc_out, "write the learned graph here instead of stdout");

    // bench
    auto* bench = app.add_subcommand("bench", "run the experiment matrix");
    std::string b_nodes = "20,50,100", b_seeds = "0..99", b_tester = "dsep";
    std::string b_targets = "explicit", b_methods = "load,pc,mb_by_mb_plus";
    std::string b_out = "bench_out", b_format = "csv";
    double b_degree = 2.0, b_alpha = 0.01;
    int b_maxdeg = 10, b_samples = 10000, b_jobs = 1;
    bool b_known = false;
    bench->add_option("--nodes", b_nodes, "comma-separated node counts");
    bench->add_option("--degree", b_degree, "expected degree");
    bench->add_option("--max-degree", b_maxdeg, "degree cap");
    bench->add_option("--samples", b_samples, "discovery sample count");
    bench->add_option("--tester", b_tester, "ci tester")
        ->check(CLI::IsMember({"dsep", "fisherz", "g2"}));
    bench->add_option("--alpha", b_alpha, "significance level");
    bench->add_option("--seeds", b_seeds, "seed range A..B (inclusive) or a single seed");
    bench->add_option("--targets", b_targets, "target pair mode")
        ->check(CLI::IsMember({"explicit", "identifiable"}));
    bench->add_option("--methods", b_methods, "comma-separated methods");
    bench->add_option("--out", b_out, "output directory");
    bench->add_option("--format", b_format, "records format")->check(CLI::IsMember({"csv", "json"}));
    bench->add_option("--jobs", b_jobs, "worker threads");
    bench->add_flag("--known-direction", b_known, "also run the background-knowledge variant");

    // summarize
    auto* sum = app.add_subcommand("summarize", "summarize a records csv");
    std::string s_records, s_out = ".", s_format = "csv";
    sum->add_option("--records", s_records, "records.csv from bench")->required();
    sum->add_option("--out", s_out, "output directory");
    sum->add_option("--format", s_format, "summary format")->check(CLI::IsMember({"csv", "json"}));

    // verify
    auto* ver = app.add_subcommand("verify", "cross-check the pipeline against the oracles");
    int v_trials = 100, v_maxnodes = 10;
    std::uint64_t v_seed = 0;
    ver->add_option("--trials", v_trials, "number of random instances");
    ver->add_option("--max-nodes", v_maxnodes, "largest instance size");
    ver->add_option("--seed", v_seed, "rng seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed())
            return cmd_simulate(sim_nodes, sim_degree, sim_maxdeg, sim_seed, sim_samples, sim_scm,
                                sim_out);
        if (ld->parsed()) {
            if (ld_graph.empty() == ld_data.empty())
                throw CLI::ValidationError("load", "exactly one of --graph or --data is required");
            return cmd_load(ld_graph, ld_data, ld_tester, ld_alpha, ld_x, ld_y, ld_known);
        }
        if (pc->parsed()) {
            if (pc_graph.empty() == pc_data.empty())
                throw CLI::ValidationError("pc", "exactly one of --graph or --data is required");
            return cmd_pc(pc_graph, pc_data, pc_tester, pc_alpha, pc_out);
        }
        if (bench->parsed()) {
            ExperimentConfig config;
            config.n_nodes.clear();
            for (const auto& tok : CLI::detail::split(b_nodes, ','))
                config.n_nodes.push_back(std::stoi(tok));
            config.expected_degree = b_degree;
            config.max_degree = b_maxdeg;
            config.n_samples = b_samples;
            config.tester = tester_kind_from_string(b_tester);
            config.alpha = b_alpha;
            std::tie(config.seed_begin, config.seed_end) = parse_seed_range(b_seeds);
            config.target_mode = target_mode_from_string(b_targets);
            config.methods.clear();
            for (const auto& tok : CLI::detail::split(b_methods, ','))
                config.methods.push_back(method_from_string(tok));
            if (b_known &&
                std::find(config.methods.begin(), config.methods.end(), Method::LoadStar) ==
                    config.methods.end())
                config.methods.push_back(Method::LoadStar);
            config.jobs = b_jobs;
            return cmd_bench(config, b_out, b_format);
        }
        if (sum->parsed()) return cmd_summarize(s_records, s_out, s_format);
        if (ver->parsed()) return cmd_verify(v_trials, v_maxnodes, v_seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
