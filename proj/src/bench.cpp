#include "loadisc/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "loadisc/estimate.hpp"
#include "loadisc/graph_io.hpp"

namespace loadisc {

using nlohmann::json;

std::string to_string(TesterKind k) {
    switch (k) {
        case TesterKind::Dsep: return "dsep";
        case TesterKind::FisherZ: return "fisherz";
        case TesterKind::GSquare: return "g2";
    }
    return "?";
}

std::string to_string(Method m) {
    switch (m) {
        case Method::Load: return "load";
        case Method::LoadStar: return "load_star";
        case Method::Pc: return "pc";
        case Method::MbByMbPlus: return "mb_by_mb_plus";
    }
    return "?";
}

std::string to_string(TargetMode m) {
    return m == TargetMode::ExplicitAncestor ? "explicit" : "identifiable";
}

TesterKind tester_kind_from_string(const std::string& s) {
    if (s == "dsep") return TesterKind::Dsep;
    if (s == "fisherz" || s == "fisher_z") return TesterKind::FisherZ;
    if (s == "g2" || s == "gsquare") return TesterKind::GSquare;
    throw std::invalid_argument("unknown tester: " + s);
}

Method method_from_string(const std::string& s) {
    if (s == "load") return Method::Load;
    if (s == "load_star" || s == "load*") return Method::LoadStar;
    if (s == "pc") return Method::Pc;
    if (s == "mb_by_mb_plus" || s == "mbbymb+" || s == "mb_by_mb+") return Method::MbByMbPlus;
    throw std::invalid_argument("unknown method: " + s);
}

TargetMode target_mode_from_string(const std::string& s) {
    if (s == "explicit" || s == "explicit_ancestor") return TargetMode::ExplicitAncestor;
    if (s == "identifiable") return TargetMode::Identifiable;
    throw std::invalid_argument("unknown target mode: " + s);
}

double pair_f1(const std::optional<std::vector<NodeId>>& est_xy,
               const std::optional<std::vector<NodeId>>& est_yx,
               const std::optional<std::vector<NodeId>>& true_xy,
               const std::optional<std::vector<NodeId>>& true_yx) {
    const bool est_any = est_xy || est_yx;
    const bool true_any = true_xy || true_yx;
    if (!est_any && !true_any) return 1.0;
    if (est_any != true_any) return 0.0;
    if (static_cast<bool>(est_xy) != static_cast<bool>(true_xy)) return 0.0;  // direction mismatch
    if (est_xy) return f1_oset(est_xy, true_xy);
    return f1_oset(est_yx, true_yx);
}

LoadResult cpdag_to_result(const Cpdag& learned, NodeId x, NodeId y) {
    LoadResult res;
    res.x = x;
    res.y = y;

    auto classify = [&](NodeId a, NodeId b) {
        if (explicit_ancestor(learned, a, b)) return Relation::ExplAn;
        if (possible_ancestor(learned, a, b)) return Relation::PossAn;
        return Relation::DefNonAn;
    };
    Relation rxy = classify(x, y);
    Relation ryx = classify(y, x);
    // Explicit ancestry wins and forces the reverse to definite non-ancestry,
    // mirroring the if/elif precedence of the local pipeline.
    if (rxy == Relation::ExplAn)
        ryx = Relation::DefNonAn;
    else if (ryx == Relation::ExplAn)
        rxy = Relation::DefNonAn;
    res.xy.relation = rxy;
    res.yx.relation = ryx;

    auto fill = [&](DirectionResult& dir, NodeId t, NodeId o) {
        if (dir.relation == Relation::DefNonAn) {
            dir.is_ident = true;  // zero effect
            return;
        }
        if (dir.relation == Relation::ExplAn && is_amenable_global(learned, t, o)) {
            auto oset = oset_from_cpdag(learned, t, o);
            if (oset) {
                dir.is_ident = true;
                dir.kind = AdjKind::Optimal;
                dir.sets = {*oset};
                return;
            }
        }
        LocalGraph view{t, learned};
        dir.kind = AdjKind::LocallyValid;
        dir.sets = local_valid_sets(t, view);
    };
    fill(res.xy, x, y);
    fill(res.yx, y, x);
    return res;
}

namespace {

struct Task {
    int n_nodes;
    std::uint64_t seed;
};

struct TruthSide {
    Cpdag cpdag{0};
    std::string relation_xy, relation_yx;
    bool ident_xy = false, ident_yx = false;
    std::optional<std::vector<NodeId>> oset_xy, oset_yx;
    double effect_xy = 0, effect_yx = 0;
};

std::pair<Relation, Relation> true_relations(const Cpdag& g, NodeId x, NodeId y) {
    if (explicit_ancestor(g, x, y)) return {Relation::ExplAn, Relation::DefNonAn};
    if (explicit_ancestor(g, y, x)) return {Relation::DefNonAn, Relation::ExplAn};
    Relation rxy = possible_ancestor(g, x, y) ? Relation::PossAn : Relation::DefNonAn;
    Relation ryx = possible_ancestor(g, y, x) ? Relation::PossAn : Relation::DefNonAn;
    return {rxy, ryx};
}

bool true_identifiable(const Cpdag& g, NodeId t, NodeId o) {
    if (!possible_ancestor(g, t, o)) return true;  // zero effect
    return is_amenable_global(g, t, o);
}

std::vector<double> direction_estimates(const DirectionResult& dir, const Dataset& est_data,
                                        NodeId t, NodeId o) {
    switch (dir.kind) {
        case AdjKind::None:
            return {0.0};
        case AdjKind::Optimal:
            return {ols_effect(est_data, t, o, dir.sets.at(0))};
        case AdjKind::LocallyValid: {
            std::vector<double> out;
            out.reserve(dir.sets.size());
            for (const auto& s : dir.sets) out.push_back(ols_effect(est_data, t, o, s));
            return out;
        }
    }
    return {0.0};
}

std::optional<std::vector<NodeId>> claimed_oset(const DirectionResult& dir) {
    if (dir.kind == AdjKind::Optimal) return dir.sets.at(0);
    return std::nullopt;
}

void run_one_task(const ExperimentConfig& config, const Task& task, const RecordSink& sink) {
    RunRecord base;
    base.n_nodes = task.n_nodes;
    base.expected_degree = config.expected_degree;
    base.max_degree = config.max_degree;
    base.n_samples = config.n_samples;
    base.tester = to_string(config.tester);
    base.target_mode = to_string(config.target_mode);
    base.alpha = config.alpha;
    base.seed = task.seed;

    auto emit_failure = [&](const std::string& why) {
        for (Method m : config.methods) {
            RunRecord r = base;
            r.method = to_string(m);
            r.failed = true;
            r.failure = why;
            sink(r);
        }
    };

    // Deterministic per-(size, seed) stream: the graph draw, the model, the
    // data, and the target pair each get their own derived seed.
    const RngSeed task_seed = derive_seed(task.seed, static_cast<std::uint64_t>(task.n_nodes));

    std::optional<Dag> dag;
    std::optional<Cpdag> true_cpdag;
    std::pair<NodeId, NodeId> pair{-1, -1};
    try {
        for (int attempt = 0; attempt < config.max_graph_attempts; ++attempt) {
            Dag candidate = random_dag(task.n_nodes, config.expected_degree, config.max_degree,
                                       derive_seed(task_seed, 0x100 + attempt));
            Cpdag c = cpdag_from_dag(candidate);
            auto p = sample_target_pair(candidate, c, config.target_mode,
                                        derive_seed(task_seed, 0x200 + attempt));
            if (p) {
                dag = std::move(candidate);
                true_cpdag = std::move(c);
                pair = *p;
                break;
            }
        }
    } catch (const std::exception& e) {
        emit_failure(std::string("generation: ") + e.what());
        return;
    }
    if (!dag) {
        emit_failure("generation: no qualifying target pair after retries");
        return;
    }
    base.x = pair.first;
    base.y = pair.second;

    const bool binary = config.tester == TesterKind::GSquare;
    Scm scm = binary ? Scm::binary_cpt(*dag, derive_seed(task_seed, 0x300))
                     : Scm::linear_gaussian(*dag, derive_seed(task_seed, 0x300));

    std::optional<Dataset> disc_data;
    if (config.tester != TesterKind::Dsep)
        disc_data = sample_dataset(scm, config.n_samples, derive_seed(task_seed, 0x400));
    Dataset est_data = sample_dataset(scm, config.n_estimation_samples, derive_seed(task_seed, 0x500));

    TruthSide truth;
    truth.cpdag = *true_cpdag;
    auto [trx, tryx] = true_relations(truth.cpdag, pair.first, pair.second);
    truth.relation_xy = to_string(trx);
    truth.relation_yx = to_string(tryx);
    truth.ident_xy = true_identifiable(truth.cpdag, pair.first, pair.second);
    truth.ident_yx = true_identifiable(truth.cpdag, pair.second, pair.first);
    truth.oset_xy = oset_from_cpdag(truth.cpdag, pair.first, pair.second);
    truth.oset_yx = oset_from_cpdag(truth.cpdag, pair.second, pair.first);
    if (binary) {
        truth.effect_xy = binary_do_effect(scm, pair.first, pair.second, config.binary_truth_samples,
                                           derive_seed(task_seed, 0x600));
        truth.effect_yx = binary_do_effect(scm, pair.second, pair.first, config.binary_truth_samples,
                                           derive_seed(task_seed, 0x601));
    } else {
        truth.effect_xy = true_total_effect(scm, pair.first, pair.second);
        truth.effect_yx = true_total_effect(scm, pair.second, pair.first);
    }
    base.true_relation_xy = truth.relation_xy;
    base.true_relation_yx = truth.relation_yx;
    base.true_ident_xy = truth.ident_xy;
    base.true_ident_yx = truth.ident_yx;

    for (Method m : config.methods) {
        RunRecord rec = base;
        rec.method = to_string(m);
        try {
            // Fresh tester and cache per method; nothing leaks across methods.
            std::unique_ptr<CiTester> tester;
            switch (config.tester) {
                case TesterKind::Dsep: tester = dsep_tester(*dag); break;
                case TesterKind::FisherZ: tester = fisher_z_tester(*disc_data, config.alpha); break;
                case TesterKind::GSquare: tester = g_square_tester(*disc_data, config.alpha); break;
            }
            tester = caching_wrapper(std::move(tester));

            auto t0 = std::chrono::steady_clock::now();
            LoadResult result;
            switch (m) {
                case Method::Load: result = load(pair.first, pair.second, *tester); break;
                case Method::LoadStar: result = load_star(pair.first, pair.second, *tester); break;
                case Method::MbByMbPlus:
                    result = mb_by_mb_plus(pair.first, pair.second, *tester);
                    break;
                case Method::Pc: {
                    Cpdag learned = pc_algorithm(*tester);
                    result = cpdag_to_result(learned, pair.first, pair.second);
                    break;
                }
            }
            auto t1 = std::chrono::steady_clock::now();
            rec.wall_time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
            rec.ci_tests_executed = tester->stats().executed;
            rec.cache_hits = tester->stats().cache_hits;
            rec.relation_xy = to_string(result.xy.relation);
            rec.relation_yx = to_string(result.yx.relation);
            rec.ident_xy = result.xy.is_ident;
            rec.ident_yx = result.yx.is_ident;

            rec.f1_oset = pair_f1(claimed_oset(result.xy), claimed_oset(result.yx), truth.oset_xy,
                                  truth.oset_yx);
            auto est_xy = direction_estimates(result.xy, est_data, pair.first, pair.second);
            auto est_yx = direction_estimates(result.yx, est_data, pair.second, pair.first);
            rec.intervention_distance =
                intervention_distance(est_xy, est_yx, truth.effect_xy, truth.effect_yx);
        } catch (const std::exception& e) {
            rec.failed = true;
            rec.failure = e.what();
        }
        sink(rec);
    }
}

}  // namespace

void run_experiment(const ExperimentConfig& config, const RecordSink& sink) {
    if (config.methods.empty()) throw std::invalid_argument("run_experiment: no methods");
    if (config.alpha <= 0 || config.alpha >= 1) throw std::invalid_argument("run_experiment: alpha");
    std::vector<Task> tasks;
    for (int n : config.n_nodes)
        for (std::uint64_t s = config.seed_begin; s < config.seed_end; ++s)
            tasks.push_back({n, s});

    const int jobs = std::max(1, config.jobs);
    if (jobs == 1) {
        for (const Task& t : tasks) run_one_task(config, t, sink);
        return;
    }
    std::mutex sink_mutex;
    std::atomic<std::size_t> next{0};
    RecordSink locked_sink = [&](const RunRecord& r) {
        std::lock_guard<std::mutex> lock(sink_mutex);
        sink(r);
    };
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int w = 0; w < jobs; ++w)
        pool.emplace_back([&] {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= tasks.size()) return;
                run_one_task(config, tasks[i], locked_sink);
            }
        });
    for (auto& t : pool) t.join();
}

std::vector<RunRecord> run_experiment(const ExperimentConfig& config) {
    std::vector<RunRecord> out;
    std::mutex m;
    run_experiment(config, [&](const RunRecord& r) {
        std::lock_guard<std::mutex> lock(m);
        out.push_back(r);
    });
    auto method_rank = [&](const std::string& name) {
        for (std::size_t i = 0; i < config.methods.size(); ++i)
            if (to_string(config.methods[i]) == name) return i;
        return config.methods.size();
    };
    std::sort(out.begin(), out.end(), [&](const RunRecord& a, const RunRecord& b) {
        if (a.n_nodes != b.n_nodes) return a.n_nodes < b.n_nodes;
        if (a.seed != b.seed) return a.seed < b.seed;
        return method_rank(a.method) < method_rank(b.method);
    });
    return out;
}

namespace {

double metric_value(const RunRecord& r, const std::string& metric) {
    if (metric == "ci_tests_executed") return static_cast<double>(r.ci_tests_executed);
    if (metric == "cache_hits") return static_cast<double>(r.cache_hits);
    if (metric == "f1_oset") return r.f1_oset;
    if (metric == "intervention_distance") return r.intervention_distance;
    if (metric == "wall_time_ms") return r.wall_time_ms;
    throw std::invalid_argument("unknown metric: " + metric);
}

const std::vector<std::string>& summary_metrics() {
    static const std::vector<std::string> metrics{"ci_tests_executed", "cache_hits", "f1_oset",
                                                  "intervention_distance", "wall_time_ms"};
    return metrics;
}

}  // namespace

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records) {
    std::map<std::tuple<int, std::string, std::string>, std::vector<const RunRecord*>> groups;
    for (const RunRecord& r : records) {
        if (r.failed) continue;
        groups[{r.n_nodes, r.method, r.tester}].push_back(&r);
    }
    std::vector<SummaryRow> out;
    for (const auto& [key, rs] : groups) {
        for (const std::string& metric : summary_metrics()) {
            std::vector<double> vals;
            vals.reserve(rs.size());
            for (const RunRecord* r : rs) vals.push_back(metric_value(*r, metric));
            std::sort(vals.begin(), vals.end());
            SummaryRow row;
            row.n_nodes = std::get<0>(key);
            row.method = std::get<1>(key);
            row.tester = std::get<2>(key);
            row.metric = metric;
            // Best-5/worst-5 trimming applies per metric once there is room.
            if (vals.size() >= 11) {
                vals.erase(vals.begin(), vals.begin() + 5);
                vals.erase(vals.end() - 5, vals.end());
                row.trimmed = true;
            }
            row.count = static_cast<int>(vals.size());
            double mean = 0;
            for (double v : vals) mean += v;
            mean /= static_cast<double>(vals.size());
            double var = 0;
            for (double v : vals) var += (v - mean) * (v - mean);
            row.mean = mean;
            row.sd = vals.size() > 1 ? std::sqrt(var / static_cast<double>(vals.size() - 1)) : 0.0;
            out.push_back(row);
        }
    }
    return out;
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        out += c;
    }
    out += "\"";
    return out;
}

}  // namespace

std::string records_to_csv(const std::vector<RunRecord>& records) {
    std::ostringstream os;
    os.precision(17);
    os << "n_nodes,expected_degree,max_degree,n_samples,tester,alpha,target_mode,seed,method,x,y,"
          "failed,failure,ci_tests_executed,cache_hits,wall_time_ms,relation_xy,relation_yx,"
          "ident_xy,ident_yx,true_relation_xy,true_relation_yx,true_ident_xy,true_ident_yx,"
          "f1_oset,intervention_distance\n";
    for (const RunRecord& r : records) {
        os << r.n_nodes << ',' << r.expected_degree << ',' << r.max_degree << ',' << r.n_samples
           << ',' << r.tester << ',' << r.alpha << ',' << r.target_mode << ',' << r.seed << ','
           << r.method << ',' << r.x << ',' << r.y << ',' << (r.failed ? 1 : 0) << ','
           << csv_escape(r.failure) << ',' << r.ci_tests_executed << ',' << r.cache_hits << ','
           << r.wall_time_ms << ',' << r.relation_xy << ',' << r.relation_yx << ','
           << (r.ident_xy ? 1 : 0) << ',' << (r.ident_yx ? 1 : 0) << ',' << r.true_relation_xy
           << ',' << r.true_relation_yx << ',' << (r.true_ident_xy ? 1 : 0) << ','
           << (r.true_ident_yx ? 1 : 0) << ',' << r.f1_oset << ',' << r.intervention_distance
           << "\n";
    }
    return os.str();
}

std::string records_to_jsonl(const std::vector<RunRecord>& records) {
    std::ostringstream os;
    for (const RunRecord& r : records) {
        json j;
        j["n_nodes"] = r.n_nodes;
        j["expected_degree"] = r.expected_degree;
        j["max_degree"] = r.max_degree;
        j["n_samples"] = r.n_samples;
        j["tester"] = r.tester;
        j["alpha"] = r.alpha;
        j["target_mode"] = r.target_mode;
        j["seed"] = r.seed;
        j["method"] = r.method;
        j["x"] = r.x;
        j["y"] = r.y;
        j["failed"] = r.failed;
        j["failure"] = r.failure;
        j["ci_tests_executed"] = r.ci_tests_executed;
        j["cache_hits"] = r.cache_hits;
        j["wall_time_ms"] = r.wall_time_ms;
        j["relation_xy"] = r.relation_xy;
        j["relation_yx"] = r.relation_yx;
        j["ident_xy"] = r.ident_xy;
        j["ident_yx"] = r.ident_yx;
        j["true_relation_xy"] = r.true_relation_xy;
        j["true_relation_yx"] = r.true_relation_yx;
        j["true_ident_xy"] = r.true_ident_xy;
        j["true_ident_yx"] = r.true_ident_yx;
        j["f1_oset"] = r.f1_oset;
        j["intervention_distance"] = r.intervention_distance;
        os << j.dump() << "\n";
    }
    return os.str();
}

std::vector<RunRecord> records_from_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("records_from_csv: empty input");
    std::vector<RunRecord> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        // Fields never contain commas except the quoted failure message.
        std::vector<std::string> f;
        std::string cur;
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            char c = line[i];
            if (quoted) {
                if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else if (c == '"') {
                    quoted = false;
                } else {
                    cur += c;
                }
            } else if (c == '"') {
                quoted = true;
            } else if (c == ',') {
                f.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        f.push_back(cur);
        if (f.size() != 26) throw std::invalid_argument("records_from_csv: bad row");
        RunRecord r;
        int i = 0;
        r.n_nodes = std::stoi(f[i++]);
        r.expected_degree = std::stod(f[i++]);
        r.max_degree = std::stoi(f[i++]);
        r.n_samples = std::stoi(f[i++]);
        r.tester = f[i++];
        r.alpha = std::stod(f[i++]);
        r.target_mode = f[i++];
        r.seed = std::stoull(f[i++]);
        r.method = f[i++];
        r.x = std::stoi(f[i++]);
        r.y = std::stoi(f[i++]);
        r.failed = f[i++] == "1";
        r.failure = f[i++];
        r.ci_tests_executed = std::stoll(f[i++]);
        r.cache_hits = std::stoll(f[i++]);
        r.wall_time_ms = std::stod(f[i++]);
        r.relation_xy = f[i++];
        r.relation_yx = f[i++];
        r.ident_xy = f[i++] == "1";
        r.ident_yx = f[i++] == "1";
        r.true_relation_xy = f[i++];
        r.true_relation_yx = f[i++];
        r.true_ident_xy = f[i++] == "1";
        r.true_ident_yx = f[i++] == "1";
        r.f1_oset = std::stod(f[i++]);
        r.intervention_distance = std::stod(f[i++]);
        out.push_back(std::move(r));
    }
    return out;
}

std::string summary_to_csv(const std::vector<SummaryRow>& rows) {
    std::ostringstream os;
    os.precision(17);
    os << "n_nodes,method,tester,metric,count,trimmed,mean,sd\n";
    for (const SummaryRow& r : rows)
        os << r.n_nodes << ',' << r.method << ',' << r.tester << ',' << r.metric << ',' << r.count
           << ',' << (r.trimmed ? 1 : 0) << ',' << r.mean << ',' << r.sd << "\n";
    return os.str();
}

std::string summary_to_json(const std::vector<SummaryRow>& rows) {
    json arr = json::array();
    for (const SummaryRow& r : rows) {
        json j;
        j["n_nodes"] = r.n_nodes;
        j["method"] = r.method;
        j["tester"] = r.tester;
        j["metric"] = r.metric;
        j["count"] = r.count;
        j["trimmed"] = r.trimmed;
        j["mean"] = r.mean;
        j["sd"] = r.sd;
        arr.push_back(j);
    }
    return arr.dump(2);
}

}  // namespace loadisc
