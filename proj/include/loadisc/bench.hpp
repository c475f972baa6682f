#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "loadisc/load.hpp"
#include "loadisc/simulate.hpp"

namespace loadisc {

enum class TesterKind { Dsep, FisherZ, GSquare };
enum class Method { Load, LoadStar, Pc, MbByMbPlus };

std::string to_string(TesterKind k);
std::string to_string(Method m);
std::string to_string(TargetMode m);
TesterKind tester_kind_from_string(const std::string& s);
Method method_from_string(const std::string& s);
TargetMode target_mode_from_string(const std::string& s);

struct ExperimentConfig {
    std::vector<int> n_nodes{20, 50, 100};
    double expected_degree = 2.0;
    int max_degree = 10;
    int n_samples = 10000;
    int n_estimation_samples = 10000;
    TesterKind tester = TesterKind::Dsep;
    double alpha = 0.01;
    std::uint64_t seed_begin = 0;
    std::uint64_t seed_end = 100;  // exclusive
    TargetMode target_mode = TargetMode::ExplicitAncestor;
    std::vector<Method> methods{Method::Load, Method::Pc, Method::MbByMbPlus};
    int max_graph_attempts = 100;
    int binary_truth_samples = 200000;
    int jobs = 1;
};

struct RunRecord {
    int n_nodes = 0;
    double expected_degree = 0;
    int max_degree = 0;
    int n_samples = 0;
    std::string tester, target_mode;
    double alpha = 0;
    std::uint64_t seed = 0;
    std::string method;
    NodeId x = -1, y = -1;

    bool failed = false;
    std::string failure;

    long long ci_tests_executed = 0;
    long long cache_hits = 0;
    double wall_time_ms = 0;
    std::string relation_xy, relation_yx;
    bool ident_xy = false, ident_yx = false;
    std::string true_relation_xy, true_relation_yx;
    bool true_ident_xy = false, true_ident_yx = false;
    double f1_oset = 0;
    double intervention_distance = 0;
};

using RecordSink = std::function<void(const RunRecord&)>;

/// Runs the full experiment matrix; records are streamed to the sink as they
/// are produced and are a pure function of (config, seed).
void run_experiment(const ExperimentConfig& config, const RecordSink& sink);
std::vector<RunRecord> run_experiment(const ExperimentConfig& config);

struct SummaryRow {
    int n_nodes = 0;
    std::string method, tester, metric;
    int count = 0;
    bool trimmed = false;
    double mean = 0, sd = 0;
};

/// Per (size, method, tester) and metric: mean and standard deviation with
/// the best 5 and worst 5 values removed when at least 11 records exist.
std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records);

std::string records_to_csv(const std::vector<RunRecord>& records);
std::string records_to_jsonl(const std::vector<RunRecord>& records);
std::vector<RunRecord> records_from_csv(const std::string& text);
std::string summary_to_csv(const std::vector<SummaryRow>& rows);
std::string summary_to_json(const std::vector<SummaryRow>& rows);

/// F1 for a target pair given per-direction optimal-set claims: agreement on
/// absence scores 1, any existence or direction disagreement scores 0.
double pair_f1(const std::optional<std::vector<NodeId>>& est_xy,
               const std::optional<std::vector<NodeId>>& est_yx,
               const std::optional<std::vector<NodeId>>& true_xy,
               const std::optional<std::vector<NodeId>>& true_yx);

/// LoadResult-shaped view of a learned CPDAG for the global baseline:
/// relations with explicit-ancestry precedence, optimal set when amenable,
/// locally valid parent sets otherwise.
LoadResult cpdag_to_result(const Cpdag& learned, NodeId x, NodeId y);

}  // namespace loadisc
