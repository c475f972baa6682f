#include <doctest.h>

#include "loadisc/bench.hpp"
#include "loadisc/estimate.hpp"
#include "test_support.hpp"

using namespace loadisc;
using namespace loadisc::testing;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.n_nodes = {10};
    c.seed_begin = 0;
    c.seed_end = 3;
    c.methods = {Method::Load, Method::LoadStar, Method::Pc, Method::MbByMbPlus};
    c.tester = TesterKind::Dsep;
    c.n_estimation_samples = 2000;
    return c;
}

}  // namespace

TEST_CASE("experiment runs are reproducible bit for bit") {
    ExperimentConfig c = small_config();
    auto a = run_experiment(c);
    auto b = run_experiment(c);
    for (const RunRecord& r : a) {
        CAPTURE(r.method);
        REQUIRE_FALSE(r.failed);
        if (r.method == "load") REQUIRE(r.f1_oset == 1.0);
    }

    c.jobs = 4;
    auto parallel = run_experiment(c);
    // Timing differs across runs; everything else is identical.
    for (auto* v : {&a, &b, &parallel})
        for (RunRecord& r : *v) r.wall_time_ms = 0;
    REQUIRE(records_to_csv(a) == records_to_csv(b));
    REQUIRE(records_to_csv(a) == records_to_csv(parallel));
}

TEST_CASE("methods never warm each other's caches") {
    ExperimentConfig all = small_config();
    for (Method m : {Method::Load, Method::Pc, Method::MbByMbPlus}) {
        ExperimentConfig solo = small_config();
        solo.methods = {m};
        auto together = run_experiment(all);
        auto alone = run_experiment(solo);
        for (const RunRecord& r : alone) {
            bool matched = false;
            for (const RunRecord& s : together)
                if (s.method == r.method && s.seed == r.seed && s.n_nodes == r.n_nodes) {
                    matched = true;
                    REQUIRE(s.ci_tests_executed == r.ci_tests_executed);
                }
            REQUIRE(matched);
        }
    }
}

TEST_CASE("pair f1 handles direction and existence disagreements") {
    using V = std::vector<NodeId>;
    CHECK(pair_f1(std::nullopt, std::nullopt, std::nullopt, std::nullopt) == 1.0);
    CHECK(pair_f1(V{1}, std::nullopt, V{1}, std::nullopt) == 1.0);
    CHECK(pair_f1(std::nullopt, V{1}, V{1}, std::nullopt) == 0.0);  // wrong direction
    CHECK(pair_f1(std::nullopt, std::nullopt, V{1}, std::nullopt) == 0.0);
    CHECK(pair_f1(V{1, 2}, std::nullopt, V{1}, std::nullopt) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("cpdag adapter mirrors the local pipeline's output shape") {
    // x -> m -> y with z -> m, z -> y: fully oriented, amenable.
    Dag d(4, {{0, 1}, {1, 2}, {3, 1}, {3, 2}});
    Cpdag g = cpdag_from_dag(d);
    LoadResult res = cpdag_to_result(g, 0, 2);
    CHECK(res.xy.relation == Relation::ExplAn);
    CHECK(res.yx.relation == Relation::DefNonAn);
    CHECK(res.xy.is_ident);
    REQUIRE(res.xy.kind == AdjKind::Optimal);
    CHECK(res.xy.sets.at(0) == std::vector<NodeId>{3});
    CHECK(res.yx.kind == AdjKind::None);

    // Undirected chain: locally valid families on both sides.
    Cpdag path(3);
    path.add_undirected(0, 1);
    path.add_undirected(1, 2);
    LoadResult pres = cpdag_to_result(path, 0, 2);
    CHECK(pres.xy.relation == Relation::PossAn);
    CHECK(pres.xy.kind == AdjKind::LocallyValid);
    CHECK_FALSE(pres.xy.is_ident);
}

TEST_CASE("summaries trim exactly five from each end once eleven records exist") {
    std::vector<RunRecord> records;
    for (int i = 0; i <= 10; ++i) {
        RunRecord r;
        r.n_nodes = 10;
        r.method = "load";
        r.tester = "dsep";
        r.ci_tests_executed = i * 100;  // 0..1000
        r.f1_oset = 1.0;
        records.push_back(r);
    }
    auto rows = summarize(records);
    bool found = false;
    for (const auto& row : rows)
        if (row.metric == "ci_tests_executed") {
            found = true;
            CHECK(row.trimmed);
            CHECK(row.count == 1);
            CHECK(row.mean == doctest::Approx(500.0));
            CHECK(row.sd == 0.0);
        }
    CHECK(found);

    records.pop_back();  // 10 records: below the trimming threshold
    for (const auto& row : summarize(records))
        if (row.metric == "ci_tests_executed") {
            CHECK_FALSE(row.trimmed);
            CHECK(row.count == 10);
        }

    std::vector<RunRecord> identical(100);
    for (auto& r : identical) {
        r.n_nodes = 5;
        r.method = "pc";
        r.tester = "dsep";
        r.f1_oset = 0.75;
    }
    for (const auto& row : summarize(identical))
        if (row.metric == "f1_oset") {
            CHECK(row.mean == doctest::Approx(0.75));
            CHECK(row.sd == 0.0);
            CHECK(row.count == 90);
        }
}

TEST_CASE("record csv round-trips") {
    auto records = run_experiment(small_config());
    auto parsed = records_from_csv(records_to_csv(records));
    REQUIRE(parsed.size() == records.size());
    CHECK(records_to_csv(parsed) == records_to_csv(records));
    CHECK_FALSE(records_to_jsonl(records).empty());
}

TEST_CASE("zero-effect convention for disconnected targets under every tester") {
    Dag d(6, {{2, 3}, {3, 4}, {2, 5}});  // targets 0, 1 isolated
    Scm lin = Scm::linear_gaussian(d, 9);
    Scm bin = Scm::binary_cpt(d, 10);
    Dataset cont = sample_linear_gaussian(lin, 4000, 11);
    Dataset disc = sample_binary_cpt(bin, 4000, 12);

    std::vector<std::unique_ptr<CiTester>> testers;
    testers.push_back(caching_wrapper(dsep_tester(d)));
    testers.push_back(caching_wrapper(fisher_z_tester(cont, 0.01)));
    testers.push_back(caching_wrapper(g_square_tester(disc, 0.01)));
    for (auto& t : testers) {
        LoadResult res = load(0, 1, *t);
        CHECK(res.xy.relation == Relation::DefNonAn);
        CHECK(res.yx.relation == Relation::DefNonAn);
        CHECK(res.xy.is_ident);
        CHECK(res.yx.is_ident);
        CHECK(intervention_distance({0.0}, {0.0}, 0.0, 0.0) == 0.0);
    }
}
