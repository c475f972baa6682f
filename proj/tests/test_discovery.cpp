#include <doctest.h>

#include "fixtures.hpp"
#include "loadisc/discovery.hpp"
#include "loadisc/simulate.hpp"
#include "test_support.hpp"

using namespace loadisc;
using namespace loadisc::testing;

TEST_CASE("grow-shrink recovers the definition Markov blanket") {
    auto t = dsep_tester(chain(3));
    CHECK(grow_shrink_mb(1, *t, {0, 2}) == std::vector<NodeId>{0, 2});

    Dag spouse(3, {{0, 2}, {1, 2}});  // x -> z <- s
    auto ts = dsep_tester(spouse);
    CHECK(grow_shrink_mb(0, *ts, {1, 2}) == std::vector<NodeId>{1, 2});

    CHECK_THROWS_AS(grow_shrink_mb(0, *ts, {0, 1}), std::invalid_argument);

    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        int n = 4 + static_cast<int>(seed % 7);
        Dag d = test_dag(n, 2.0, 900 + seed);
        auto tester = dsep_tester(d);
        for (NodeId v = 0; v < n; ++v) {
            std::vector<NodeId> cand;
            for (NodeId u = 0; u < n; ++u)
                if (u != v) cand.push_back(u);
            CAPTURE(seed);
            CAPTURE(v);
            REQUIRE(grow_shrink_mb(v, *tester, cand) == definition_mb(d, v));
        }
    }
}

TEST_CASE("blanket-wide adjacency search on direct edges and spouses") {
    Dag direct(2, {{0, 1}});
    auto td = dsep_tester(direct);
    CHECK(mb_adjacent(0, 1, {1}, *td));

    Dag spouse(3, {{0, 2}, {1, 2}});
    auto ts = dsep_tester(spouse);
    CHECK_FALSE(mb_adjacent(0, 1, {1, 2}, *ts));
    CHECK_THROWS_AS(mb_adjacent(0, 1, {2}, *ts), std::invalid_argument);
}

TEST_CASE("regression: shrinking-adjacency search keeps the descendant spouse") {
    Dag d = spouse_trap();
    auto tester = dsep_tester(d);
    auto mb = definition_mb(d, 0);
    REQUIRE(mb == std::vector<NodeId>{1, 2, 3, 4});

    auto naive_adj = naive_local_pc(0, mb, *tester);
    CHECK(std::find(naive_adj.begin(), naive_adj.end(), 4) != naive_adj.end());

    CHECK_FALSE(mb_adjacent(0, 4, mb, *tester));
}

TEST_CASE("blanket-wide adjacency search never reports a false adjacency") {
    for (std::uint64_t seed = 0; seed < 150; ++seed) {
        int n = 4 + static_cast<int>(seed % 7);
        Dag d = test_dag(n, 2.2, 1500 + seed);
        auto tester = dsep_tester(d);
        for (NodeId x = 0; x < n; ++x) {
            auto mb = definition_mb(d, x);
            for (NodeId y : mb) {
                CAPTURE(seed);
                CAPTURE(x);
                CAPTURE(y);
                REQUIRE(mb_adjacent(x, y, mb, *tester) == d.adjacent(x, y));
            }
        }
    }
}

TEST_CASE("local structure recovers colliders and leaves chains undirected") {
    Dag collider(3, {{0, 1}, {2, 1}});
    auto t = caching_wrapper(dsep_tester(collider));
    DiscoveryCache cache;
    GraphFragment f = local_structure(1, {0, 2}, *t, cache);
    CHECK(f.graph.has_directed(f.local(0), f.local(1)));
    CHECK(f.graph.has_directed(f.local(2), f.local(1)));

    auto tc = caching_wrapper(dsep_tester(chain(3)));
    DiscoveryCache cc;
    GraphFragment fc = local_structure(1, {0, 2}, *tc, cc);
    CHECK(fc.graph.has_undirected(fc.local(0), fc.local(1)));
    CHECK(fc.graph.has_undirected(fc.local(1), fc.local(2)));

    // Re-learning the same window adds no executed tests.
    long long before = tc->stats().executed;
    GraphFragment again = local_structure(1, {0, 2}, *tc, cc);
    CHECK(tc->stats().executed == before);
    CHECK(again.graph == fc.graph);
}

TEST_CASE("local discovery finalizes the target's incident edges") {
    Dag collider(3, {{0, 1}, {2, 1}});
    auto t = caching_wrapper(dsep_tester(collider));
    DiscoveryCache cache;
    LocalGraph g = mb_by_mb(1, *t, cache);
    CHECK(g.parents() == std::vector<NodeId>{0, 2});
    CHECK(g.children().empty());
    CHECK(g.siblings().empty());

    Dag isolated(3, {{1, 2}});
    auto ti = caching_wrapper(dsep_tester(isolated));
    DiscoveryCache ci;
    LocalGraph gi = mb_by_mb(0, *ti, ci);
    CHECK(gi.adjacent_nodes().empty());
}

TEST_CASE("local discovery matches the true cpdag around every target") {
    for (std::uint64_t trial = 0; trial < 200; ++trial) {
        Dag d = test_dag(10, 2.0, 2500 + trial);
        Cpdag truth = cpdag_from_dag(d);
        NodeId target = static_cast<NodeId>(trial % 10);
        auto tester = caching_wrapper(dsep_tester(d));
        DiscoveryCache cache;
        LocalGraph g = mb_by_mb(target, *tester, cache);
        CAPTURE(trial);
        CAPTURE(target);
        REQUIRE(g.parents() == truth.parents(target));
        REQUIRE(g.children() == truth.children(target));
        REQUIRE(g.siblings() == truth.siblings(target));
    }
}

TEST_CASE("shared cache never changes focal edges and never adds tests") {
    for (std::uint64_t trial = 0; trial < 40; ++trial) {
        Dag d = test_dag(9, 2.0, 3500 + trial);
        NodeId a = static_cast<NodeId>(trial % 9);
        NodeId b = static_cast<NodeId>((trial + 4) % 9);
        if (a == b) continue;

        auto cold_run = [&](NodeId target) {
            auto t = caching_wrapper(dsep_tester(d));
            DiscoveryCache cache;
            LocalGraph g = mb_by_mb(target, *t, cache);
            return std::pair{g, t->stats().executed};
        };
        auto [ga_cold, na] = cold_run(a);
        auto [gb_cold, nb] = cold_run(b);

        auto shared_tester = caching_wrapper(dsep_tester(d));
        DiscoveryCache shared_cache;
        LocalGraph ga = mb_by_mb(a, *shared_tester, shared_cache);
        LocalGraph gb = mb_by_mb(b, *shared_tester, shared_cache);
        long long total = shared_tester->stats().executed;

        CAPTURE(trial);
        REQUIRE(ga.parents() == ga_cold.parents());
        REQUIRE(ga.children() == ga_cold.children());
        REQUIRE(ga.siblings() == ga_cold.siblings());
        REQUIRE(gb.parents() == gb_cold.parents());
        REQUIRE(gb.children() == gb_cold.children());
        REQUIRE(gb.siblings() == gb_cold.siblings());
        REQUIRE(total <= na + nb);
    }
}

TEST_CASE("pc with an exact tester reproduces the true cpdag") {
    for (std::uint64_t trial = 0; trial < 200; ++trial) {
        int n = 4 + static_cast<int>(trial % 7);
        Dag d = test_dag(n, 2.0, 4500 + trial);
        auto t = caching_wrapper(dsep_tester(d));
        CAPTURE(trial);
        REQUIRE(pc_algorithm(*t) == cpdag_from_dag(d));
    }
}

TEST_CASE("pc on an edgeless graph returns an edgeless cpdag") {
    Dag empty(6, {});
    auto t = caching_wrapper(dsep_tester(empty));
    Cpdag g = pc_algorithm(*t);
    CHECK(g.num_edges() == 0);
}

TEST_CASE("pc test count at n=100 stays near the expected order of magnitude") {
    for (std::uint64_t seed : {11ull, 22ull, 33ull}) {
        Dag d = random_dag(100, 2.0, 10, seed);
        auto t = caching_wrapper(dsep_tester(d));
        pc_algorithm(*t);
        long long executed = t->stats().executed;
        CAPTURE(seed);
        CHECK(executed > 5000);
        CHECK(executed < 15000);
    }
}
