#include <doctest.h>

#include "loadisc/estimate.hpp"
#include "loadisc/graph.hpp"
#include "loadisc/graph_io.hpp"
#include "loadisc/oracle.hpp"
#include "loadisc/simulate.hpp"
#include "test_support.hpp"

using namespace loadisc;
using namespace loadisc::testing;

TEST_CASE("d-separation on chains and colliders") {
    Dag chain3 = chain(3);
    CHECK(d_separated(chain3, 0, 2, {1}));
    CHECK_FALSE(d_separated(chain3, 0, 2, {}));

    Dag collider(3, {{0, 1}, {2, 1}});
    CHECK(d_separated(collider, 0, 2, {}));
    CHECK_FALSE(d_separated(collider, 0, 2, {1}));

    CHECK_THROWS_AS(d_separated(chain3, 0, 0, {}), std::invalid_argument);
    CHECK_THROWS_AS(d_separated(chain3, 0, 2, {0}), std::invalid_argument);
    CHECK_THROWS_AS(d_separated(chain3, 0, 2, {2}), std::invalid_argument);
}

TEST_CASE("d-separation equals exhaustive path enumeration on random 6-node DAGs") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Dag d = test_dag(6, 2.0, seed);
        std::vector<NodeId> all{0, 1, 2, 3, 4, 5};
        for (NodeId x = 0; x < 6; ++x) {
            for (NodeId y = x + 1; y < 6; ++y) {
                auto pool = set_minus(all, {x, y});
                for (const auto& s : subsets_of(pool)) {
                    bool fast = d_separated(d, x, y, s);
                    bool slow = oracle::d_separated_bruteforce(d, x, y, s);
                    CAPTURE(seed);
                    CAPTURE(x);
                    CAPTURE(y);
                    REQUIRE(fast == slow);
                    REQUIRE(d_separated(d, y, x, s) == fast);  // symmetry
                }
            }
        }
    }
}

TEST_CASE("cpdag_from_dag keeps v-structures and frees chains") {
    Dag collider(3, {{0, 1}, {2, 1}});
    Cpdag g = cpdag_from_dag(collider);
    CHECK(g.has_directed(0, 1));
    CHECK(g.has_directed(2, 1));
    CHECK_FALSE(g.has_undirected(0, 1));

    Cpdag c = cpdag_from_dag(chain(3));
    CHECK(c.has_undirected(0, 1));
    CHECK(c.has_undirected(1, 2));
    auto members = oracle::enumerate_mec(c);
    CHECK(members.size() == 3);
}

TEST_CASE("cpdag_from_dag output never contains the directed-into-undirected induced pattern") {
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        Dag d = test_dag(8, 2.0, 1000 + seed);
        Cpdag g = cpdag_from_dag(d);
        for (NodeId b = 0; b < 8; ++b)
            for (NodeId a : g.parents(b))
                for (NodeId c : g.siblings(b)) {
                    CAPTURE(seed);
                    REQUIRE((a == c || g.adjacent(a, c)));
                }
    }
}

TEST_CASE("cpdag_from_dag preserves skeleton and v-structures; MEC round-trips") {
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        int n = 4 + static_cast<int>(seed % 7);  // 4..10
        Dag d = test_dag(n, 2.0, 2000 + seed);
        Cpdag g = cpdag_from_dag(d);
        CAPTURE(seed);
        REQUIRE(skeleton(d) == skeleton(g));
        REQUIRE_FALSE(has_partially_directed_cycle(g));

        // Every directed edge of g appears as-is in the original DAG.
        for (const auto& [a, b] : g.directed_edges()) REQUIRE(d.has_edge(a, b));

        if (seed % 5 == 0) {
            auto members = oracle::enumerate_mec(g);
            REQUIRE(!members.empty());
            bool found_original = false;
            for (const Dag& m : members) {
                REQUIRE(v_structures(m) == v_structures(d));
                REQUIRE(cpdag_from_dag(m) == g);
                if (m.edges() == d.edges()) found_original = true;
            }
            REQUIRE(found_original);
        }
    }
}

TEST_CASE("cpdag accessors read off the edge sets") {
    Cpdag g(3);
    g.add_directed(0, 1);
    g.add_undirected(1, 2);
    CHECK(g.parents(1) == std::vector<NodeId>{0});
    CHECK(g.siblings(1) == std::vector<NodeId>{2});
    CHECK(g.children(0) == std::vector<NodeId>{1});
    CHECK(g.adjacent(1) == std::vector<NodeId>{0, 2});

    Cpdag empty(4);
    for (NodeId v = 0; v < 4; ++v) {
        CHECK(empty.parents(v).empty());
        CHECK(empty.children(v).empty());
        CHECK(empty.siblings(v).empty());
        CHECK(empty.adjacent(v).empty());
    }
}

TEST_CASE("adjacent is the disjoint union of parents, children and siblings") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Dag d = test_dag(8, 2.5, 3000 + seed);
        Cpdag g = cpdag_from_dag(d);
        for (NodeId v = 0; v < 8; ++v) {
            auto pa = g.parents(v), ch = g.children(v), sib = g.siblings(v);
            std::vector<NodeId> uni;
            uni.insert(uni.end(), pa.begin(), pa.end());
            uni.insert(uni.end(), ch.begin(), ch.end());
            uni.insert(uni.end(), sib.begin(), sib.end());
            std::sort(uni.begin(), uni.end());
            REQUIRE(std::adjacent_find(uni.begin(), uni.end()) == uni.end());  // disjoint
            REQUIRE(uni == g.adjacent(v));
        }
    }
}

TEST_CASE("explicit descendants follow directed edges only") {
    Cpdag g(3);
    g.add_directed(0, 1);
    g.add_directed(1, 2);
    CHECK(explicit_descendants(g, 0) == std::vector<NodeId>{0, 1, 2});

    Cpdag h(2);
    h.add_undirected(0, 1);
    CHECK(explicit_descendants(h, 0) == std::vector<NodeId>{0});
}

TEST_CASE("explicit descendants equal transitive closure of the directed subgraph") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Dag d = test_dag(8, 2.0, 4000 + seed);
        Cpdag g = cpdag_from_dag(d);
        const int n = 8;
        // Floyd-Warshall closure over directed edges.
        std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
        for (NodeId v = 0; v < n; ++v) reach[v][v] = true;
        for (const auto& [a, b] : g.directed_edges()) reach[a][b] = true;
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (reach[i][k] && reach[k][j]) reach[i][j] = true;
        for (NodeId v = 0; v < n; ++v) {
            std::vector<NodeId> expect;
            for (NodeId u = 0; u < n; ++u)
                if (reach[v][u]) expect.push_back(u);
            REQUIRE(explicit_descendants(g, v) == expect);
        }
    }
}

TEST_CASE("possible ancestry matches membership in at least one MEC member") {
    Cpdag path(3);
    path.add_undirected(0, 1);
    path.add_undirected(1, 2);
    CHECK(possible_ancestor(path, 0, 2));

    Cpdag rev(2);
    rev.add_directed(1, 0);
    CHECK_FALSE(possible_ancestor(rev, 0, 1));

    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        int n = 4 + static_cast<int>(seed % 4);  // 4..7
        Dag d = test_dag(n, 2.0, 5000 + seed);
        Cpdag g = cpdag_from_dag(d);
        auto members = oracle::enumerate_mec(g);
        for (NodeId x = 0; x < n; ++x)
            for (NodeId y = 0; y < n; ++y) {
                if (x == y) continue;
                bool in_some = false;
                for (const Dag& m : members) {
                    auto de = m.descendants(x);
                    if (std::binary_search(de.begin(), de.end(), y)) {
                        in_some = true;
                        break;
                    }
                }
                CAPTURE(seed);
                REQUIRE(possible_ancestor(g, x, y) == in_some);
            }
    }
}

TEST_CASE("amenability matches the shared-valid-set criterion on possible-ancestor pairs") {
    Cpdag direct(3);
    direct.add_directed(0, 1);
    CHECK(is_amenable_global(direct, 0, 1));

    Cpdag sib(3);
    sib.add_undirected(0, 1);
    sib.add_undirected(1, 2);
    CHECK_FALSE(is_amenable_global(sib, 0, 2));

    for (std::uint64_t seed = 0; seed < 120; ++seed) {
        int n = 4 + static_cast<int>(seed % 5);  // 4..8
        Dag d = test_dag(n, 2.0, 6000 + seed);
        Cpdag g = cpdag_from_dag(d);
        for (NodeId x = 0; x < n; ++x)
            for (NodeId y = 0; y < n; ++y) {
                if (x == y || !possible_ancestor(g, x, y)) continue;
                CAPTURE(seed);
                CAPTURE(x);
                CAPTURE(y);
                REQUIRE(is_amenable_global(g, x, y) == oracle::common_valid_set_exists(g, x, y));
            }
    }
}

TEST_CASE("optimal adjustment set on hand-built graphs") {
    Cpdag single(2);
    single.add_directed(0, 1);
    auto o = oset_from_cpdag(single, 0, 1);
    REQUIRE(o.has_value());
    CHECK(o->empty());

    // x -> m -> y with z -> m, z -> y; fully oriented.
    Cpdag g(4);  // x=0, m=1, y=2, z=3
    g.add_directed(0, 1);
    g.add_directed(1, 2);
    g.add_directed(3, 1);
    g.add_directed(3, 2);
    auto oset = oset_from_cpdag(g, 0, 2);
    REQUIRE(oset.has_value());
    CHECK(*oset == std::vector<NodeId>{3});

    CHECK_FALSE(oset_from_cpdag(g, 2, 0).has_value());  // not a possible ancestor
}

TEST_CASE("oset matches the parents-minus-forbidden formula and is valid") {
    int amenable_pairs = 0;
    for (std::uint64_t seed = 0; amenable_pairs < 500 && seed < 4000; ++seed) {
        int n = 5 + static_cast<int>(seed % 6);  // 5..10
        Dag d = test_dag(n, 2.2, 7000 + seed);
        Cpdag g = cpdag_from_dag(d);
        for (NodeId x = 0; x < n && amenable_pairs < 500; ++x)
            for (NodeId y = 0; y < n && amenable_pairs < 500; ++y) {
                if (x == y || !possible_ancestor(g, x, y) || !is_amenable_global(g, x, y)) continue;
                auto oset = oset_from_cpdag(g, x, y);
                REQUIRE(oset.has_value());
                ++amenable_pairs;

                // Direct evaluation: Pa(Cn) minus (De(Cn) and x), mediators
                // including y.
                auto cn = mediators(g, x, y);
                std::set<NodeId> forb{x};
                for (NodeId v : cn)
                    for (NodeId u : explicit_descendants(g, v)) forb.insert(u);
                std::set<NodeId> pa;
                for (NodeId v : cn)
                    for (NodeId p : g.parents(v)) pa.insert(p);
                std::vector<NodeId> direct;
                for (NodeId p : pa)
                    if (!forb.count(p)) direct.push_back(p);
                CAPTURE(seed);
                REQUIRE(*oset == direct);

                for (NodeId v : *oset) {
                    REQUIRE(v != x);
                    REQUIRE(std::find(cn.begin(), cn.end(), v) == cn.end());
                }
                REQUIRE(oracle::is_valid_adjustment_set(d, x, y, *oset));
            }
    }
    CHECK(amenable_pairs == 500);
}

TEST_CASE("graph files round-trip through json and edge list") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Dag d = test_dag(7, 2.0, 8000 + seed);
        Cpdag g = cpdag_from_dag(d);
        NamedGraph named = NamedGraph::from_cpdag(g);
        NamedGraph from_json = graph_from_json(graph_to_json(named));
        CHECK(from_json.graph == g);
        CHECK(from_json.names == named.names);
        if (g.num_edges() > 0) {
            NamedGraph from_text = graph_from_edge_list(graph_to_edge_list(named));
            CHECK(skeleton(from_text.graph).size() == skeleton(g).size());
        }
    }
}
