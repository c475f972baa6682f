#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <random>

#include "loadisc/citest.hpp"
#include "loadisc/simulate.hpp"
#include "test_support.hpp"

using namespace loadisc;
using namespace loadisc::testing;

TEST_CASE("queries canonicalize to x < y with a sorted conditioning set") {
    CiQuery a(3, 1, {7, 2});
    CHECK(a.x == 1);
    CHECK(a.y == 3);
    CHECK(a.s == std::vector<NodeId>{2, 7});
    CHECK(a == CiQuery(1, 3, {2, 7}));
    CHECK_THROWS_AS(CiQuery(1, 1, {}), std::invalid_argument);
    CHECK_THROWS_AS(CiQuery(1, 2, {1}), std::invalid_argument);
}

TEST_CASE("dsep tester answers exactly like d_separated") {
    Dag collider(3, {{0, 1}, {2, 1}});
    auto t = dsep_tester(collider);
    CHECK(t->independent(0, 2, {}));
    CHECK_FALSE(t->independent(0, 2, {1}));

    Dag c3 = chain(3);
    auto tc = dsep_tester(c3);
    CHECK_FALSE(tc->independent(0, 2, {}));

    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Dag d = test_dag(6, 2.0, 100 + seed);
        auto tester = dsep_tester(d);
        std::vector<NodeId> all{0, 1, 2, 3, 4, 5};
        for (NodeId x = 0; x < 6; ++x)
            for (NodeId y = x + 1; y < 6; ++y)
                for (const auto& s : subsets_of(set_minus(all, {x, y})))
                    REQUIRE(tester->independent(x, y, s) == d_separated(d, x, y, s));
    }
}

TEST_CASE("fisher-z statistic matches the reference evaluation") {
    // sqrt(97) * atanh(0.3), checked against an independent statistics package.
    CHECK(fisher_z_statistic(0.3, 100, 0) == doctest::Approx(3.0484145686646587).epsilon(1e-12));
    CHECK(fisher_z_statistic(0.0, 100, 0) == 0.0);
    CHECK(fisher_z_statistic(1.0, 100, 0) == std::numeric_limits<double>::infinity());
}

TEST_CASE("fisher-z on exactly uncorrelated columns is independent at any level") {
    Dataset d(8, {"a", "b"}, ColumnKind::Continuous);
    double av[8] = {1, -1, 1, -1, 1, -1, 1, -1};
    double bv[8] = {1, 1, -1, -1, 1, 1, -1, -1};
    for (int r = 0; r < 8; ++r) {
        d.set_value(r, 0, av[r]);
        d.set_value(r, 1, bv[r]);
    }
    auto t = fisher_z_tester(d, 0.99);
    CHECK(t->independent(0, 1, {}));
}

TEST_CASE("fisher-z calibration on linear gaussian data") {
    // x -> y with weight 1 and an exogenous z.
    Dag d(3, {{0, 1}});
    Scm scm = Scm::linear_gaussian(Dag(d), std::map<Edge, double>{{{0, 1}, 1.0}});
    int xz_independent = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Dataset data = sample_linear_gaussian(scm, 10000, 0xF00 + seed);
        auto t = fisher_z_tester(data, 0.01);
        REQUIRE_FALSE(t->independent(0, 1, {}));
        if (t->independent(0, 2, {})) ++xz_independent;
    }
    CHECK(xz_independent >= 95);
}

TEST_CASE("fisher-z rejects oversized queries and degenerate covariance") {
    Dataset d(5, {"a", "b", "c", "d", "e"}, ColumnKind::Continuous);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss;
    for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 5; ++c) d.set_value(r, c, gauss(rng));
    auto t = fisher_z_tester(d, 0.01);
    CHECK_THROWS_AS(t->independent(0, 1, {2, 3, 4}), QueryTooLargeError);

    // Duplicated column: the covariance submatrix is singular.
    Dataset dup(50, {"a", "b", "c"}, ColumnKind::Continuous);
    for (int r = 0; r < 50; ++r) {
        double v = gauss(rng);
        dup.set_value(r, 0, v);
        dup.set_value(r, 1, v);
        dup.set_value(r, 2, gauss(rng));
    }
    auto td = fisher_z_tester(dup, 0.01);
    CHECK_FALSE(td->independent(0, 1, {}));
    CHECK_FALSE(td->independent(0, 2, {1}));  // conditioning block singular -> dependent
}

TEST_CASE("g-square statistic on a uniform table is zero") {
    auto [g2, df] = g_square_table({{25, 25}, {25, 25}});
    CHECK(g2 == doctest::Approx(0.0));
    CHECK(df == 1);
}

TEST_CASE("boost chi-squared tail agrees with the reference") {
    boost::math::chi_squared chi(2.0);
    CHECK(boost::math::cdf(boost::math::complement(chi, 6.0)) ==
          doctest::Approx(0.04978706836786395).epsilon(1e-12));
}

TEST_CASE("g-square calibration on binary data") {
    // Two independent fair coins.
    Scm coins = Scm::binary_cpt(Dag(2, {}), {{0.5}, {0.5}});
    int independent = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Dataset data = sample_binary_cpt(coins, 10000, 0xC0 + seed);
        auto t = g_square_tester(data, 0.01);
        if (t->independent(0, 1, {})) ++independent;
    }
    CHECK(independent >= 95);

    // y copies x with probability 0.9.
    Scm copy = Scm::binary_cpt(Dag(2, {{0, 1}}), {{0.5}, {0.1, 0.9}});
    Dataset data = sample_binary_cpt(copy, 10000, 0xBEEF);
    auto t = g_square_tester(data, 0.01);
    CHECK_FALSE(t->independent(0, 1, {}));
}

TEST_CASE("g-square honors the cell budget and the zero-df convention") {
    Scm coins = Scm::binary_cpt(Dag(3, {}), {{0.5}, {0.5}, {0.5}});
    Dataset data = sample_binary_cpt(coins, 100, 1);
    auto t = g_square_tester(data, 0.01, 7);  // 2*2*2 > 7
    CHECK_THROWS_AS(t->independent(0, 1, {2}), QueryTooLargeError);

    // A constant column kills every stratum marginal, so df drops to zero.
    Dataset flat(40, {"a", "b"}, ColumnKind::Discrete);
    for (int r = 0; r < 40; ++r) {
        flat.set_value(r, 0, 0.0);
        flat.set_value(r, 1, r % 2);
    }
    flat.set_arity(0, 2);
    flat.set_arity(1, 2);
    auto tf = g_square_tester(flat, 0.01);
    CHECK(tf->independent(0, 1, {}));
}

TEST_CASE("caching wrapper evaluates each canonical query once") {
    Dag d = chain(4);
    auto t = caching_wrapper(dsep_tester(d));
    CHECK(t->independent(0, 2, {1}));
    CHECK(t->independent(0, 2, {1}));
    CHECK(t->stats().executed == 1);
    CHECK(t->stats().cache_hits == 1);

    CHECK(t->independent(2, 0, {1}) == t->independent(0, 2, {1}));
    CHECK(t->stats().executed == 1);

    auto fresh = caching_wrapper(dsep_tester(test_dag(8, 2.0, 42)));
    std::mt19937_64 rng(11);
    std::set<CiQuery, std::function<bool(const CiQuery&, const CiQuery&)>> distinct(
        [](const CiQuery& a, const CiQuery& b) {
            return std::tie(a.x, a.y, a.s) < std::tie(b.x, b.y, b.s);
        });
    for (int i = 0; i < 1000; ++i) {
        NodeId x = rng() % 8, y = rng() % 8;
        if (x == y) continue;
        std::vector<NodeId> s;
        for (NodeId v = 0; v < 8; ++v)
            if (v != x && v != y && (rng() & 1)) s.push_back(v);
        CiQuery q(x, y, s);
        distinct.insert(q);
        fresh->independent(q);
    }
    CHECK(fresh->stats().executed == static_cast<long long>(distinct.size()));
}

TEST_CASE("all testers are symmetric in the targets") {
    Dag d = test_dag(5, 2.0, 77);
    Scm lin = Scm::linear_gaussian(d, 3);
    Dataset cont = sample_linear_gaussian(lin, 500, 4);
    Scm bin = Scm::binary_cpt(d, 5);
    Dataset disc = sample_binary_cpt(bin, 500, 6);

    std::vector<std::unique_ptr<CiTester>> testers;
    testers.push_back(dsep_tester(d));
    testers.push_back(fisher_z_tester(cont, 0.05));
    testers.push_back(g_square_tester(disc, 0.05));
    for (auto& t : testers)
        for (NodeId x = 0; x < 5; ++x)
            for (NodeId y = 0; y < 5; ++y) {
                if (x == y) continue;
                std::vector<NodeId> s;
                for (NodeId v = 0; v < 5; ++v)
                    if (v != x && v != y && ((x + y + v) % 2)) s.push_back(v);
                REQUIRE(t->independent(x, y, s) == t->independent(y, x, s));
            }
}
