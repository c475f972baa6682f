#include "loadisc/load.hpp"

#include <algorithm>

namespace loadisc {

std::string to_string(Relation r) {
    switch (r) {
        case Relation::DefNonAn: return "DefNonAn";
        case Relation::PossAn: return "PossAn";
        case Relation::ExplAn: return "ExplAn";
    }
    return "?";
}

std::string to_string(AdjKind k) {
    switch (k) {
        case AdjKind::None: return "none";
        case AdjKind::Optimal: return "optimal";
        case AdjKind::LocallyValid: return "locally_valid";
    }
    return "?";
}

namespace {

std::vector<NodeId> set_union_sorted(std::vector<NodeId> a, const std::vector<NodeId>& b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
}

}  // namespace

bool is_expl_an(NodeId x, NodeId y, const LocalGraph& gx, CiTester& tester) {
    if (gx.graph.has_directed(x, y)) return true;
    if (gx.graph.has_directed(y, x) || gx.graph.has_undirected(x, y)) return false;
    auto cond = set_union_sorted(gx.parents(), gx.siblings());
    return !tester.independent(x, y, cond);
}

bool is_poss_an(NodeId x, NodeId y, const LocalGraph& gx, CiTester& tester) {
    if (gx.graph.has_directed(x, y) || gx.graph.has_undirected(x, y)) return true;
    if (gx.graph.has_directed(y, x)) return false;
    return !tester.independent(x, y, gx.parents());
}

RelateResult local_relate(NodeId x, NodeId y, CiTester& tester, DiscoveryCache& cache) {
    if (x == y) throw std::invalid_argument("local_relate: x == y");
    RelateResult r;
    r.gx = mb_by_mb(x, tester, cache);
    r.gy = mb_by_mb(y, tester, cache);
    if (is_expl_an(x, y, r.gx, tester)) {
        r.xy = Relation::ExplAn;
    } else if (is_expl_an(y, x, r.gy, tester)) {
        r.yx = Relation::ExplAn;
    } else {
        if (is_poss_an(x, y, r.gx, tester)) r.xy = Relation::PossAn;
        if (is_poss_an(y, x, r.gy, tester)) r.yx = Relation::PossAn;
    }
    return r;
}

bool local_amen_test(NodeId t, NodeId o, NodeId v, const LocalGraph& gv, CiTester& tester) {
    if (v == o || gv.graph.adjacent(v, o)) return false;
    auto cond = gv.parents();
    cond = set_union_sorted(std::move(cond), {t});
    return tester.independent(v, o, cond);
}

std::vector<std::vector<NodeId>> local_valid_sets(NodeId x, const LocalGraph& gx) {
    const auto pa = gx.parents();
    const auto sib = gx.siblings();
    const int k = static_cast<int>(sib.size());
    std::vector<std::vector<NodeId>> out;
    for (std::uint64_t mask = 0; mask < (1ULL << k); ++mask) {
        std::vector<NodeId> s;
        for (int i = 0; i < k; ++i)
            if (mask & (1ULL << i)) s.push_back(sib[i]);
        bool valid = true;
        for (NodeId v : s) {
            for (NodeId w : s)
                if (v != w && !gx.graph.adjacent(v, w)) valid = false;
            for (NodeId w : pa)
                if (v != w && !gx.graph.adjacent(v, w)) valid = false;
            if (!valid) break;
        }
        if (valid) out.push_back(set_union_sorted(pa, s));
    }
    return out;
}

namespace {

/// Steps 2-5 shared between the full run and the background-knowledge
/// variant. Treatment and outcome are fixed; result fields for the reverse
/// direction are assumed already set.
void load_identify_and_adjust(NodeId t, NodeId o, const LocalGraph& gt, CiTester& tester,
                              DiscoveryCache& cache, std::map<NodeId, LocalGraph>& locals,
                              DirectionResult& fwd) {
    // Step 2: amenability via the siblings of the treatment.
    for (NodeId v : gt.siblings()) {
        auto it = locals.find(v);
        if (it == locals.end()) it = locals.emplace(v, mb_by_mb(v, tester, cache)).first;
        if (!local_amen_test(t, o, v, it->second, tester)) {
            fwd.kind = AdjKind::LocallyValid;
            fwd.sets = local_valid_sets(t, gt);
            return;
        }
    }
    fwd.is_ident = true;

    // Step 3: explicit descendants of the treatment, from its local graph.
    std::vector<NodeId> expl_de;
    for (NodeId v = 0; v < tester.num_vars(); ++v) {
        if (v == t || v == o) continue;
        if (is_expl_an(t, v, gt, tester)) expl_de.push_back(v);
    }

    // Step 4: mediators are explicit descendants of t that are explicit
    // ancestors of o; each candidate gets its own local graph.
    std::vector<NodeId> cn;
    for (NodeId v : expl_de) {
        auto it = locals.find(v);
        if (it == locals.end()) it = locals.emplace(v, mb_by_mb(v, tester, cache)).first;
        if (is_expl_an(v, o, it->second, tester)) cn.push_back(v);
    }

    // Step 5: parents of the mediators and the outcome, minus the mediators
    // and the targets.
    std::vector<NodeId> oset;
    std::vector<NodeId> cn_and_o = set_union_sorted(cn, {o});
    for (NodeId v : cn_and_o) {
        const LocalGraph& gv = locals.at(v);
        oset = set_union_sorted(std::move(oset), gv.parents());
    }
    std::erase_if(oset, [&](NodeId v) {
        return v == t || v == o || std::binary_search(cn.begin(), cn.end(), v);
    });
    fwd.kind = AdjKind::Optimal;
    fwd.sets = {oset};
}

}  // namespace

LoadResult load(NodeId x, NodeId y, CiTester& tester) {
    DiscoveryCache cache;
    return load(x, y, tester, cache);
}

LoadResult load(NodeId x, NodeId y, CiTester& tester, DiscoveryCache& cache) {
    if (x == y) throw std::invalid_argument("load: x == y");
    LoadResult res;
    res.x = x;
    res.y = y;

    // Step 1: determine causal relations between the targets.
    RelateResult rel = local_relate(x, y, tester, cache);
    res.xy.relation = rel.xy;
    res.yx.relation = rel.yx;

    std::map<NodeId, LocalGraph> locals;
    locals.emplace(x, rel.gx);
    locals.emplace(y, rel.gy);

    NodeId t = -1, o = -1;
    if (rel.xy == Relation::ExplAn) {
        t = x;
        o = y;
    } else if (rel.yx == Relation::ExplAn) {
        t = y;
        o = x;
    } else {
        if (rel.xy == Relation::PossAn) {
            res.xy.kind = AdjKind::LocallyValid;
            res.xy.sets = local_valid_sets(x, rel.gx);
        }
        if (rel.yx == Relation::PossAn) {
            res.yx.kind = AdjKind::LocallyValid;
            res.yx.sets = local_valid_sets(y, rel.gy);
        }
        if (rel.xy == Relation::DefNonAn) res.xy.is_ident = true;
        if (rel.yx == Relation::DefNonAn) res.yx.is_ident = true;
        return res;
    }

    DirectionResult& fwd = (t == x) ? res.xy : res.yx;
    DirectionResult& rev = (t == x) ? res.yx : res.xy;
    rev.is_ident = true;  // zero effect in the reverse direction

    load_identify_and_adjust(t, o, locals.at(t), tester, cache, locals, fwd);
    return res;
}

LoadResult load_star(NodeId treatment, NodeId outcome, CiTester& tester) {
    if (treatment == outcome) throw std::invalid_argument("load_star: identical targets");
    DiscoveryCache cache;
    LoadResult res;
    res.x = treatment;
    res.y = outcome;
    res.xy.relation = Relation::ExplAn;
    res.yx.relation = Relation::DefNonAn;
    res.yx.is_ident = true;

    std::map<NodeId, LocalGraph> locals;
    locals.emplace(treatment, mb_by_mb(treatment, tester, cache));
    locals.emplace(outcome, mb_by_mb(outcome, tester, cache));

    load_identify_and_adjust(treatment, outcome, locals.at(treatment), tester, cache, locals,
                             res.xy);
    return res;
}

LoadResult mb_by_mb_plus(NodeId x, NodeId y, CiTester& tester) {
    if (x == y) throw std::invalid_argument("mb_by_mb_plus: x == y");
    DiscoveryCache cache;
    LoadResult res;
    res.x = x;
    res.y = y;
    RelateResult rel = local_relate(x, y, tester, cache);
    res.xy.relation = rel.xy;
    res.yx.relation = rel.yx;
    if (rel.xy == Relation::ExplAn) {
        res.xy.kind = AdjKind::LocallyValid;
        res.xy.sets = local_valid_sets(x, rel.gx);
    } else if (rel.yx == Relation::ExplAn) {
        res.yx.kind = AdjKind::LocallyValid;
        res.yx.sets = local_valid_sets(y, rel.gy);
    } else {
        if (rel.xy == Relation::PossAn) {
            res.xy.kind = AdjKind::LocallyValid;
            res.xy.sets = local_valid_sets(x, rel.gx);
        }
        if (rel.yx == Relation::PossAn) {
            res.yx.kind = AdjKind::LocallyValid;
            res.yx.sets = local_valid_sets(y, rel.gy);
        }
    }
    return res;
}

}  // namespace loadisc
