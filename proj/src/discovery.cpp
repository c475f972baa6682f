#include "loadisc/discovery.hpp"

#include <algorithm>
#include <deque>

namespace loadisc {

namespace {

std::pair<NodeId, NodeId> canonical(NodeId a, NodeId b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

std::vector<NodeId> sorted_copy(std::vector<NodeId> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

bool is_subset(const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
    // both sorted
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

int GraphFragment::local(NodeId global) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), global);
    if (it == nodes.end() || *it != global) return -1;
    return static_cast<int>(it - nodes.begin());
}

const std::vector<NodeId>* DiscoveryCache::sepset(NodeId a, NodeId b) const {
    auto it = sepsets_.find(canonical(a, b));
    return it == sepsets_.end() ? nullptr : &it->second;
}

void DiscoveryCache::record_sepset(NodeId a, NodeId b, std::vector<NodeId> s) {
    sepsets_.emplace(canonical(a, b), sorted_copy(std::move(s)));
}

const std::vector<NodeId>* DiscoveryCache::mb(NodeId v) const {
    auto it = mbs_.find(v);
    return it == mbs_.end() ? nullptr : &it->second;
}

void DiscoveryCache::store_mb(NodeId v, std::vector<NodeId> blanket) {
    mbs_[v] = sorted_copy(std::move(blanket));
}

std::vector<NodeId> DiscoveryCache::nodes_with_mb() const {
    std::vector<NodeId> out;
    out.reserve(mbs_.size());
    for (const auto& [v, _] : mbs_) out.push_back(v);
    return out;
}

const std::vector<NodeId>* DiscoveryCache::grow_region(NodeId v) const {
    auto it = grow_regions_.find(v);
    return it == grow_regions_.end() ? nullptr : &it->second;
}

void DiscoveryCache::store_grow_region(NodeId v, std::vector<NodeId> touched) {
    grow_regions_[v] = sorted_copy(std::move(touched));
}

const GraphFragment* DiscoveryCache::local_structure_of(NodeId v) const {
    auto it = locals_.find(v);
    return it == locals_.end() ? nullptr : &it->second;
}

void DiscoveryCache::store_local_structure(NodeId v, GraphFragment f) {
    locals_.emplace(v, std::move(f));
}

bool for_each_combination(int m, int k, const std::function<bool(const std::vector<int>&)>& visit) {
    if (k > m) return false;
    std::vector<int> ix(k);
    for (int i = 0; i < k; ++i) ix[i] = i;
    while (true) {
        if (visit(ix)) return true;
        int i = k - 1;
        while (i >= 0 && ix[i] == m - k + i) --i;
        if (i < 0) return false;
        ++ix[i];
        for (int j = i + 1; j < k; ++j) ix[j] = ix[j - 1] + 1;
    }
}

std::vector<NodeId> grow_shrink_mb(NodeId v, CiTester& tester, const std::vector<NodeId>& candidates,
                                   std::vector<NodeId>* touched) {
    for (NodeId w : candidates)
        if (w == v) throw std::invalid_argument("grow_shrink_mb: v among candidates");
    std::vector<NodeId> cand = sorted_copy(candidates);
    std::vector<std::uint8_t> in_blanket(tester.num_vars(), 0);
    std::vector<NodeId> blanket;
    auto rebuild = [&] {
        blanket.clear();
        for (NodeId w : cand)
            if (in_blanket[w]) blanket.push_back(w);
    };

    bool changed = true;
    while (changed) {
        changed = false;
        for (NodeId w : cand) {
            if (in_blanket[w]) continue;
            if (!tester.independent(v, w, blanket)) {
                in_blanket[w] = 1;
                rebuild();
                changed = true;
                if (touched) touched->push_back(w);
            }
        }
    }
    changed = true;
    while (changed) {
        changed = false;
        for (NodeId w : std::vector<NodeId>(blanket)) {
            if (!in_blanket[w]) continue;
            std::vector<NodeId> rest;
            for (NodeId u : blanket)
                if (u != w && in_blanket[u]) rest.push_back(u);
            if (tester.independent(v, w, rest)) {
                in_blanket[w] = 0;
                rebuild();
                changed = true;
            }
        }
    }
    return blanket;
}

bool mb_adjacent(NodeId x, NodeId y, const std::vector<NodeId>& mb_x, CiTester& tester,
                 DiscoveryCache* cache) {
    std::vector<NodeId> others;
    bool seen_y = false;
    for (NodeId w : sorted_copy(mb_x)) {
        if (w == y)
            seen_y = true;
        else
            others.push_back(w);
    }
    if (!seen_y) throw std::invalid_argument("mb_adjacent: y not in mb_x");
    const int m = static_cast<int>(others.size());
    for (int size = 0; size < m; ++size) {  // proper subsets only
        bool separated = for_each_combination(m, size, [&](const std::vector<int>& ix) {
            std::vector<NodeId> s;
            s.reserve(size);
            for (int i : ix) s.push_back(others[i]);
            if (tester.independent(x, y, s)) {
                if (cache) cache->record_sepset(x, y, s);
                return true;
            }
            return false;
        });
        if (separated) return false;
    }
    // When mb_x = {y} the quantifier is vacuous and y is adjacent: a spouse
    // always brings the shared child into the blanket.
    return true;
}

namespace {

using SepsetMap = std::map<std::pair<NodeId, NodeId>, std::vector<NodeId>>;

/// PC-stable skeleton over the given (sorted, global) node subset.
///
/// Separating sets that decide orientations must themselves lie inside the
/// window: a set recorded by a different window can prove non-adjacency but
/// cannot classify colliders on this window's (possibly spurious) edges. So a
/// cached sepset only pre-removes a pair when it is a subset of the window;
/// everything else is re-searched in-window. window_sepsets collects the
/// in-window sets; new ones are also recorded into the shared cache.
Cpdag pc_skeleton(const std::vector<NodeId>& nodes, CiTester& tester, DiscoveryCache& cache,
                  SepsetMap& window_sepsets) {
    const int k = static_cast<int>(nodes.size());
    Cpdag g(k);
    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b) {
            const auto* s = cache.sepset(nodes[a], nodes[b]);
            if (s && std::includes(nodes.begin(), nodes.end(), s->begin(), s->end()))
                window_sepsets[canonical(nodes[a], nodes[b])] = *s;
            else
                g.add_undirected(a, b);
        }

    for (int level = 0;; ++level) {
        bool any_candidate = false;
        std::vector<std::vector<NodeId>> snapshot(k);
        for (int a = 0; a < k; ++a) snapshot[a] = g.adjacent(a);

        for (int a = 0; a < k; ++a) {
            for (int b : snapshot[a]) {
                if (b < a || !g.adjacent(a, b)) continue;
                bool removed = false;
                for (int side = 0; side < 2 && !removed; ++side) {
                    int from = side == 0 ? a : b;
                    int other = side == 0 ? b : a;
                    std::vector<int> cand;
                    for (int w : snapshot[from])
                        if (w != other) cand.push_back(w);
                    if (static_cast<int>(cand.size()) < level) continue;
                    if (static_cast<int>(cand.size()) > level) any_candidate = true;
                    removed = for_each_combination(
                        static_cast<int>(cand.size()), level, [&](const std::vector<int>& ix) {
                            std::vector<NodeId> s;
                            s.reserve(level);
                            for (int i : ix) s.push_back(nodes[cand[i]]);
                            if (tester.independent(nodes[a], nodes[b], s)) {
                                std::sort(s.begin(), s.end());
                                window_sepsets[canonical(nodes[a], nodes[b])] = s;
                                cache.record_sepset(nodes[a], nodes[b], s);
                                return true;
                            }
                            return false;
                        });
                }
                if (removed) g.remove_edge(a, b);
            }
        }
        if (!any_candidate) break;
    }
    return g;
}

/// Orients unshielded colliders a -> b <- c (b not in sepset(a, c)) in a
/// fragment with local indexing, using only this window's separating sets.
/// Conflicting claims keep the first orientation and are counted.
void orient_v_structures(GraphFragment& f, const SepsetMap& window_sepsets,
                         DiscoveryCache& cache) {
    const int k = static_cast<int>(f.nodes.size());
    for (int b = 0; b < k; ++b) {
        auto adj = f.graph.adjacent(b);
        for (std::size_t i = 0; i < adj.size(); ++i) {
            for (std::size_t j = i + 1; j < adj.size(); ++j) {
                int a = adj[i], c = adj[j];
                if (f.graph.adjacent(a, c)) continue;
                auto it = window_sepsets.find(canonical(f.nodes[a], f.nodes[c]));
                if (it == window_sepsets.end()) continue;
                const auto* s = &it->second;
                if (std::binary_search(s->begin(), s->end(), f.nodes[b])) continue;
                for (int parent : {a, c}) {
                    if (f.graph.has_undirected(parent, b))
                        f.graph.orient(parent, b);
                    else if (f.graph.has_directed(b, parent))
                        cache.count_conflict();
                }
            }
        }
    }
}

void merge_directed(Cpdag& g, NodeId from, NodeId to, DiscoveryCache& cache) {
    if (g.has_directed(from, to)) return;
    if (g.has_undirected(from, to)) {
        g.orient(from, to);
        return;
    }
    if (g.has_directed(to, from)) {
        cache.count_conflict();
        return;
    }
    g.add_directed(from, to);
}

void merge_undirected(Cpdag& g, NodeId a, NodeId b) {
    if (g.adjacent(a, b)) return;  // an oriented edge is more informed
    g.add_undirected(a, b);
}

/// Puts the edges connected to x and the v-structures containing x from the
/// fragment into the merged graph.
void merge_focal(Cpdag& g, const GraphFragment& f, NodeId x, DiscoveryCache& cache) {
    const int xl = f.local(x);
    const int k = static_cast<int>(f.nodes.size());
    for (int w = 0; w < k; ++w) {
        if (w == xl || !f.graph.adjacent(xl, w)) continue;
        if (f.graph.has_directed(xl, w))
            merge_directed(g, x, f.nodes[w], cache);
        else if (f.graph.has_directed(w, xl))
            merge_directed(g, f.nodes[w], x, cache);
        else
            merge_undirected(g, x, f.nodes[w]);
    }
    // V-structures a -> b <- c with x among {a, b, c}; both edges carry over.
    for (int b = 0; b < k; ++b) {
        auto pa = f.graph.parents(b);
        for (std::size_t i = 0; i < pa.size(); ++i)
            for (std::size_t j = i + 1; j < pa.size(); ++j) {
                int a = pa[i], c = pa[j];
                if (f.graph.adjacent(a, c)) continue;
                if (xl != a && xl != b && xl != c) continue;
                merge_directed(g, f.nodes[a], f.nodes[b], cache);
                merge_directed(g, f.nodes[c], f.nodes[b], cache);
            }
    }
}

std::vector<NodeId> mb_plus(NodeId v, const std::vector<NodeId>& mb) {
    std::vector<NodeId> out = mb;
    out.push_back(v);
    return sorted_copy(std::move(out));
}

}  // namespace

GraphFragment substructure(const Cpdag& g, std::vector<NodeId> nodes) {
    GraphFragment f;
    f.nodes = sorted_copy(std::move(nodes));
    const int k = static_cast<int>(f.nodes.size());
    f.graph = Cpdag(k);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
            if (a == b) continue;
            if (g.has_directed(f.nodes[a], f.nodes[b])) f.graph.add_directed(a, b);
            if (b > a && g.has_undirected(f.nodes[a], f.nodes[b])) f.graph.add_undirected(a, b);
        }
    return f;
}

GraphFragment substructure(const GraphFragment& f, std::vector<NodeId> nodes) {
    GraphFragment out;
    out.nodes = sorted_copy(std::move(nodes));
    const int k = static_cast<int>(out.nodes.size());
    out.graph = Cpdag(k);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
            if (a == b) continue;
            int fa = f.local(out.nodes[a]), fb = f.local(out.nodes[b]);
            if (fa < 0 || fb < 0) continue;
            if (f.graph.has_directed(fa, fb)) out.graph.add_directed(a, b);
            if (b > a && f.graph.has_undirected(fa, fb)) out.graph.add_undirected(a, b);
        }
    return out;
}

GraphFragment local_structure(NodeId v, const std::vector<NodeId>& mb, CiTester& tester,
                              DiscoveryCache& cache) {
    GraphFragment f;
    f.nodes = mb_plus(v, mb);
    SepsetMap window_sepsets;
    f.graph = pc_skeleton(f.nodes, tester, cache, window_sepsets);
    orient_v_structures(f, window_sepsets, cache);
    return f;
}

void orient_undirected_edges(Cpdag& g, const DiscoveryCache& cache) {
    const int n = g.num_nodes();
    bool changed = true;
    while (changed) {
        changed = false;
        // Rule: a -> b - c with b in a recorded sepset(a, c).
        for (NodeId b = 0; b < n; ++b) {
            for (NodeId c : g.siblings(b)) {
                bool oriented = false;
                for (NodeId a : g.parents(b)) {
                    if (a == c) continue;
                    const auto* s = cache.sepset(a, c);
                    if (s && std::binary_search(s->begin(), s->end(), b)) {
                        g.orient(b, c);
                        changed = true;
                        oriented = true;
                        break;
                    }
                }
                if (oriented) continue;
                // Rule: a -> b -> c with a - c pending (here: b - c sibling pair
                // scanned as (c, b) when the outer loop reaches it).
            }
        }
        // Rule: a -> b -> c and c - a.
        for (NodeId a = 0; a < n; ++a) {
            for (NodeId c : g.siblings(a)) {
                bool fire = false;
                for (NodeId b : g.children(a)) {
                    if (g.has_directed(b, c)) {
                        fire = true;
                        break;
                    }
                }
                if (fire) {
                    g.orient(a, c);
                    changed = true;
                }
            }
        }
        // Rule: a - b with a - c -> b, a - d -> b and a in sepset(c, d).
        for (NodeId a = 0; a < n; ++a) {
            for (NodeId b : g.siblings(a)) {
                std::vector<NodeId> mid;
                for (NodeId m : g.siblings(a))
                    if (m != b && g.has_directed(m, b)) mid.push_back(m);
                bool fire = false;
                for (std::size_t i = 0; i < mid.size() && !fire; ++i)
                    for (std::size_t j = i + 1; j < mid.size() && !fire; ++j) {
                        const auto* s = cache.sepset(mid[i], mid[j]);
                        if (s && std::binary_search(s->begin(), s->end(), a)) fire = true;
                    }
                if (fire) {
                    g.orient(a, b);
                    changed = true;
                }
            }
        }
    }
}

LocalGraph mb_by_mb(NodeId target, CiTester& tester, DiscoveryCache& cache) {
    const int n = tester.num_vars();
    if (target < 0 || target >= n) throw std::out_of_range("mb_by_mb: target out of range");

    Cpdag merged(n);
    std::vector<std::uint8_t> done(n, 0), waiting(n, 0);
    std::deque<NodeId> waitlist{target};
    waiting[target] = 1;
    std::map<NodeId, GraphFragment> run_locals;

    std::vector<NodeId> all;
    all.reserve(n);
    for (NodeId v = 0; v < n; ++v) all.push_back(v);

    while (!waitlist.empty()) {
        NodeId x = waitlist.front();
        waitlist.pop_front();
        waiting[x] = 0;

        const std::vector<NodeId>* mbp = cache.mb(x);
        if (!mbp) {
            std::vector<NodeId> candidates;
            for (NodeId v : all)
                if (v != x) candidates.push_back(v);
            std::vector<NodeId> touched;
            cache.store_mb(x, grow_shrink_mb(x, tester, candidates, &touched));
            cache.store_grow_region(x, std::move(touched));
            mbp = cache.mb(x);
        }
        const std::vector<NodeId>& mb = *mbp;

        for (NodeId w : mb)
            if (!done[w] && !waiting[w]) {
                waitlist.push_back(w);
                waiting[w] = 1;
            }
        done[x] = 1;

        const GraphFragment* lx = cache.local_structure_of(x);
        if (!lx) {
            auto window = mb_plus(x, mb);
            const GraphFragment* host = nullptr;
            for (const auto& [xp, frag] : run_locals) {
                const auto* mbxp = cache.mb(xp);
                if (!mbxp) continue;
                if (is_subset(window, mb_plus(xp, *mbxp))) {
                    host = &frag;
                    break;
                }
            }
            if (host) {
                run_locals[x] = substructure(*host, window);
            } else {
                bool mb_done = std::all_of(mb.begin(), mb.end(), [&](NodeId w) { return done[w] != 0; });
                if (mb_done) {
                    run_locals[x] = substructure(merged, window);
                } else {
                    GraphFragment learned = local_structure(x, mb, tester, cache);
                    cache.store_local_structure(x, learned);
                    run_locals[x] = std::move(learned);
                }
            }
            lx = &run_locals[x];
        } else {
            run_locals[x] = *lx;
            lx = &run_locals[x];
        }

        merge_focal(merged, *lx, x, cache);
        orient_undirected_edges(merged, cache);

        if (!waitlist.empty()) {
            // Drop waiting nodes no longer reachable from the target without
            // entering a directed edge against its direction.
            std::vector<std::uint8_t> reach(n, 0);
            std::deque<NodeId> frontier{target};
            reach[target] = 1;
            while (!frontier.empty()) {
                NodeId u = frontier.front();
                frontier.pop_front();
                for (NodeId w = 0; w < n; ++w) {
                    if (reach[w]) continue;
                    if (merged.has_directed(u, w) || merged.has_undirected(u, w)) {
                        reach[w] = 1;
                        frontier.push_back(w);
                    }
                }
            }
            std::deque<NodeId> kept;
            for (NodeId w : waitlist) {
                if (reach[w])
                    kept.push_back(w);
                else
                    waiting[w] = 0;
            }
            waitlist.swap(kept);
        }
    }
    return LocalGraph{target, std::move(merged)};
}

Cpdag pc_algorithm(CiTester& tester) {
    const int n = tester.num_vars();
    DiscoveryCache cache;
    std::vector<NodeId> nodes(n);
    for (NodeId v = 0; v < n; ++v) nodes[v] = v;
    GraphFragment f;
    f.nodes = nodes;
    std::map<std::pair<NodeId, NodeId>, std::vector<NodeId>> window_sepsets;
    f.graph = pc_skeleton(nodes, tester, cache, window_sepsets);
    orient_v_structures(f, window_sepsets, cache);
    meek_closure(f.graph, true);
    return f.graph;
}

}  // namespace loadisc
