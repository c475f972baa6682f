#include "loadisc/graph.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <stdexcept>

namespace loadisc {

namespace {

std::vector<NodeId> sorted_unique(std::vector<NodeId> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

}  // namespace

Dag::Dag(int n, const std::vector<Edge>& edges) : n_(n) {
    if (n < 0) throw std::invalid_argument("Dag: negative node count");
    adj_.assign(static_cast<std::size_t>(n) * n, 0);
    parents_.resize(n);
    children_.resize(n);
    for (const auto& [p, c] : edges) {
        check_node(p);
        check_node(c);
        if (p == c) throw std::invalid_argument("Dag: self-loop");
        if (adj_[idx(p, c)]) continue;
        if (adj_[idx(c, p)]) throw std::invalid_argument("Dag: edge in both directions");
        adj_[idx(p, c)] = 1;
        parents_[c].push_back(p);
        children_[p].push_back(c);
        ++num_edges_;
    }
    for (NodeId v = 0; v < n_; ++v) {
        std::sort(parents_[v].begin(), parents_[v].end());
        std::sort(children_[v].begin(), children_[v].end());
    }

    // Kahn's algorithm doubles as the acyclicity check.
    std::vector<int> indeg(n_, 0);
    for (NodeId v = 0; v < n_; ++v) indeg[v] = static_cast<int>(parents_[v].size());
    std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
    for (NodeId v = 0; v < n_; ++v)
        if (indeg[v] == 0) ready.push(v);
    topo_.reserve(n_);
    while (!ready.empty()) {
        NodeId v = ready.top();
        ready.pop();
        topo_.push_back(v);
        for (NodeId c : children_[v])
            if (--indeg[c] == 0) ready.push(c);
    }
    if (static_cast<int>(topo_.size()) != n_) throw std::invalid_argument("Dag: cycle detected");
}

void Dag::check_node(NodeId v) const {
    if (v < 0 || v >= n_) throw std::out_of_range("Dag: node id out of range");
}

const std::vector<NodeId>& Dag::parents(NodeId v) const {
    check_node(v);
    return parents_[v];
}

const std::vector<NodeId>& Dag::children(NodeId v) const {
    check_node(v);
    return children_[v];
}

int Dag::degree(NodeId v) const {
    check_node(v);
    return static_cast<int>(parents_[v].size() + children_[v].size());
}

std::vector<Edge> Dag::edges() const {
    std::vector<Edge> out;
    out.reserve(num_edges_);
    for (NodeId p = 0; p < n_; ++p)
        for (NodeId c : children_[p]) out.emplace_back(p, c);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<NodeId> Dag::ancestors(NodeId v) const {
    return ancestors_of_set({v});
}

std::vector<NodeId> Dag::ancestors_of_set(const std::vector<NodeId>& vs) const {
    std::vector<std::uint8_t> seen(n_, 0);
    std::deque<NodeId> frontier;
    for (NodeId v : vs) {
        check_node(v);
        if (!seen[v]) {
            seen[v] = 1;
            frontier.push_back(v);
        }
    }
    while (!frontier.empty()) {
        NodeId v = frontier.front();
        frontier.pop_front();
        for (NodeId p : parents_[v])
            if (!seen[p]) {
                seen[p] = 1;
                frontier.push_back(p);
            }
    }
    std::vector<NodeId> out;
    for (NodeId v = 0; v < n_; ++v)
        if (seen[v]) out.push_back(v);
    return out;
}

std::vector<NodeId> Dag::descendants(NodeId v) const {
    check_node(v);
    std::vector<std::uint8_t> seen(n_, 0);
    std::deque<NodeId> frontier{v};
    seen[v] = 1;
    while (!frontier.empty()) {
        NodeId u = frontier.front();
        frontier.pop_front();
        for (NodeId c : children_[u])
            if (!seen[c]) {
                seen[c] = 1;
                frontier.push_back(c);
            }
    }
    std::vector<NodeId> out;
    for (NodeId u = 0; u < n_; ++u)
        if (seen[u]) out.push_back(u);
    return out;
}

bool d_separated(const Dag& dag, NodeId x, NodeId y, const std::vector<NodeId>& s) {
    const int n = dag.num_nodes();
    if (x < 0 || x >= n || y < 0 || y >= n) throw std::out_of_range("d_separated: node out of range");
    if (x == y) throw std::invalid_argument("d_separated: x == y");
    std::vector<std::uint8_t> in_s(n, 0);
    for (NodeId v : s) {
        if (v < 0 || v >= n) throw std::out_of_range("d_separated: conditioning node out of range");
        in_s[v] = 1;
    }
    if (in_s[x] || in_s[y]) throw std::invalid_argument("d_separated: targets overlap conditioning set");

    std::vector<std::uint8_t> s_anc(n, 0);
    for (NodeId v : dag.ancestors_of_set(s)) s_anc[v] = 1;

    // Reachability over (node, entry direction); direction 0 = entered via an
    // edge pointing into the node, 1 = entered from a child.
    std::vector<std::uint8_t> visited(static_cast<std::size_t>(n) * 2, 0);
    std::deque<std::pair<NodeId, int>> frontier;
    auto push = [&](NodeId v, int how) {
        if (!visited[static_cast<std::size_t>(v) * 2 + how]) {
            visited[static_cast<std::size_t>(v) * 2 + how] = 1;
            frontier.emplace_back(v, how);
        }
    };
    // Leaving x along any edge; model as having entered x from a child so both
    // parent and child moves are allowed below.
    push(x, 1);
    while (!frontier.empty()) {
        auto [v, how] = frontier.front();
        frontier.pop_front();
        if (how == 1) {
            // Entered against the edge direction (or at the source): may pass
            // to parents and children unless v is conditioned on.
            if (!in_s[v]) {
                for (NodeId p : dag.parents(v)) push(p, 1);
                for (NodeId c : dag.children(v)) push(c, 0);
            }
        } else {
            // Entered along the edge direction: v is a potential collider.
            if (!in_s[v])
                for (NodeId c : dag.children(v)) push(c, 0);
            if (s_anc[v])
                for (NodeId p : dag.parents(v)) push(p, 1);
        }
        if (v == y) return false;
    }
    return true;
}

Cpdag::Cpdag(int n) : n_(n) {
    if (n < 0) throw std::invalid_argument("Cpdag: negative node count");
    dir_.assign(static_cast<std::size_t>(n) * n, 0);
    und_.assign(static_cast<std::size_t>(n) * n, 0);
}

void Cpdag::check_node(NodeId v) const {
    if (v < 0 || v >= n_) throw std::out_of_range("Cpdag: node id out of range");
}

void Cpdag::check_pair(NodeId a, NodeId b) const {
    check_node(a);
    check_node(b);
    if (a == b) throw std::invalid_argument("Cpdag: self-loop");
}

void Cpdag::add_directed(NodeId from, NodeId to) {
    check_pair(from, to);
    if (und_[idx(from, to)] || dir_[idx(to, from)])
        throw std::invalid_argument("Cpdag: conflicting edge already present");
    dir_[idx(from, to)] = 1;
}

void Cpdag::add_undirected(NodeId a, NodeId b) {
    check_pair(a, b);
    if (dir_[idx(a, b)] || dir_[idx(b, a)])
        throw std::invalid_argument("Cpdag: conflicting edge already present");
    und_[idx(a, b)] = und_[idx(b, a)] = 1;
}

void Cpdag::orient(NodeId from, NodeId to) {
    check_pair(from, to);
    if (!und_[idx(from, to)]) throw std::invalid_argument("Cpdag: orient on non-undirected pair");
    und_[idx(from, to)] = und_[idx(to, from)] = 0;
    dir_[idx(from, to)] = 1;
}

void Cpdag::remove_edge(NodeId a, NodeId b) {
    check_pair(a, b);
    dir_[idx(a, b)] = dir_[idx(b, a)] = 0;
    und_[idx(a, b)] = und_[idx(b, a)] = 0;
}

std::vector<NodeId> Cpdag::parents(NodeId v) const {
    check_node(v);
    std::vector<NodeId> out;
    for (NodeId u = 0; u < n_; ++u)
        if (dir_[idx(u, v)]) out.push_back(u);
    return out;
}

std::vector<NodeId> Cpdag::children(NodeId v) const {
    check_node(v);
    std::vector<NodeId> out;
    for (NodeId u = 0; u < n_; ++u)
        if (dir_[idx(v, u)]) out.push_back(u);
    return out;
}

std::vector<NodeId> Cpdag::siblings(NodeId v) const {
    check_node(v);
    std::vector<NodeId> out;
    for (NodeId u = 0; u < n_; ++u)
        if (und_[idx(v, u)]) out.push_back(u);
    return out;
}

std::vector<NodeId> Cpdag::adjacent(NodeId v) const {
    check_node(v);
    std::vector<NodeId> out;
    for (NodeId u = 0; u < n_; ++u)
        if (u != v && adjacent(v, u)) out.push_back(u);
    return out;
}

std::vector<Edge> Cpdag::directed_edges() const {
    std::vector<Edge> out;
    for (NodeId a = 0; a < n_; ++a)
        for (NodeId b = 0; b < n_; ++b)
            if (dir_[idx(a, b)]) out.emplace_back(a, b);
    return out;
}

std::vector<Edge> Cpdag::undirected_edges() const {
    std::vector<Edge> out;
    for (NodeId a = 0; a < n_; ++a)
        for (NodeId b = a + 1; b < n_; ++b)
            if (und_[idx(a, b)]) out.emplace_back(a, b);
    return out;
}

int Cpdag::num_edges() const {
    int d = 0, u = 0;
    for (std::uint8_t v : dir_) d += v;
    for (std::uint8_t v : und_) u += v;
    return d + u / 2;
}

namespace {

/// One sweep of Meek rules; returns true when an edge was oriented.
bool meek_sweep(Cpdag& g, bool use_rule4) {
    const int n = g.num_nodes();
    bool changed = false;
    for (NodeId b = 0; b < n; ++b) {
        for (NodeId c : g.siblings(b)) {
            // Rule 1: a -> b - c with a, c non-adjacent.
            bool done = false;
            for (NodeId a : g.parents(b)) {
                if (a != c && !g.adjacent(a, c)) {
                    g.orient(b, c);
                    changed = true;
                    done = true;
                    break;
                }
            }
            if (done) continue;
            // Rule 2: b -> d -> c with b - c.
            for (NodeId d : g.children(b)) {
                if (g.has_directed(d, c)) {
                    g.orient(b, c);
                    changed = true;
                    done = true;
                    break;
                }
            }
            if (done) continue;
            // Rule 3: b - c, b - d1 -> c, b - d2 -> c with d1, d2 non-adjacent.
            {
                std::vector<NodeId> mid;
                for (NodeId d : g.siblings(b))
                    if (g.has_directed(d, c)) mid.push_back(d);
                for (std::size_t i = 0; i < mid.size() && !done; ++i)
                    for (std::size_t j = i + 1; j < mid.size() && !done; ++j)
                        if (!g.adjacent(mid[i], mid[j])) {
                            g.orient(b, c);
                            changed = true;
                            done = true;
                        }
            }
            if (done || !use_rule4) continue;
            // Rule 4: b - c, b - d, d -> e -> c with d, c non-adjacent.
            for (NodeId d : g.siblings(b)) {
                if (d == c || g.adjacent(d, c)) continue;
                for (NodeId e : g.children(d)) {
                    if (g.has_directed(e, c)) {
                        g.orient(b, c);
                        changed = true;
                        done = true;
                        break;
                    }
                }
                if (done) break;
            }
        }
    }
    return changed;
}

}  // namespace

void meek_closure(Cpdag& g, bool use_rule4) {
    while (meek_sweep(g, use_rule4)) {
    }
}

Cpdag cpdag_from_dag(const Dag& dag) {
    const int n = dag.num_nodes();
    Cpdag g(n);
    // Unshielded colliders keep their orientation; everything else starts
    // undirected.
    std::vector<std::vector<std::uint8_t>> keep(n, std::vector<std::uint8_t>(n, 0));
    for (NodeId b = 0; b < n; ++b) {
        const auto& pa = dag.parents(b);
        for (std::size_t i = 0; i < pa.size(); ++i)
            for (std::size_t j = i + 1; j < pa.size(); ++j)
                if (!dag.adjacent(pa[i], pa[j])) {
                    keep[pa[i]][b] = 1;
                    keep[pa[j]][b] = 1;
                }
    }
    for (const auto& [p, c] : dag.edges()) {
        if (keep[p][c])
            g.add_directed(p, c);
        else
            g.add_undirected(p, c);
    }
    meek_closure(g, true);
    return g;
}

std::vector<NodeId> explicit_descendants(const Cpdag& g, NodeId v) {
    const int n = g.num_nodes();
    std::vector<std::uint8_t> seen(n, 0);
    std::deque<NodeId> frontier{v};
    seen[v] = 1;
    while (!frontier.empty()) {
        NodeId u = frontier.front();
        frontier.pop_front();
        for (NodeId c : g.children(u))
            if (!seen[c]) {
                seen[c] = 1;
                frontier.push_back(c);
            }
    }
    std::vector<NodeId> out;
    for (NodeId u = 0; u < n; ++u)
        if (seen[u]) out.push_back(u);
    return out;
}

namespace {

/// Nodes reachable from x along possibly directed paths, optionally treating
/// one node as removed from the graph.
std::vector<std::uint8_t> possibly_directed_reachable(const Cpdag& g, NodeId x,
                                                      NodeId skip = -1) {
    const int n = g.num_nodes();
    std::vector<std::uint8_t> seen(n, 0);
    if (x == skip) return seen;
    std::deque<NodeId> frontier{x};
    seen[x] = 1;
    while (!frontier.empty()) {
        NodeId u = frontier.front();
        frontier.pop_front();
        for (NodeId w = 0; w < n; ++w) {
            if (w == skip || seen[w]) continue;
            if (g.has_directed(u, w) || g.has_undirected(u, w)) {
                seen[w] = 1;
                frontier.push_back(w);
            }
        }
    }
    return seen;
}

}  // namespace

bool possible_ancestor(const Cpdag& g, NodeId x, NodeId y) {
    if (x == y) return true;
    return possibly_directed_reachable(g, x)[y] != 0;
}

bool explicit_ancestor(const Cpdag& g, NodeId x, NodeId y) {
    if (x == y) return false;
    auto de = explicit_descendants(g, x);
    return std::binary_search(de.begin(), de.end(), y);
}

bool is_amenable_global(const Cpdag& g, NodeId x, NodeId y) {
    if (x == y) throw std::invalid_argument("is_amenable_global: x == y");
    // A possibly directed path from x that does not start with a directed edge
    // out of x must start with an undirected edge to a sibling.
    for (NodeId v : g.siblings(x)) {
        if (v == y) return false;
        if (possibly_directed_reachable(g, v, x)[y]) return false;
    }
    return true;
}

std::vector<NodeId> mediators(const Cpdag& g, NodeId x, NodeId y) {
    const int n = g.num_nodes();
    auto de_x = explicit_descendants(g, x);
    std::vector<std::uint8_t> from_x(n, 0);
    for (NodeId v : de_x) from_x[v] = 1;
    std::vector<NodeId> out;
    for (NodeId v = 0; v < n; ++v) {
        if (v == x || !from_x[v]) continue;
        if (v == y || explicit_ancestor(g, v, y)) out.push_back(v);
    }
    return out;
}

std::optional<std::vector<NodeId>> oset_from_cpdag(const Cpdag& g, NodeId x, NodeId y) {
    if (x == y) throw std::invalid_argument("oset_from_cpdag: x == y");
    if (!possible_ancestor(g, x, y)) return std::nullopt;
    if (!is_amenable_global(g, x, y)) return std::nullopt;
    auto cn = mediators(g, x, y);
    const int n = g.num_nodes();
    std::vector<std::uint8_t> in_cn(n, 0);
    for (NodeId v : cn) in_cn[v] = 1;
    std::vector<NodeId> out;
    for (NodeId v : cn)
        for (NodeId p : g.parents(v)) out.push_back(p);
    out = sorted_unique(out);
    std::erase_if(out, [&](NodeId v) { return v == x || v == y || in_cn[v]; });
    return out;
}

bool has_partially_directed_cycle(const Cpdag& g) {
    const int n = g.num_nodes();
    for (NodeId a = 0; a < n; ++a) {
        auto reach = possibly_directed_reachable(g, a);
        for (NodeId b = 0; b < n; ++b) {
            if (a == b || !reach[b]) continue;
            if (b != a && explicit_ancestor(g, b, a)) return true;
        }
    }
    return false;
}

}  // namespace loadisc
