#include "loadisc/oracle.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace loadisc {
namespace oracle {

namespace {

/// Walks every simple path between x and y; a path is open given s when every
/// non-collider on it is outside s and every collider has a descendant in s.
struct PathSearch {
    const Dag& dag;
    std::vector<std::uint8_t> in_s, has_desc_in_s, on_path;
    std::vector<NodeId> path;
    NodeId y;
    bool found_open = false;

    PathSearch(const Dag& d, NodeId target, const std::vector<NodeId>& s)
        : dag(d), in_s(d.num_nodes(), 0), has_desc_in_s(d.num_nodes(), 0),
          on_path(d.num_nodes(), 0), y(target) {
        for (NodeId v : s) in_s[v] = 1;
        for (NodeId v = 0; v < d.num_nodes(); ++v)
            for (NodeId u : dag.descendants(v))
                if (in_s[u]) has_desc_in_s[v] = 1;
    }

    bool open_as_intermediate(NodeId prev, NodeId v, NodeId next) const {
        bool collider = dag.has_edge(prev, v) && dag.has_edge(next, v);
        return collider ? has_desc_in_s[v] != 0 : in_s[v] == 0;
    }

    void dfs(NodeId v) {
        if (found_open) return;
        if (v == y) {
            // Path endpoints are unconditioned by precondition; interior nodes
            // were checked on the way in.
            found_open = true;
            return;
        }
        for (NodeId w = 0; w < dag.num_nodes(); ++w) {
            if (on_path[w] || !dag.adjacent(v, w)) continue;
            // Extending past v makes it interior; check the triple around it.
            if (path.size() >= 2) {
                NodeId prev = path[path.size() - 2];
                if (!open_as_intermediate(prev, path.back(), w)) continue;
            }
            path.push_back(w);
            on_path[w] = 1;
            dfs(w);
            on_path[w] = 0;
            path.pop_back();
            if (found_open) return;
        }
    }
};

std::vector<NodeId> sorted_unique(std::vector<NodeId> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

}  // namespace

bool d_separated_bruteforce(const Dag& dag, NodeId x, NodeId y, const std::vector<NodeId>& s) {
    if (x == y) throw std::invalid_argument("d_separated_bruteforce: x == y");
    for (NodeId v : s)
        if (v == x || v == y) throw std::invalid_argument("d_separated_bruteforce: overlap");
    PathSearch search(dag, y, s);
    search.path = {x};
    search.on_path[x] = 1;
    search.dfs(x);
    return !search.found_open;
}

namespace {

struct MecSearch {
    const Cpdag& base;
    std::vector<Edge> und;  // a < b
    std::vector<std::vector<std::uint8_t>> dir;
    std::vector<Dag>& out;

    MecSearch(const Cpdag& g, std::vector<Dag>& sink) : base(g), out(sink) {
        und = g.undirected_edges();
        const int n = g.num_nodes();
        dir.assign(n, std::vector<std::uint8_t>(n, 0));
        for (const auto& [a, b] : g.directed_edges()) dir[a][b] = 1;
    }

    bool creates_cycle(NodeId from, NodeId to) const {
        // directed path to -> ... -> from using current orientations
        const int n = base.num_nodes();
        std::vector<std::uint8_t> seen(n, 0);
        std::vector<NodeId> stack{to};
        seen[to] = 1;
        while (!stack.empty()) {
            NodeId v = stack.back();
            stack.pop_back();
            if (v == from) return true;
            for (NodeId w = 0; w < n; ++w)
                if (dir[v][w] && !seen[w]) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
        }
        return false;
    }

    bool creates_new_vstructure(NodeId from, NodeId to) const {
        for (NodeId c = 0; c < base.num_nodes(); ++c) {
            if (c == from || !dir[c][to]) continue;
            if (!base.adjacent(c, from)) return true;
        }
        return false;
    }

    void run(std::size_t i) {
        if (i == und.size()) {
            std::vector<Edge> edges;
            for (NodeId a = 0; a < base.num_nodes(); ++a)
                for (NodeId b = 0; b < base.num_nodes(); ++b)
                    if (dir[a][b]) edges.emplace_back(a, b);
            out.emplace_back(base.num_nodes(), edges);
            return;
        }
        auto [a, b] = und[i];
        for (auto [from, to] : {std::pair{a, b}, std::pair{b, a}}) {
            if (creates_cycle(from, to) || creates_new_vstructure(from, to)) continue;
            dir[from][to] = 1;
            run(i + 1);
            dir[from][to] = 0;
        }
    }
};

}  // namespace

std::vector<Dag> enumerate_mec(const Cpdag& g, int max_nodes) {
    if (g.num_nodes() > max_nodes)
        throw std::invalid_argument("enumerate_mec: graph exceeds the enumeration cap");
    std::vector<Dag> out;
    MecSearch search(g, out);
    search.run(0);
    return out;
}

std::vector<NodeId> causal_nodes(const Dag& dag, NodeId t, NodeId o) {
    auto de = dag.descendants(t);
    std::vector<NodeId> out;
    for (NodeId v : de) {
        if (v == t) continue;
        auto an = dag.descendants(v);
        if (v == o || std::binary_search(an.begin(), an.end(), o)) out.push_back(v);
    }
    return out;
}

std::vector<NodeId> forbidden_set(const Dag& dag, NodeId t, NodeId o) {
    std::vector<NodeId> out{t};
    for (NodeId v : causal_nodes(dag, t, o)) {
        auto de = dag.descendants(v);
        out.insert(out.end(), de.begin(), de.end());
    }
    return sorted_unique(std::move(out));
}

namespace {

/// The proper back-door graph: first edges of proper causal paths removed.
Dag proper_backdoor_graph(const Dag& dag, NodeId t, NodeId o) {
    auto cn = causal_nodes(dag, t, o);
    std::vector<Edge> edges;
    for (const auto& [p, c] : dag.edges()) {
        if (p == t && std::binary_search(cn.begin(), cn.end(), c)) continue;
        edges.emplace_back(p, c);
    }
    return Dag(dag.num_nodes(), edges);
}

}  // namespace

bool is_valid_adjustment_set(const Dag& dag, NodeId t, NodeId o, const std::vector<NodeId>& z) {
    auto forb = forbidden_set(dag, t, o);
    for (NodeId v : z)
        if (std::binary_search(forb.begin(), forb.end(), v)) return false;
    Dag pbd = proper_backdoor_graph(dag, t, o);
    return d_separated(pbd, t, o, z);
}

std::vector<std::vector<NodeId>> valid_adjustment_sets(const Dag& dag, NodeId t, NodeId o) {
    const int n = dag.num_nodes();
    std::vector<NodeId> others;
    for (NodeId v = 0; v < n; ++v)
        if (v != t && v != o) others.push_back(v);
    if (others.size() > 24) throw std::invalid_argument("valid_adjustment_sets: graph too large");
    std::vector<std::vector<NodeId>> out;
    for (std::uint64_t mask = 0; mask < (1ULL << others.size()); ++mask) {
        std::vector<NodeId> z;
        for (std::size_t i = 0; i < others.size(); ++i)
            if (mask & (1ULL << i)) z.push_back(others[i]);
        if (is_valid_adjustment_set(dag, t, o, z)) out.push_back(std::move(z));
    }
    return out;
}

bool common_valid_set_exists(const Cpdag& g, NodeId t, NodeId o, int max_nodes) {
    auto members = enumerate_mec(g, max_nodes);
    if (members.empty()) throw std::logic_error("common_valid_set_exists: empty MEC");
    std::set<std::vector<NodeId>> common;
    bool first = true;
    for (const Dag& d : members) {
        auto fam = valid_adjustment_sets(d, t, o);
        std::set<std::vector<NodeId>> cur(fam.begin(), fam.end());
        if (first) {
            common = std::move(cur);
            first = false;
        } else {
            std::set<std::vector<NodeId>> inter;
            std::set_intersection(common.begin(), common.end(), cur.begin(), cur.end(),
                                  std::inserter(inter, inter.begin()));
            common = std::move(inter);
        }
        if (common.empty()) return false;
    }
    return !common.empty();
}

}  // namespace oracle
}  // namespace loadisc
