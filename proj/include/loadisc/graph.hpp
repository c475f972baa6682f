#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace loadisc {

/// Dense node index into a contiguous node set of a single graph.
using NodeId = int;

using Edge = std::pair<NodeId, NodeId>;

/// Immutable directed acyclic graph over nodes 0..n-1.
class Dag {
public:
    Dag(int n, const std::vector<Edge>& edges);

    int num_nodes() const { return n_; }
    bool has_edge(NodeId parent, NodeId child) const { return adj_[idx(parent, child)] != 0; }
    bool adjacent(NodeId a, NodeId b) const { return has_edge(a, b) || has_edge(b, a); }

    const std::vector<NodeId>& parents(NodeId v) const;
    const std::vector<NodeId>& children(NodeId v) const;
    int degree(NodeId v) const;
    int num_edges() const { return num_edges_; }

    /// All edges as (parent, child), sorted ascending.
    std::vector<Edge> edges() const;

    /// Kahn order with ascending-id tie break.
    const std::vector<NodeId>& topological_order() const { return topo_; }

    /// All nodes with a directed path to v, including v itself.
    std::vector<NodeId> ancestors(NodeId v) const;
    std::vector<NodeId> ancestors_of_set(const std::vector<NodeId>& vs) const;
    /// All nodes reachable from v, including v itself.
    std::vector<NodeId> descendants(NodeId v) const;

private:
    std::size_t idx(NodeId a, NodeId b) const { return static_cast<std::size_t>(a) * n_ + b; }
    void check_node(NodeId v) const;

    int n_ = 0;
    int num_edges_ = 0;
    std::vector<std::uint8_t> adj_;
    std::vector<std::vector<NodeId>> parents_, children_;
    std::vector<NodeId> topo_;
};

/// True iff every path between x and y is blocked given s
/// (ancestor-restricted reachability, linear in the edge count).
bool d_separated(const Dag& dag, NodeId x, NodeId y, const std::vector<NodeId>& s);

enum class EdgeMark { Directed, Undirected };

/// Mixed graph with directed and undirected edges; the node-pair edge sets
/// are disjoint and self-loops are rejected.
class Cpdag {
public:
    explicit Cpdag(int n);

    int num_nodes() const { return n_; }

    void add_directed(NodeId from, NodeId to);
    void add_undirected(NodeId a, NodeId b);
    /// Replaces the undirected edge a-b with a->b.
    void orient(NodeId from, NodeId to);
    void remove_edge(NodeId a, NodeId b);

    bool has_directed(NodeId from, NodeId to) const { return dir_[idx(from, to)] != 0; }
    bool has_undirected(NodeId a, NodeId b) const { return und_[idx(a, b)] != 0; }
    bool adjacent(NodeId a, NodeId b) const {
        return dir_[idx(a, b)] || dir_[idx(b, a)] || und_[idx(a, b)];
    }

    std::vector<NodeId> parents(NodeId v) const;
    std::vector<NodeId> children(NodeId v) const;
    std::vector<NodeId> siblings(NodeId v) const;
    std::vector<NodeId> adjacent(NodeId v) const;

    std::vector<Edge> directed_edges() const;
    /// Undirected edges reported once with a < b.
    std::vector<Edge> undirected_edges() const;
    int num_edges() const;

    bool operator==(const Cpdag& other) const = default;

private:
    std::size_t idx(NodeId a, NodeId b) const { return static_cast<std::size_t>(a) * n_ + b; }
    void check_node(NodeId v) const;
    void check_pair(NodeId a, NodeId b) const;

    int n_ = 0;
    std::vector<std::uint8_t> dir_, und_;
};

/// Skeleton + v-structures of the DAG, closed under the four Meek rules.
Cpdag cpdag_from_dag(const Dag& dag);

/// Applies Meek orientation rules 1..3 (and 4 when enabled) to fixpoint.
void meek_closure(Cpdag& g, bool use_rule4 = true);

/// Nodes reachable from v via directed edges only, including v.
std::vector<NodeId> explicit_descendants(const Cpdag& g, NodeId v);

/// True iff a path from x to y exists that never traverses a directed edge
/// against its direction. Every node is its own possible ancestor.
bool possible_ancestor(const Cpdag& g, NodeId x, NodeId y);

/// True iff x has a directed path to y (x != y).
bool explicit_ancestor(const Cpdag& g, NodeId x, NodeId y);

/// True iff every possibly directed path from x to y starts with a directed
/// edge out of x.
bool is_amenable_global(const Cpdag& g, NodeId x, NodeId y);

/// The optimal adjustment set for (x, y), or nullopt when the effect is not
/// identifiable from g (not amenable, or x not a possible ancestor of y).
std::optional<std::vector<NodeId>> oset_from_cpdag(const Cpdag& g, NodeId x, NodeId y);

/// Mediating nodes on directed paths from x to y in g, excluding x and
/// including y. Empty unless x is an explicit ancestor of y.
std::vector<NodeId> mediators(const Cpdag& g, NodeId x, NodeId y);

/// Diagnostic: searches for a possibly directed path from a to b together
/// with a directed path from b back to a.
bool has_partially_directed_cycle(const Cpdag& g);

}  // namespace loadisc
