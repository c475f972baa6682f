#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "loadisc/citest.hpp"
#include "loadisc/graph.hpp"

namespace loadisc {

/// Mixed graph over a subset of the node set; `nodes` is sorted and local
/// index i corresponds to global id nodes[i].
struct GraphFragment {
    std::vector<NodeId> nodes;
    Cpdag graph{0};

    int local(NodeId global) const;
    bool contains(NodeId global) const { return local(global) >= 0; }
};

/// Shared state across local-discovery runs: separating sets (recorded only
/// for pairs found independent), Markov blankets, and learned local
/// structures.
class DiscoveryCache {
public:
    const std::vector<NodeId>* sepset(NodeId a, NodeId b) const;
    bool has_sepset(NodeId a, NodeId b) const { return sepset(a, b) != nullptr; }
    void record_sepset(NodeId a, NodeId b, std::vector<NodeId> s);

    const std::vector<NodeId>* mb(NodeId v) const;
    void store_mb(NodeId v, std::vector<NodeId> blanket);
    std::vector<NodeId> nodes_with_mb() const;

    /// Nodes that ever entered a working blanket while growing MB(v);
    /// a superset of the final blanket.
    const std::vector<NodeId>* grow_region(NodeId v) const;
    void store_grow_region(NodeId v, std::vector<NodeId> touched);

    const GraphFragment* local_structure_of(NodeId v) const;
    void store_local_structure(NodeId v, GraphFragment f);

    long long orientation_conflicts() const { return conflicts_; }
    void count_conflict() { ++conflicts_; }

private:
    std::map<std::pair<NodeId, NodeId>, std::vector<NodeId>> sepsets_;
    std::map<NodeId, std::vector<NodeId>> mbs_;
    std::map<NodeId, std::vector<NodeId>> grow_regions_;
    std::map<NodeId, GraphFragment> locals_;
    long long conflicts_ = 0;
};

/// Result of a local discovery run: the merged mixed graph with the focal
/// node's incident edges finalized.
struct LocalGraph {
    NodeId focal = -1;
    Cpdag graph{0};

    std::vector<NodeId> parents() const { return graph.parents(focal); }
    std::vector<NodeId> children() const { return graph.children(focal); }
    std::vector<NodeId> siblings() const { return graph.siblings(focal); }
    std::vector<NodeId> adjacent_nodes() const { return graph.adjacent(focal); }
};

/// Grow-Shrink Markov blanket discovery. The grow phase scans candidates in
/// ascending id until fixpoint; the shrink phase removes nodes independent
/// given the rest of the blanket. When `touched` is given it receives every
/// node that entered the working blanket at any point.
std::vector<NodeId> grow_shrink_mb(NodeId v, CiTester& tester, const std::vector<NodeId>& candidates,
                                   std::vector<NodeId>* touched = nullptr);

/// Adjacency test within a Markov blanket: y is adjacent to x iff no proper
/// subset of mb_x \ {y} separates them. The first separating set found is
/// recorded into the cache when one is given.
bool mb_adjacent(NodeId x, NodeId y, const std::vector<NodeId>& mb_x, CiTester& tester,
                 DiscoveryCache* cache = nullptr);

/// PC skeleton restricted to {v} + mb with v-structures oriented from
/// recorded separating sets.
GraphFragment local_structure(NodeId v, const std::vector<NodeId>& mb, CiTester& tester,
                              DiscoveryCache& cache);

/// Sequential Markov-blanket expansion from the target with caching and
/// substructure reuse; incident edges of the target match the true CPDAG
/// under an exact tester.
LocalGraph mb_by_mb(NodeId target, CiTester& tester, DiscoveryCache& cache);

/// Full PC: order-independent skeleton, v-structure orientation, Meek rules.
Cpdag pc_algorithm(CiTester& tester);

/// The three sepset-aware orientation rules applied to fixpoint. Used on
/// partially discovered graphs where a missing edge does not imply
/// non-adjacency, so rule preconditions consult recorded separating sets.
void orient_undirected_edges(Cpdag& g, const DiscoveryCache& cache);

/// Induced mixed subgraph over the given global ids.
GraphFragment substructure(const Cpdag& g, std::vector<NodeId> nodes);
GraphFragment substructure(const GraphFragment& f, std::vector<NodeId> nodes);

/// Visits size-k index combinations of {0..m-1} in lexicographic order until
/// the visitor returns true; returns whether the visitor stopped the scan.
bool for_each_combination(int m, int k, const std::function<bool(const std::vector<int>&)>& visit);

}  // namespace loadisc
