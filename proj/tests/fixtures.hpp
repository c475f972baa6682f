#pragma once

#include <vector>

#include "loadisc/citest.hpp"
#include "loadisc/discovery.hpp"
#include "test_support.hpp"

namespace loadisc::testing {

/// The shrinking-adjacency variant used by several local algorithms: sepset
/// search restricted to the current adjacency estimate of x only. Unsound;
/// kept as a fixture to pin the failure mode it introduces.
inline std::vector<NodeId> naive_local_pc(NodeId x, std::vector<NodeId> adj, CiTester& tester) {
    for (int s = 0; static_cast<int>(adj.size()) > s; ++s) {
        for (NodeId v : std::vector<NodeId>(adj)) {
            auto others = set_minus(adj, {v});
            bool removed = for_each_combination(
                static_cast<int>(others.size()), s, [&](const std::vector<int>& ix) {
                    std::vector<NodeId> cond;
                    for (int i : ix) cond.push_back(others[i]);
                    return tester.independent(x, v, cond);
                });
            if (removed) std::erase(adj, v);
        }
    }
    return adj;
}

/// Five-node graph where the shrinking-adjacency search keeps a non-adjacent
/// descendant spouse: x=0 and y=4 share the child 3, and the only separating
/// set {1, 2} stops being reachable once node 2 leaves the adjacency
/// estimate.
inline Dag spouse_trap() {
    return Dag(5, {{0, 1}, {2, 1}, {1, 4}, {2, 4}, {0, 3}, {4, 3}});
}

}  // namespace loadisc::testing
