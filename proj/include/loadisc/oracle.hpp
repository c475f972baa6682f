#pragma once

#include <vector>

#include "loadisc/graph.hpp"

namespace loadisc {
namespace oracle {

/// Path-enumeration d-separation: every simple path between x and y is
/// checked for blocking. Exponential; test oracle only.
bool d_separated_bruteforce(const Dag& dag, NodeId x, NodeId y, const std::vector<NodeId>& s);

/// All consistent extensions of the mixed graph: orientations of the
/// undirected edges that are acyclic and create no new v-structure.
std::vector<Dag> enumerate_mec(const Cpdag& g, int max_nodes = 12);

/// All z over V \ {t, o} with z disjoint from the forbidden set and z
/// d-separating t and o in the proper back-door graph.
std::vector<std::vector<NodeId>> valid_adjustment_sets(const Dag& dag, NodeId t, NodeId o);

/// Nodes on proper causal paths from t to o (descendants of t that are
/// ancestors of o), excluding t, including o.
std::vector<NodeId> causal_nodes(const Dag& dag, NodeId t, NodeId o);

/// Descendants of the causal nodes plus t.
std::vector<NodeId> forbidden_set(const Dag& dag, NodeId t, NodeId o);

/// Membership test against the complete adjustment criterion.
bool is_valid_adjustment_set(const Dag& dag, NodeId t, NodeId o, const std::vector<NodeId>& z);

/// True iff the intersection over MEC members of their valid-set families is
/// nonempty.
bool common_valid_set_exists(const Cpdag& g, NodeId t, NodeId o, int max_nodes = 12);

}  // namespace oracle
}  // namespace loadisc
