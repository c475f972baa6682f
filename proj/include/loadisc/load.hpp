#pragma once

#include <map>
#include <string>
#include <vector>

#include "loadisc/citest.hpp"
#include "loadisc/discovery.hpp"
#include "loadisc/graph.hpp"

namespace loadisc {

/// Causal relation of an ordered target pair.
enum class Relation { DefNonAn, PossAn, ExplAn };

std::string to_string(Relation r);

/// What an adjustment-set family claims to be.
enum class AdjKind {
    None,         ///< no sets returned (definite non-ancestor: effect is zero)
    Optimal,      ///< a single optimal adjustment set
    LocallyValid  ///< locally valid parent adjustment sets
};

std::string to_string(AdjKind k);

struct DirectionResult {
    Relation relation = Relation::DefNonAn;
    bool is_ident = false;
    AdjKind kind = AdjKind::None;
    std::vector<std::vector<NodeId>> sets;
};

/// Output for both orderings of a target pair.
struct LoadResult {
    NodeId x = -1, y = -1;
    DirectionResult xy, yx;

    const DirectionResult& forward(NodeId t) const { return t == x ? xy : yx; }
};

/// True iff x has a directed path to y, decided from x's local graph: child
/// shortcut, parent/sibling shortcut, else the dependence of x and y given
/// Pa(x) + Sib(x).
bool is_expl_an(NodeId x, NodeId y, const LocalGraph& gx, CiTester& tester);

/// True iff there is a possibly directed path from x to y, decided from x's
/// local graph: child/sibling shortcut, parent shortcut, else the dependence
/// of x and y given Pa(x).
bool is_poss_an(NodeId x, NodeId y, const LocalGraph& gx, CiTester& tester);

struct RelateResult {
    Relation xy = Relation::DefNonAn;
    Relation yx = Relation::DefNonAn;
    LocalGraph gx, gy;
};

/// Runs local discovery on both targets and classifies the relation in both
/// directions: explicit ancestry first, then possible ancestry, defaulting to
/// definite non-ancestry.
RelateResult local_relate(NodeId x, NodeId y, CiTester& tester, DiscoveryCache& cache);

/// Amenability contribution of one sibling v of the treatment t: false when v
/// is adjacent to the outcome o, otherwise the independence of v and o given
/// Pa(v) + {t}.
bool local_amen_test(NodeId t, NodeId o, NodeId v, const LocalGraph& gv, CiTester& tester);

/// All sets Pa(x) + S for S over the sibling subsets that create no new
/// v-structure with collider x. The empty subset always qualifies.
std::vector<std::vector<NodeId>> local_valid_sets(NodeId x, const LocalGraph& gx);

/// Full run: relation, identifiability per direction, and either the optimal
/// adjustment set or the locally valid parent sets per direction.
LoadResult load(NodeId x, NodeId y, CiTester& tester);
LoadResult load(NodeId x, NodeId y, CiTester& tester, DiscoveryCache& cache);

/// Background-knowledge variant: treatment/outcome relation given, step 1
/// skipped.
LoadResult load_star(NodeId treatment, NodeId outcome, CiTester& tester);

/// Local-baseline variant: relations plus locally valid parent sets only,
/// never an optimal set.
LoadResult mb_by_mb_plus(NodeId x, NodeId y, CiTester& tester);

}  // namespace loadisc
