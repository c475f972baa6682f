"""Local causal discovery with statistically optimal adjustment sets.

The heavy lifting lives in the compiled extension; this package re-exports
its public surface.
"""

from ._loadisc import (
    CiTester,
    Cpdag,
    Dag,
    Dataset,
    Scm,
    asymptotic_variance,
    binary_do_effect,
    common_valid_set_exists,
    cpdag_from_dag,
    d_separated,
    dsep_tester,
    enumerate_mec,
    explicit_ancestor,
    explicit_descendants,
    f1_oset,
    fisher_z_tester,
    g_square_tester,
    graph_from_json,
    graph_to_json,
    intervention_distance,
    is_amenable,
    load,
    load_star,
    mb_by_mb,
    mb_by_mb_plus,
    ols_effect,
    optimal_adjustment_set,
    pc,
    population_effect,
    possible_ancestor,
    random_dag,
    sample_dataset,
    sample_target_pair,
    valid_adjustment_sets,
)

__all__ = [
    "CiTester",
    "Cpdag",
    "Dag",
    "Dataset",
    "Scm",
    "asymptotic_variance",
    "binary_do_effect",
    "common_valid_set_exists",
    "cpdag_from_dag",
    "d_separated",
    "dsep_tester",
    "enumerate_mec",
    "explicit_ancestor",
    "explicit_descendants",
    "f1_oset",
    "fisher_z_tester",
    "g_square_tester",
    "graph_from_json",
    "graph_to_json",
    "intervention_distance",
    "is_amenable",
    "load",
    "load_star",
    "mb_by_mb",
    "mb_by_mb_plus",
    "ols_effect",
    "optimal_adjustment_set",
    "pc",
    "population_effect",
    "possible_ancestor",
    "random_dag",
    "sample_dataset",
    "sample_target_pair",
    "valid_adjustment_sets",
]
