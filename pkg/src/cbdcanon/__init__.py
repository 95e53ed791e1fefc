"""Contextuality analysis of content-context systems of categorical
random variables.

The pipeline: model a system of measurements with exact rational bunch
distributions, optionally expand it by joining or coarsening, compile it
to its canonical all-binary split representation, and decide whether a
multimaximally connected coupling exists by exact linear programming.
When none exists, the degree of contextuality is the excess total
variation of the best signed coupling. For the system of all splits of a
single two-context content there is also a closed-form criterion, nominal
dominance, with an explicit unique coupling.
"""

from .canonical import (
    CanonicalSystem,
    SplitLabel,
    canonical_subset,
    canonicalize,
    enumerate_dichotomies,
    split_representation,
    wrap_binary_system,
)
from .coupling import (
    JointMass,
    QuasiJointMass,
    is_multimaximal,
    joint_marginal,
    maximal_coupling_pair,
    multimaximal_coupling,
)
from .rationals import format_decimal, format_rational, parse_rational
from .simplex import LinearProgram, LPResult
from .solver import (
    ConnectedProgram,
    SystemTooLargeError,
    Verdict,
    build_connected_constraints,
    is_noncontextual,
    min_total_variation,
    solve_feasibility,
    witness_connection_couplings,
    witness_is_multimaximal,
    witness_matches_bunches,
)
from .systems import (
    BunchDistribution,
    System,
    ValidationReport,
    ValueSet,
    bunch_marginal,
    connection_marginals,
    remove_content,
    remove_context,
    system_from_dict,
    system_to_dict,
    validate_system,
)
from .testlab import (
    SweepReport,
    equivalence_sweep,
    random_binary_system,
    random_noncontextual_binary_system,
    random_two_connection,
)
from .transform import (
    Partition,
    enumerate_partitions,
    expand_all_coarsenings,
    expand_coarsen,
    expand_join,
    parse_partition,
)
from .two_connection import (
    CouplingMatrix,
    TwoConnectionInstance,
    analyze_full_splits,
    constraint_matrix,
    construct_12_coupling,
    coupling_entry_bounds,
    lp_cross_check,
    nominally_dominates,
    rank_of_constraint_matrix,
    relation_residual,
    split_constraint_value,
)

__version__ = "0.1.0"
