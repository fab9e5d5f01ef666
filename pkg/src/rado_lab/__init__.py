"""Exact arithmetic-Ramsey quantities, Rado verdicts and random-threshold experiments."""

__version__ = "0.1.0"

from .exact import ExactLogValue, RationalPower
from .groups import EnumerationLimitError, FiniteAbelianGroup, parse_group
from .matrices import (
    ColumnsConditionCertificate,
    IntegerMatrix,
    MParameter,
    RankProvider,
    UndefinedParameterError,
    ap_matrix,
    columns_condition,
    group_image_size,
    is_abundant,
    is_irredundant,
    is_partition_regular,
    is_translation_invariant,
    m_parameter,
    rank_group,
    rank_mod_p,
    rank_rational,
)
from .groundsets import GroundSet, parse_ground
from .solutions import (
    ProjectedSolutionQuery,
    compatibility_report,
    count_solutions,
    extendability,
    k_distinct_stats,
    key_bounds_check,
    list_solutions,
    projected_count,
    projected_solutions,
    richness,
    threshold_table,
)
from .primes import ap_density_report, count_k_aps, count_k_aps_through, sieve_primes
from .hypergraph import (
    OrderedHypergraph,
    delta,
    fano_plane,
    from_graph_copies,
    from_solutions,
    hat_p_hypergraph,
    m2_density,
    p_conditions_report,
    pasch_configuration,
    rado_minimal_reduce,
    restriction,
)
from .coloring import Coloring, RamseyVerdict, SearchBudgetExceeded, find_proper_coloring, is_A_r_rado, min_monochromatic
from .structures import StructureWitness, detect_structure, find_lemma_structure
from .montecarlo import ThresholdFit, TrialRecord, VerdictCache, ap_second_moment, estimate_rado_prob, sample_subset, threshold_fit
