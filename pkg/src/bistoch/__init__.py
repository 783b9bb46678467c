"""Entropy, sequence entropy, spectral splits, and rotation factors of
doubly stochastic operators on finite measure spaces, plus a symbolic
product-space backend for shift-type operators."""

from .entropy import (
    EntropyEstimate,
    EntropyTrace,
    SequenceSpec,
    dynamic_entropy_estimate,
    entropy_supremum_search,
    entropy_trace,
    sequence_entropy_trace,
)
from .errors import BistochError
from .nullity import (
    NullityReport,
    RotationFactor,
    conditional_expectation_rev,
    hvn_factor,
    nullity_audit,
    nullity_check,
    orbit_decay_test,
    orbit_precompactness_diagnostic,
    transition_support_check,
)
from .operator import (
    DenseOperator,
    ShiftOperator,
    WindowObservable,
    annulus_operator,
    contraction_rotation_operator,
    convex_combination,
    coordinate_indicator,
    from_matrix,
    koopman_from_map,
    l1_operator_distance,
    l1_operator_norm,
    mean_projection,
    sample_doubly_stochastic,
    shift_apply,
    shift_average_operator,
    single_coordinate_observable,
)
from .partition import (
    CellPartition,
    cell_measures,
    conditional_entropy,
    join_partitions,
    static_entropy,
)
from .space import (
    Collection,
    FiniteSpace,
    Observable,
    collection_distance,
    concat,
    make_space,
    uniform_space,
)
from .spectral import (
    SpectralSplit,
    UnitarySplit,
    jdlg_decompose,
    mu_adjoint,
    nf_decompose,
    quasi_compact_classify,
    subspace_spectral_radius,
)

__version__ = "0.1.0"

__all__ = [
    "BistochError",
    "CellPartition",
    "Collection",
    "DenseOperator",
    "EntropyEstimate",
    "EntropyTrace",
    "FiniteSpace",
    "NullityReport",
    "Observable",
    "RotationFactor",
    "SequenceSpec",
    "ShiftOperator",
    "SpectralSplit",
    "UnitarySplit",
    "WindowObservable",
    "annulus_operator",
    "cell_measures",
    "collection_distance",
    "concat",
    "conditional_entropy",
    "conditional_expectation_rev",
    "contraction_rotation_operator",
    "convex_combination",
    "coordinate_indicator",
    "dynamic_entropy_estimate",
    "entropy_supremum_search",
    "entropy_trace",
    "from_matrix",
    "hvn_factor",
    "jdlg_decompose",
    "join_partitions",
    "koopman_from_map",
    "l1_operator_distance",
    "l1_operator_norm",
    "make_space",
    "mean_projection",
    "mu_adjoint",
    "nf_decompose",
    "nullity_audit",
    "nullity_check",
    "orbit_decay_test",
    "orbit_precompactness_diagnostic",
    "quasi_compact_classify",
    "sample_doubly_stochastic",
    "sequence_entropy_trace",
    "shift_apply",
    "shift_average_operator",
    "single_coordinate_observable",
    "static_entropy",
    "subspace_spectral_radius",
    "transition_support_check",
    "uniform_space",
]
