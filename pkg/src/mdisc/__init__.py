"""mdisc: single-shot discrimination of quantum measurements.

Data model: :class:`~mdisc.measurements.Povm` for devices,
:class:`~mdisc.testers.Tester` for discrimination tests. Solvers live in
:mod:`~mdisc.perfect` (perfect distinguishability, minimum-error distance),
:mod:`~mdisc.reduction` (irrelevant-subspace removal, quantum filters),
:mod:`~mdisc.qubit` (projective and noisy qubit devices via state
discrimination) and :mod:`~mdisc.trine` (unambiguous discrimination of
rotated trines). :mod:`~mdisc.oracle` holds the independent brute-force
cross-checks.
"""

__version__ = "0.1.0"

from .linalg import (
    EigenDecomposition,
    eigenspace_projector,
    hermitian_eig,
    kron,
    partial_trace,
    sqrt_psd,
    subspace_intersection,
    trace_norm,
)
from .measurements import (
    ChoiOperator,
    NotCompleteError,
    NotHermitianError,
    NotPositiveError,
    Povm,
    PovmValidationError,
    apply,
    choi,
    load_povm,
    make_noisy_qubit,
    make_perfect_family,
    make_projective_qubit,
    make_trine,
    save_povm,
    universal_not,
    validate_povm,
)
from .testers import (
    FAIL,
    DiscriminationReport,
    Tester,
    conditional_prob,
    make_tester,
    mix_testers,
    performance,
    simple_tester,
    symmetrize,
    tester_from_protocol,
)
from .perfect import (
    PerfectWitness,
    binary_perfect_check,
    minerror_pair,
    simple_scheme_distance,
    simple_scheme_perfect_check,
    verify_perfect_family,
)
from .reduction import (
    FilterReduction,
    ReductionResult,
    lift_tester,
    make_filter_pair,
    make_opposite_filter_pair,
    opposite_filters_witness,
    reduce_filters,
    reduce_pair,
)
from .qubit import (
    InfeasibleError,
    PureStateHypotheses,
    StateDiscriminationPovm,
    best_simple_scheme,
    discriminate_multi_projective,
    discriminate_noisy_pair,
    discriminate_projective_pair,
    fixed_failure_pure,
    helstrom_mixed,
    helstrom_pure,
    hypotheses_with_overlap,
    measurement_protocol,
    unambiguous_pure,
)
from .trine import (
    TrineOptimal,
    TrineSweepRow,
    trine_lower_bound,
    trine_optimal,
    trine_overlap,
    trine_protocol_pf,
    trine_sweep,
    trine_tester,
    ziman_bound,
)
from .oracle import (
    OracleResult,
    SearchConfig,
    oracle_measurement_discrimination,
    oracle_min_sum_overlap,
    oracle_state_povm,
)
