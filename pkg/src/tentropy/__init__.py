"""t-entropy for transfer operators on finite dynamical systems."""

from ._validation import NEG_INF
from .dynamics import (
    Cycle,
    FiniteSystem,
    Measure,
    build_system,
    cycle_decomposition,
    cycle_measure,
    is_invariant,
    mix,
    pushforward,
)
from .entropy import (
    SimplexSolveReport,
    TEntropyResult,
    simplex_log_maximize,
    tau,
    tau_cycle_closed_form,
    tau_invariant_closed_form,
    tau_n_sup,
    tau_prime_n,
)
from .estimators import LogSpectralRadius, TEntropy
from .partition import (
    PartitionOfUnity,
    join,
    oscillation_refinement,
    pullback_join,
    random_partition,
    singleton_partition,
    validate,
)
from .transfer import (
    SpectralResult,
    TransferOperator,
    apply,
    from_matrix,
    from_measure_space,
    from_weights,
    log_spectral_radius_cycles,
    log_spectral_radius_power,
    power_apply,
    tilt,
)
from .varprinciple import (
    check_definition_equivalence,
    check_variational_principle,
    legendre_dual_tau,
)

__version__ = "0.1.0"
