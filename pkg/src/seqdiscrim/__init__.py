"""Sequential unambiguous discrimination of two qubit states and its quantum correlations."""

from .correlations import (
    DiscordReport,
    TangleSet,
    concurrence_ef,
    discord_by_definition,
    discord_report,
    left_discord_closed,
    mutual_information,
    purification_tripartite,
    relative_difference,
    rho_ab,
    right_discord_closed,
    symmetrized_discord,
    tangles,
)
from .montecarlo import TrialStats, empirical_probs, run_trials, verify_unambiguity
from .optimizer import OptimumReport, pbc_closed_max, pbc_numeric_max, regime_boundary
from .protocol import (
    PovmSet,
    ProtocolParams,
    build_bob_unitary,
    build_charlie_unitary,
    joint_state_rho_ab,
    joint_success_prob,
    povm_elements,
    prepare_pair,
    success_prob_bob,
    success_prob_charlie,
)
from .qmath import (
    DensityOperator,
    StateVector,
    UnitaryOperator,
    complete_isometry,
    partial_trace,
    partial_transpose_negativity,
    tangle_entropy,
    tensor_product,
    von_neumann_entropy,
)

__version__ = "0.1.0"
