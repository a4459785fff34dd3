"""Adaptive estimation of unknown time-varying network topology with
simultaneous synchronization, built on the edge-agreement reduction of a
complete directed graph.

The unknown topology is represented as a complete graph whose edge weights
(zero for absent edges) are estimated online by an adaptive law, while a
tracking controller steers the agents.  Excitation is supplied either by a
designed multisine reference (pure estimation) or by an auxiliary filter
kept persistently excited through a state-dependent probe (estimation plus
synchronization).  The analysis layer certifies the excitation levels
numerically from windowed Gram-matrix margins.
"""

from .analysis import (
    PEReport,
    RecoveryReport,
    filtration_check,
    lyapunov_v1,
    pe_margin,
    recover_topology,
    udpe_margin,
    ultimate_bound,
)
from .controller import (
    ESTIMATE_AND_SYNC,
    ESTIMATE_ONLY,
    ControllerConfig,
    EstimatorState,
    PEReference,
    aux_excitation,
    aux_rhs,
    control_input,
    excitation_signal,
    reference_signal,
    weight_update,
    weight_update_sigma,
)
from .graph import (
    CompleteGraphModel,
    EdgeLabel,
    complete_graph,
    edge_laplacian,
    node_to_edge,
    tree_to_edge,
)
from .numerics import DivergenceError, pinv, rk4_step, sym_eig
from .plant import (
    EdgeWeight,
    InternalDynamics,
    WeightTrajectory,
    benchmark_weight_trajectory,
    plant_rhs,
    weight_eval,
)
from .sim import (
    ErrorSystemRecord,
    Scenario,
    SimulationRecord,
    benchmark_scenario,
    simulate,
    simulate_error_system,
)

__version__ = "0.1.0"

__all__ = [
    "CompleteGraphModel",
    "ControllerConfig",
    "DivergenceError",
    "EdgeLabel",
    "EdgeWeight",
    "ErrorSystemRecord",
    "ESTIMATE_AND_SYNC",
    "ESTIMATE_ONLY",
    "EstimatorState",
    "InternalDynamics",
    "PEReference",
    "PEReport",
    "RecoveryReport",
    "Scenario",
    "SimulationRecord",
    "WeightTrajectory",
    "aux_excitation",
    "aux_rhs",
    "benchmark_scenario",
    "benchmark_weight_trajectory",
    "complete_graph",
    "control_input",
    "edge_laplacian",
    "excitation_signal",
    "filtration_check",
    "lyapunov_v1",
    "node_to_edge",
    "pe_margin",
    "pinv",
    "plant_rhs",
    "recover_topology",
    "reference_signal",
    "rk4_step",
    "simulate",
    "simulate_error_system",
    "sym_eig",
    "tree_to_edge",
    "udpe_margin",
    "ultimate_bound",
    "weight_eval",
    "weight_update",
    "weight_update_sigma",
]
