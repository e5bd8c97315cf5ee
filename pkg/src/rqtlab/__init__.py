"""One-dimensional relativistic quantum trajectory laboratory.

Computes particle and photon trajectories of the relativistic quantum
Hamilton-Jacobi formulation, locates trajectory nodes, verifies the
node-spacing / de Broglie half-wavelength law, and checks the governing
equations by residual analysis.
"""

from .action import (
    ActionSample,
    MobiusParams,
    action_scan,
    conjugate_momentum,
    dual_params,
    reduced_action,
    rqshje_residual,
)
from .errors import (
    DegenerateBasisError,
    DomainError,
    IntegrationOverflowError,
    SingularEnergyError,
)
from .kg import (
    KgBasis,
    kg_closed_constant,
    kg_fd_residual,
    kg_solve_numeric,
    wronskian_drift,
    write_basis_csv,
)
from .nodes import (
    ClassicalLimitReport,
    NodeReport,
    classical_limit_scan,
    de_broglie_check,
    linear_node_summary,
    mean_momentum,
    nodes_constant,
    nodes_numeric,
    write_classical_csv,
    write_node_report_csv,
)
from .scenario import (
    Constants,
    Potential,
    RegionClass,
    Scenario,
    Species,
    classical_momentum,
    classify_region,
    fm_to_m,
    kinetic_factor,
    load_config,
    m_to_fm,
    parse_config_text,
    scenario_from_config,
)
from .trajectory import (
    DivergenceEvent,
    Trajectory,
    TrajectoryKind,
    constant_allowed_position,
    constant_allowed_velocity,
    constant_forbidden_position,
    constant_forbidden_velocity,
    divergence_times_forbidden,
    firqnl_residual,
    flow_speed,
    node_times_constant,
    photon_position,
    photon_velocity,
    trajectory_constant_allowed,
    trajectory_constant_forbidden,
    trajectory_ode,
    trajectory_photon,
    velocity_momentum_check,
    write_trajectory_csv,
)

__version__ = "0.1.0"

__all__ = [
    "ActionSample",
    "ClassicalLimitReport",
    "Constants",
    "DegenerateBasisError",
    "DivergenceEvent",
    "DomainError",
    "action_scan",
    "IntegrationOverflowError",
    "KgBasis",
    "MobiusParams",
    "NodeReport",
    "Potential",
    "RegionClass",
    "Scenario",
    "SingularEnergyError",
    "Species",
    "Trajectory",
    "TrajectoryKind",
    "classical_limit_scan",
    "classical_momentum",
    "classify_region",
    "conjugate_momentum",
    "constant_allowed_position",
    "constant_allowed_velocity",
    "constant_forbidden_position",
    "constant_forbidden_velocity",
    "de_broglie_check",
    "divergence_times_forbidden",
    "dual_params",
    "firqnl_residual",
    "flow_speed",
    "fm_to_m",
    "kg_closed_constant",
    "kg_fd_residual",
    "kg_solve_numeric",
    "kinetic_factor",
    "linear_node_summary",
    "load_config",
    "m_to_fm",
    "mean_momentum",
    "node_times_constant",
    "nodes_constant",
    "nodes_numeric",
    "parse_config_text",
    "photon_position",
    "photon_velocity",
    "reduced_action",
    "rqshje_residual",
    "scenario_from_config",
    "trajectory_constant_allowed",
    "trajectory_constant_forbidden",
    "trajectory_ode",
    "trajectory_photon",
    "velocity_momentum_check",
    "wronskian_drift",
    "write_basis_csv",
    "write_classical_csv",
    "write_node_report_csv",
    "write_trajectory_csv",
]
