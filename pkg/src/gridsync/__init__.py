"""Synchronization-performance metrics for linearized power networks.

Closed-form system frequency, Nadir, RoCoF and synchronization cost for
networks of proportionally rated machines, validated end to end against a
brute-force time-domain simulator, plus perturbation analysis for grids that
violate the proportionality.
"""

from importlib import resources

from ._accel import NUMBA_ENABLED, backend_name
from .grid import (Bus, Grid, GridError, Line, add_random_lines,
                   build_laplacian, grid_to_dict, load_grid, save_grid,
                   scaled_laplacian, validate_grid)
from .machine import (DampingRegime, MachineError, ProportionalSystem,
                      RepresentativeMachine, SprResult, StateSpace,
                      SwingMachine, TurbineMachine, check_spr, damping_regime,
                      eval_transfer, extract_representative, machine_poles,
                      proportionalized_grid, realize_state_space)
from .oracle import (EmpiricalMetrics, FullStateModel, OracleError,
                     StateTrace, assemble_dynamics, empirical_metrics,
                     initial_rocof, integrate_step_response,
                     min_time_constant, slowest_decay_rate)
from .response import (NadirResult, StepScenario, Trace, nadir, rocof,
                       steady_state_frequency, swing_overshoot_check,
                       system_frequency_trace)
from .robustness import (ConnectivityRow, PerturbationModel, RobustnessError,
                         SteadyStateResult, connectivity_gap, frequency_gap,
                         perturbation_deltas, perturbed_steady_state,
                         perturbed_transfer_eval)
from .spectral import (ModalBasis, SpectralError, gamma_matrix,
                       modal_decompose, project_disturbance, sigma_z)
from .synccost import (CostMatrix, build_cost_matrix, hnorm_turbine_closed,
                       inner_product_swing_closed, inner_product_sylvester,
                       inner_product_turbine_closed, mean_sync_cost,
                       solve_output_gram, sync_cost)

__version__ = "0.1.0"


def bundled_grid_path(name: str):
    """Filesystem path of a grid shipped with the package (e.g. "ring35")."""
    return resources.files("gridsync").joinpath("data", f"{name}.json")
