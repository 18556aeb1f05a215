"""Simulation and anti-sway control toolkit for a 5-DoF boom crane."""

from .controller import (ControllerGains, ReducedDynamics, Reference,
                         SwingDampingController, auxiliary_input,
                         control_input, hold_position_controller,
                         reduced_dynamics)
from .dynamics import (CraneParameters, DynamicsMatrices, GeneralizedState,
                       InvalidStateError, SingularInertiaError,
                       boom_center_position, dynamics_matrices,
                       forward_dynamics, payload_jacobian, payload_position,
                       total_energy)
from .engine import (RunMetrics, SimulationAbort, SimulationConfig,
                     TrajectoryLog, metrics, run, step)
from .oracle import (MutationSpec, OracleConfig, OracleConvergenceError,
                     lagrangian, oracle_accelerations, sample_states,
                     term_diff_report)
from .stability import (LinearizedSwingSystem, Verdict, is_hurwitz,
                        linearized_A, numeric_linearization_check,
                        stability_map)
from .wind import (DragConfig, GustProfile, WindDisturbance, drag_force,
                   generalized_force, wind_speed)

__version__ = "0.1.0"
