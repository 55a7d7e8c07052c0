"""Time-optimal control synthesis for two-level quantum systems on SU(2)."""
from .errors import (
    BoundaryPoint,
    Infeasible,
    InvalidInput,
    MagnitudeMismatch,
    NormViolation,
    OutOfValidity,
    SolverFailure,
    SU2ControlError,
)
from .extremal import (
    DriftControlLaw,
    FreeControlLaw,
    control_transform,
    drift_disk_traj,
    drift_propagator,
    free_disk_traj,
    free_propagator,
    match_phase,
)
from .mintime import (
    MinTimeResult,
    boundary_min_time,
    min_time_drift,
    min_time_free,
    min_time_sweep,
    omega_bounds,
)
from .oracle import ControlWaveform, integrate_drift, integrate_free, verify_plan
from .reachable import (
    CriticalTrajectory,
    Frontline,
    Region,
    contains,
    contains_drift,
    critical_trajectory,
    frontline,
    jacobian_det,
    separatrix,
)
from .su2 import (
    GEOMETRY_TOL,
    UNITARITY_TOL,
    DiskPoint,
    LieCoeffs,
    SU2Element,
    compose,
    disk_point,
    distance,
    exp_lie,
    inverse,
    trace_inner,
)
from .sync import (
    SyncPlan,
    SyncProblem,
    feasible_at,
    next_feasible_time,
    slowdown_gamma,
    synchronize,
)

__all__ = [name for name in dir() if not name.startswith("_")]
