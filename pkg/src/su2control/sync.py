"""Simultaneous minimum-time steering of independent qubits.

Each system j has its own target and control bound. The common final time
starts at the slowest individual minimum time and is pushed forward until
every target is reachable at that same instant; systems with slack are then
slowed down by shrinking their control bound until their target sits on the
boundary of the reachable set.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .errors import Infeasible, InvalidInput
from .extremal import DriftControlLaw
from .mintime import (
    MinTimeResult,
    _check_residual,
    _synthesize_drift,
    first_feasible_time,
    min_time_drift,
    scan_step,
)
from .reachable import contains_drift, drift_margin
from .su2 import GEOMETRY_TOL, SU2Element

GAMMA_BISECT_WIDTH = 1e-10


@dataclass(frozen=True)
class SyncProblem:
    targets: tuple[SU2Element, ...]
    gamma_max: tuple[float, ...]
    step: float | None = None

    def __post_init__(self):
        if len(self.targets) != len(self.gamma_max):
            raise InvalidInput("targets and gamma_max differ in length")
        if not self.targets:
            raise InvalidInput("a problem needs at least one system")
        for j, g in enumerate(self.gamma_max):
            if not g > 0 or not math.isfinite(g):
                raise InvalidInput(f"system {j}: gamma_max must be positive, got {g!r}")
        if self.step is not None and not self.step > 0:
            raise InvalidInput(f"scan step must be positive, got {self.step!r}")

    @classmethod
    def from_pairs(cls, systems: Sequence[tuple[SU2Element, float]], step: float | None = None):
        return cls(tuple(s[0] for s in systems), tuple(float(s[1]) for s in systems), step)

    @property
    def size(self) -> int:
        return len(self.targets)


@dataclass(frozen=True)
class SyncPlan:
    T_common: float
    laws: tuple[DriftControlLaw, ...]
    targets: tuple[SU2Element, ...]
    gamma_max: tuple[float, ...]
    gamma_eff: tuple[float, ...]
    individual_times: tuple[float, ...] = ()
    iterations: int = 0
    residuals: tuple[float, ...] = field(default=())


def feasible_at(target: SU2Element, gamma: float, T: float) -> bool:
    return contains_drift(target.alpha, T, gamma)


def next_feasible_time(target: SU2Element, gamma: float, T0: float, step: float | None = None) -> float:
    """First time after ``T0`` at which ``target`` becomes reachable."""
    if feasible_at(target, gamma, T0):
        raise InvalidInput(f"target is already reachable at T0={T0}")
    return first_feasible_time(target.alpha, gamma, T0, step)


def slowdown_gamma(target: SU2Element, gamma_max: float, T: float) -> float:
    """Smallest control bound for which ``target`` is still reachable at time ``T``.

    The reachable sets are nested in the bound, so bisection applies; the
    returned bound puts the rotated target on the boundary of the region.
    """
    if not feasible_at(target, gamma_max, T):
        raise Infeasible(f"target not reachable at T={T} with gamma={gamma_max}")
    z = target.alpha
    if float(drift_margin(z, T, gamma_max)) <= GEOMETRY_TOL:
        return gamma_max
    lo, hi = 0.0, gamma_max
    while hi - lo > GAMMA_BISECT_WIDTH:
        mid = 0.5 * (lo + hi)
        if mid > 0 and float(drift_margin(z, T, mid)) >= 0.0:
            hi = mid
        else:
            lo = mid
    return hi


def synthesize_at(target: SU2Element, gamma: float, T: float) -> tuple[DriftControlLaw, float]:
    """Extremal law reaching ``target`` at exactly ``T``, when the target is on the boundary."""
    law, res, _ = _synthesize_drift(target, T, gamma, polish=False)
    _check_residual(res, "sync", gamma)
    return law, res


def synchronize(problem: SyncProblem) -> SyncPlan:
    """Minimum common time and per-system extremal laws."""
    singles: list[MinTimeResult] = [
        min_time_drift(X, g, problem.step) for X, g in zip(problem.targets, problem.gamma_max)
    ]
    times = tuple(r.t_star for r in singles)
    T = max(times)
    iterations = 0
    while True:
        late = [
            j
            for j, (X, g) in enumerate(zip(problem.targets, problem.gamma_max))
            if not feasible_at(X, g, T)
        ]
        if not late:
            break
        nexts = {j: next_feasible_time(problem.targets[j], problem.gamma_max[j], T, problem.step) for j in late}
        # largest jump first; dict order keeps the lowest index on ties
        j_bar = max(nexts, key=lambda j: nexts[j])
        T = nexts[j_bar]
        iterations += 1

    laws, g_eff, residuals = [], [], []
    for j, (X, g) in enumerate(zip(problem.targets, problem.gamma_max)):
        if T == singles[j].t_star:
            law, res, ge = singles[j].law, singles[j].residual, g
        else:
            ge = slowdown_gamma(X, g, T)
            law, res = synthesize_at(X, ge, T)
        laws.append(law)
        g_eff.append(ge)
        residuals.append(res)
    return SyncPlan(
        T_common=T,
        laws=tuple(laws),
        targets=tuple(problem.targets),
        gamma_max=tuple(problem.gamma_max),
        gamma_eff=tuple(g_eff),
        individual_times=times,
        iterations=iterations,
        residuals=tuple(residuals),
    )


def common_scan_step(problem: SyncProblem) -> float:
    return problem.step if problem.step is not None else min(scan_step(g) for g in problem.gamma_max)
