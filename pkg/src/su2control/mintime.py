"""Minimum-time solvers for single targets.

Free targets are solved by bisection on the (monotone) driftless reachable
sets. Drift targets need a forward scan: ``e^{-it} P_f`` rotates while the
region grows, so feasibility in ``t`` can switch on and off and the first
switch-on is the answer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import BoundaryPoint, InvalidInput, OutOfValidity, SolverFailure
from .extremal import (
    DriftControlLaw,
    FreeControlLaw,
    drift_propagator,
    free_partials,
    free_propagator,
    free_xy,
    match_phase,
)
from .reachable import (
    distance_to_critical,
    drift_margin,
    locate_on_frontline,
    omega_max,
    signed_margin,
)
from .su2 import GEOMETRY_TOL, SU2Element, as_complex, distance

FREE_BISECT_WIDTH = 1e-10
DRIFT_BISECT_WIDTH = 1e-9
RESIDUAL_LIMIT = 1e-6
# magnitude slack for phase matching; the final residual is what gets checked
_PHASE_SLACK = 1e-3
_SCAN_BLOCK = 64


@dataclass(frozen=True)
class MinTimeResult:
    t_star: float
    omega_star: float
    convention: str
    law: DriftControlLaw | FreeControlLaw
    residual: float
    target: SU2Element
    omega_free: float

    @property
    def laws(self) -> tuple:
        return (self.law,)

    @property
    def targets(self) -> tuple:
        return (self.target,)

    @property
    def phi(self) -> float:
        return self.law.phi

    @property
    def gamma(self) -> float:
        return self.law.gamma


def _check_gamma(gamma: float) -> None:
    if not gamma > 0 or not math.isfinite(gamma):
        raise InvalidInput(f"gamma must be positive and finite, got {gamma!r}")


def omega_bounds(P, gamma: float) -> tuple[float, float]:
    """Admissible drift-convention frequencies ``1 -+ gamma*K`` for an interior disk point."""
    _check_gamma(gamma)
    r2 = abs(as_complex(P)) ** 2
    if r2 >= 1.0 - GEOMETRY_TOL:
        raise BoundaryPoint("omega bounds diverge on the unit circle")
    K = math.sqrt(r2 / (1.0 - r2))
    return 1.0 - gamma * K, 1.0 + gamma * K


def boundary_min_time(psi_f: float, gamma: float) -> float:
    """Closed-form minimum time for a target ``e^{i psi_f}`` on the unit circle (gamma <= 1)."""
    _check_gamma(gamma)
    if gamma > 1.0:
        raise OutOfValidity(f"closed form holds only for gamma <= 1, got {gamma}")
    if not 0.0 <= psi_f < 2.0 * math.pi:
        raise InvalidInput(f"psi_f must lie in [0, 2pi), got {psi_f}")
    q = psi_f * (2.0 * math.pi - psi_f)
    return q / (math.pi - psi_f + math.sqrt(math.pi**2 + gamma**2 * q))


def _target_from_point(P) -> SU2Element:
    if isinstance(P, SU2Element):
        return P
    z = as_complex(P)
    r = abs(z)
    if r > 1.0 + GEOMETRY_TOL:
        raise InvalidInput(f"point {z} lies outside the unit disk")
    if r > 1.0:
        z /= r
    # the off-diagonal phase is free; take it real and non-negative
    return SU2Element.normalized(z, math.sqrt(max(0.0, 1.0 - abs(z) ** 2)))


def _bisect(feasible, lo: float, hi: float, width: float) -> float:
    """Smallest feasible time in (lo, hi], assuming ``lo`` infeasible and ``hi`` feasible."""
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _polish(P: complex, t: float, w: float, gamma: float, rotating: bool, iters: int = 20):
    """Damped Newton on the disk-point equation in (t, omega).

    With ``rotating`` the equation is ``e^{it} free(t, w) = P`` (drift target),
    otherwise ``free(t, w) = P``. Steps that do not lower the residual, or move
    ``t`` noticeably, are rejected.
    """

    def G(t, w):
        x, y = free_xy(t, w, gamma)
        z = complex(float(x), float(y))
        if rotating:
            z *= complex(math.cos(t), math.sin(t))
        return z - P

    r = G(t, w)
    t0 = t
    for _ in range(iters):
        if abs(r) < 1e-15:
            break
        d_t, d_w = (complex(v) for v in free_partials(t, w, gamma))
        if rotating:
            x, y = free_xy(t, w, gamma)
            rot = complex(math.cos(t), math.sin(t))
            d_t = rot * (d_t + 1j * complex(float(x), float(y)))
            d_w = rot * d_w
        J = np.array([[d_t.real, d_w.real], [d_t.imag, d_w.imag]])
        try:
            step = np.linalg.solve(J, [-r.real, -r.imag])
        except np.linalg.LinAlgError:
            break
        lam = 1.0
        accepted = False
        while lam > 1e-4:
            tn, wn = t + lam * step[0], w + lam * step[1]
            if tn > 0 and abs(tn - t0) < 1e-6:
                rn = G(tn, wn)
                if abs(rn) < abs(r):
                    t, w, r = tn, wn, rn
                    accepted = True
                    break
            lam *= 0.5
        if not accepted:
            break
    return float(t), float(w), abs(r)


def _recover_omega(Q: complex, T: float, gamma: float) -> float:
    """Frontline frequency whose point at time ``T`` is nearest to ``Q``."""
    Om = omega_max(T, gamma)
    if gamma * T >= math.pi or Om == 0.0:
        return 0.0
    if abs(Q) >= 1.0 - GEOMETRY_TOL:
        # endpoints: omega = -Omega sits at the positive angle
        return -Om if math.atan2(Q.imag, Q.real) >= 0 else Om
    w, _ = locate_on_frontline(Q, T, gamma)
    return w


def _free_time(P: complex, gamma: float) -> float:
    if abs(P - 1.0) <= GEOMETRY_TOL:
        return 0.0
    hi = math.pi / gamma
    return _bisect(lambda T: signed_margin(P, T, gamma) >= -GEOMETRY_TOL, 0.0, hi, FREE_BISECT_WIDTH)


def min_time_free(P, gamma: float) -> MinTimeResult:
    """Minimum time and extremal control for the driftless system.

    ``P`` may be a disk point (the off-diagonal phase is then taken as 0) or a
    full SU2Element whose off-diagonal phase is matched.
    """
    _check_gamma(gamma)
    target = _target_from_point(P)
    z = target.alpha
    T = _free_time(z, gamma)
    if T == 0.0:
        law = FreeControlLaw(gamma, 0.0, 0.0, 0.0)
        return MinTimeResult(0.0, 0.0, "free", law, distance(law.propagator(), target), target, 0.0)
    w = _recover_omega(z, T, gamma)
    if abs(z) < 1.0 - GEOMETRY_TOL and gamma * T < math.pi:
        T, w, _ = _polish(z, T, w, gamma, rotating=False)
    phi = match_phase(target, T, w, gamma, convention="free", tol=_PHASE_SLACK)
    law = FreeControlLaw(gamma, w, phi, T)
    res = distance(free_propagator(T, w, phi, gamma), target)
    _check_residual(res, "free", gamma)
    return MinTimeResult(T, w, "free", law, res, target, w)


def _check_residual(res: float, kind: str, gamma: float) -> None:
    if not res <= RESIDUAL_LIMIT:
        raise SolverFailure(f"{kind} synthesis residual {res:.3e} exceeds {RESIDUAL_LIMIT} (gamma={gamma})")


def scan_step(gamma: float) -> float:
    return min(0.01, math.pi / (100.0 * gamma))


def first_feasible_time(
    P,
    gamma: float,
    t0: float = 0.0,
    step: float | None = None,
    tol: float = GEOMETRY_TOL,
) -> float:
    """Smallest ``t >= t0`` at which ``e^{-it} P`` lies in the driftless reachable set.

    The grid ``t0 + k*step`` is scanned in blocks; the first sign change of the
    signed margin is refined by bisection. Interior local maxima of the margin
    between grid nodes are maximised exactly, which catches feasibility windows
    narrower than the step (tangential touches). Always terminates at
    ``pi/gamma`` where the whole disk is reachable.
    """
    z = as_complex(P)
    step = scan_step(gamma) if step is None else step
    t_end = math.pi / gamma
    if t0 >= t_end:
        return t0

    def margin(t: float) -> float:
        return float(drift_margin(z, t, gamma))

    def feasible(t: float) -> bool:
        return margin(t) >= -tol

    def refine(lo: float, hi: float, m_hi: float) -> float:
        # aim for the exact boundary crossing when the bracket allows it; near a
        # tangential touch the -tol band is ~sqrt(tol) wide in t
        level = 0.0 if m_hi >= 0.0 else -tol
        return _bisect(lambda s: margin(s) >= level, lo, hi, DRIFT_BISECT_WIDTH)

    if feasible(t0):
        return t0
    n_total = max(1, math.ceil((t_end - t0) / step - 1e-12))
    # m_prev2, m_prev hold the two most recent margins; a virtual -inf precedes t0
    t_prev2, m_prev2 = t0, -math.inf
    t_prev, m_prev = t0, margin(t0)
    k = 1
    while k <= n_total:
        ks = np.arange(k, min(k + _SCAN_BLOCK, n_total + 1))
        ts = np.minimum(t0 + ks * step, t_end)
        ts[ks == n_total] = t_end
        ms = drift_margin(z, ts, gamma)
        for t, m in zip(ts, ms):
            t, m = float(t), float(m)
            if m_prev > m_prev2 and m_prev > m:
                lo = t_prev2 if math.isfinite(m_prev2) else t_prev
                res = minimize_scalar(
                    lambda s: -margin(s), bounds=(lo, t), method="bounded", options={"xatol": 1e-12}
                )
                t_max = float(res.x)
                if -res.fun >= -tol and t_max > lo:
                    if -res.fun < 0.0:
                        return t_max
                    return refine(lo, t_max, -res.fun)
            if m >= -tol:
                return refine(t_prev, t, m)
            t_prev2, m_prev2, t_prev, m_prev = t_prev, m_prev, t, m
        k = int(ks[-1]) + 1
    return t_end


def _synthesize_drift(target: SU2Element, t: float, gamma: float, polish: bool = True):
    """Drift law reaching ``target`` at time ``t`` under bound ``gamma``."""
    z = target.alpha
    Q = z * complex(math.cos(t), -math.sin(t))
    w_free = _recover_omega(Q, t, gamma)
    if polish and abs(z) < 1.0 - GEOMETRY_TOL and gamma * t < math.pi:
        t, w_free, _ = _polish(z, t, w_free, gamma, rotating=True)
    w = w_free + 1.0
    if abs(z) < 1.0 - GEOMETRY_TOL:
        lo, hi = omega_bounds(z, gamma)
        w = min(max(w, lo), hi)
        w_free = w - 1.0
    phi = match_phase(target, t, w, gamma, convention="drift", tol=_PHASE_SLACK)
    law = DriftControlLaw(gamma, w, phi, t)
    res = distance(drift_propagator(t, w, phi, gamma), target)
    return law, res, w_free


def min_time_drift(X_f: SU2Element, gamma: float, step: float | None = None) -> MinTimeResult:
    """Minimum time and extremal drift-system control reaching ``X_f``."""
    _check_gamma(gamma)
    if not isinstance(X_f, SU2Element):
        raise InvalidInput("min_time_drift expects an SU2Element target")
    z = X_f.alpha
    if abs(z - 1.0) <= GEOMETRY_TOL:
        law = DriftControlLaw(gamma, 1.0, 0.0, 0.0)
        return MinTimeResult(0.0, 1.0, "drift", law, distance(law.propagator(), X_f), X_f, 0.0)
    t = first_feasible_time(z, gamma, 0.0, step)
    law, res, w_free = _synthesize_drift(X_f, t, gamma)
    _check_residual(res, "drift", gamma)
    return MinTimeResult(law.t_final, law.omega, "drift", law, res, X_f, w_free)


@dataclass(frozen=True)
class SweepRow:
    gamma: float
    t_star: float
    jump: bool
    near_critical: bool


def _jump_flags(gammas: np.ndarray, times: np.ndarray, factor: float = 10.0, floor: float = 1e-6):
    """Flag the right node of every interval whose slope dwarfs its neighbours'."""
    flags = np.zeros(len(gammas), dtype=bool)
    if len(gammas) < 2:
        return flags
    dt = np.abs(np.diff(times))
    slope = dt / np.diff(gammas)
    for k in range(len(dt)):
        nb = np.concatenate([slope[max(0, k - 3) : k], slope[k + 1 : k + 4]])
        scale = float(np.median(nb)) if nb.size else 0.0
        if dt[k] > floor and slope[k] > factor * scale:
            flags[k + 1] = True
    return flags


def min_time_sweep(P_f, gamma_grid: Sequence[float]) -> list[SweepRow]:
    """``t*(gamma)`` over an ascending grid, with jump and critical-proximity flags."""
    g = np.asarray(gamma_grid, dtype=float)
    if g.ndim != 1 or g.size == 0:
        raise InvalidInput("gamma grid must be a non-empty 1-D sequence")
    if np.any(~(g > 0)) or np.any(np.diff(g) <= 0):
        raise InvalidInput("gamma grid must be positive and strictly ascending")
    target = P_f if isinstance(P_f, SU2Element) else _target_from_point(P_f)
    times = np.array([min_time_drift(target, float(gm)).t_star for gm in g])
    flags = _jump_flags(g, times)
    rows = []
    for gm, t, f in zip(g, times, flags):
        near = False
        if f:
            near = distance_to_critical(target.alpha, float(gm))[0] < 1e-3
        rows.append(SweepRow(float(gm), float(t), bool(f), near))
    return rows
