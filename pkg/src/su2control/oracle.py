"""Independent ODE integration of the drift and driftless SU(2) systems.

Nothing in here uses the closed-form propagators: controls are sampled from an
arbitrary waveform and the matrix ODE is integrated with classical fixed-step
RK4, renormalising the state after every step.

The evolved quantity is the first column ``(alpha, -conj(beta))`` of ``X``,
which satisfies the linear equation ``psi' = M(tau) psi``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numba
import numpy as np

from .errors import InvalidInput, NormViolation
from .extremal import DriftControlLaw, FreeControlLaw
from .su2 import SU2Element, distance

DEFAULT_DT = 1e-4
VERIFY_TOL = 1e-6
NORM_SLACK = 1e-12


@dataclass(frozen=True)
class ControlWaveform:
    """Control ``tau -> (ux, uy)`` in physical time, with its norm bound.

    ``func`` must be side-effect free. It is called with a 1-D array of times
    and should return two arrays; scalar-only callables are accepted and
    evaluated point by point.
    """

    func: Callable
    gamma: float

    def sample(self, tau: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        try:
            ux, uy = self.func(tau)
            ux = np.broadcast_to(np.asarray(ux, dtype=float), tau.shape)
            uy = np.broadcast_to(np.asarray(uy, dtype=float), tau.shape)
        except (TypeError, ValueError):
            pairs = [self.func(float(s)) for s in tau]
            ux = np.array([p[0] for p in pairs], dtype=float)
            uy = np.array([p[1] for p in pairs], dtype=float)
        norm = np.hypot(ux, uy)
        if norm.size and (not np.all(np.isfinite(norm)) or norm.max() > self.gamma + NORM_SLACK):
            k = int(np.nanargmax(np.where(np.isfinite(norm), norm, np.inf)))
            raise NormViolation(
                f"|u(tau={tau[k]:.6g})| = {norm[k]:.12g} exceeds bound {self.gamma:.12g}"
            )
        return np.ascontiguousarray(ux), np.ascontiguousarray(uy)


def waveform_of(law: DriftControlLaw | FreeControlLaw) -> ControlWaveform:
    return ControlWaveform(law.control, law.gamma)


@numba.njit(cache=True)
def _rk4_column(h, ux, uy, drift):
    # ux, uy hold the control at tau = k*h/2, k = 0..2n
    n = (ux.shape[0] - 1) // 2
    p0 = 1.0 + 0.0j
    p1 = 0.0 + 0.0j
    half_i = 0.5j
    for k in range(n):
        # M = 0.5 * [[i d, i ux - uy], [i ux + uy, -i d]]
        ax = ux[2 * k]
        ay = uy[2 * k]
        bx = ux[2 * k + 1]
        by = uy[2 * k + 1]
        cx = ux[2 * k + 2]
        cy = uy[2 * k + 2]

        m00 = half_i * drift
        m01a = 0.5 * (1j * ax - ay)
        m10a = 0.5 * (1j * ax + ay)
        m01b = 0.5 * (1j * bx - by)
        m10b = 0.5 * (1j * bx + by)
        m01c = 0.5 * (1j * cx - cy)
        m10c = 0.5 * (1j * cx + cy)

        k10 = m00 * p0 + m01a * p1
        k11 = m10a * p0 - m00 * p1
        q0 = p0 + 0.5 * h * k10
        q1 = p1 + 0.5 * h * k11
        k20 = m00 * q0 + m01b * q1
        k21 = m10b * q0 - m00 * q1
        q0 = p0 + 0.5 * h * k20
        q1 = p1 + 0.5 * h * k21
        k30 = m00 * q0 + m01b * q1
        k31 = m10b * q0 - m00 * q1
        q0 = p0 + h * k30
        q1 = p1 + h * k31
        k40 = m00 * q0 + m01c * q1
        k41 = m10c * q0 - m00 * q1

        p0 = p0 + (h / 6.0) * (k10 + 2.0 * k20 + 2.0 * k30 + k40)
        p1 = p1 + (h / 6.0) * (k11 + 2.0 * k21 + 2.0 * k31 + k41)
        nrm = math.sqrt(p0.real**2 + p0.imag**2 + p1.real**2 + p1.imag**2)
        p0 = p0 / nrm
        p1 = p1 / nrm
    return p0, p1


def _integrate(w: ControlWaveform, t_final: float, dt: float, drift: float) -> SU2Element:
    if not dt > 0:
        raise InvalidInput(f"dt must be positive, got {dt!r}")
    if not t_final >= 0 or not math.isfinite(t_final):
        raise InvalidInput(f"t_final must be non-negative, got {t_final!r}")
    if t_final == 0:
        return SU2Element(1.0 + 0j, 0j)
    n = max(1, math.ceil(t_final / dt - 1e-9))
    tau_final = 2.0 * t_final
    h = tau_final / n
    tau = np.linspace(0.0, tau_final, 2 * n + 1)
    ux, uy = w.sample(tau)
    p0, p1 = _rk4_column(h, ux, uy, drift)
    return SU2Element.normalized(p0, -p1.conjugate())


def integrate_drift(w: ControlWaveform, t_final: float, dt: float = DEFAULT_DT) -> SU2Element:
    """Integrate ``dX/dtau = (sz + ux sx + uy sy) X`` from the identity to t-time ``t_final``."""
    return _integrate(w, t_final, dt, 1.0)


def integrate_free(w: ControlWaveform, t_final: float, dt: float = DEFAULT_DT) -> SU2Element:
    """Integrate ``dU/dtau = (vx sx + vy sy) U`` from the identity to t-time ``t_final``."""
    return _integrate(w, t_final, dt, 0.0)


def simulate_law(law: DriftControlLaw | FreeControlLaw, dt: float = DEFAULT_DT) -> SU2Element:
    if isinstance(law, DriftControlLaw):
        return integrate_drift(waveform_of(law), law.t_final, dt)
    return integrate_free(waveform_of(law), law.t_final, dt)


@dataclass(frozen=True)
class VerificationReport:
    distances: tuple[float, ...]
    tol: float
    dt: float
    passed: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "passed", all(d <= self.tol for d in self.distances))

    @property
    def max_distance(self) -> float:
        return max(self.distances, default=0.0)


def verify_plan(plan, dt: float = DEFAULT_DT, tol: float = VERIFY_TOL) -> VerificationReport:
    """Simulate every law of ``plan`` and measure the distance to its target.

    ``plan`` is anything exposing ``laws`` and ``targets`` sequences
    (a SyncPlan or a MinTimeResult); an empty plan passes vacuously.
    """
    dists = []
    for law, target in zip(plan.laws, plan.targets, strict=True):
        dists.append(distance(simulate_law(law, dt), target))
    return VerificationReport(tuple(dists), tol, dt)
