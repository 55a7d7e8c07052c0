"""Closed-form extremal controls and propagators.

Two systems are handled:

* the drift system ``dX/dtau = (sz + ux*sx + uy*sy) X``;
* the driftless (interaction-picture) system ``dU/dtau = (vx*sx + vy*sy) U``.

Extremal controls have the form ``(gamma*sin(omega*tau + phi), -gamma*cos(omega*tau + phi))``.
Every public duration is expressed in t-units, ``t = tau/2``; the factor 2 is
applied only where a control is evaluated.

The two families use *different* frequency conventions:

========  =====================  ==============================
system    helper quantities      (1,1) entry
========  =====================  ==============================
drift     b = 1 - omega,         e^{i omega t}(cos at + i(b/a) sin at)
          a = sqrt(gamma^2+b^2)
free      a = sqrt(omega^2+gamma^2)  e^{i omega t}(cos at - i(omega/a) sin at)
========  =====================  ==============================

A free extremal with frequency ``w`` maps under the interaction-picture
rotation to the drift extremal with frequency ``w + 1`` and the same phase.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, MagnitudeMismatch
from .su2 import GEOMETRY_TOL, DiskPoint, SU2Element


def _check_gamma(gamma: float) -> None:
    if not gamma > 0 or not math.isfinite(gamma):
        raise InvalidInput(f"gamma must be positive and finite, got {gamma!r}")


def _check_time(t: float) -> None:
    if not t >= 0 or not math.isfinite(t):
        raise InvalidInput(f"t must be non-negative and finite, got {t!r}")


def wrap_phase(phi: float) -> float:
    """Principal branch in [-pi, pi)."""
    return (phi + math.pi) % (2.0 * math.pi) - math.pi


def extremal_control(tau, omega: float, phi: float, gamma: float):
    """Extremal control evaluated at physical time ``tau`` (scalar or array)."""
    arg = np.multiply(omega, tau) + phi
    return gamma * np.sin(arg), -gamma * np.cos(arg)


@dataclass(frozen=True)
class DriftControlLaw:
    """Extremal control for the drift system (drift frequency convention)."""

    gamma: float
    omega: float
    phi: float
    t_final: float

    def __post_init__(self):
        _check_gamma(self.gamma)
        _check_time(self.t_final)

    def control(self, tau):
        return extremal_control(tau, self.omega, self.phi, self.gamma)

    def propagator(self, t: float | None = None) -> SU2Element:
        return drift_propagator(self.t_final if t is None else t, self.omega, self.phi, self.gamma)


@dataclass(frozen=True)
class FreeControlLaw:
    """Extremal control for the driftless system (free frequency convention)."""

    gamma: float
    omega: float
    phi: float
    t_final: float

    def __post_init__(self):
        _check_gamma(self.gamma)
        _check_time(self.t_final)

    def control(self, tau):
        return extremal_control(tau, self.omega, self.phi, self.gamma)

    def propagator(self, t: float | None = None) -> SU2Element:
        return free_propagator(self.t_final if t is None else t, self.omega, self.phi, self.gamma)

    def to_drift(self) -> DriftControlLaw:
        """Drift-system law whose trajectory is ``e^{2 sz t}`` times this one."""
        return DriftControlLaw(self.gamma, self.omega + 1.0, self.phi, self.t_final)


def _drift_entries(t, omega, phi, gamma):
    b = 1.0 - omega
    a = math.hypot(gamma, b)
    s = math.sin(a * t)
    rot = complex(math.cos(omega * t), math.sin(omega * t))
    alpha = rot * complex(math.cos(a * t), (b / a) * s)
    beta = rot * complex(math.cos(phi), math.sin(phi)) * ((gamma / a) * s)
    return alpha, beta


def _free_entries(t, omega, phi, gamma):
    a = math.hypot(omega, gamma)
    s = math.sin(a * t)
    rot = complex(math.cos(omega * t), math.sin(omega * t))
    alpha = rot * complex(math.cos(a * t), -(omega / a) * s)
    beta = rot * complex(math.cos(phi), math.sin(phi)) * ((gamma / a) * s)
    return alpha, beta


def drift_propagator(t: float, omega: float, phi: float, gamma: float) -> SU2Element:
    """State of the drift system at t-time ``t`` under the extremal (omega, phi, gamma)."""
    _check_gamma(gamma)
    _check_time(t)
    return SU2Element.normalized(*_drift_entries(t, omega, phi, gamma))


def free_propagator(t: float, omega: float, phi: float, gamma: float) -> SU2Element:
    """State of the driftless system at t-time ``t`` under the extremal (omega, phi, gamma)."""
    _check_gamma(gamma)
    _check_time(t)
    return SU2Element.normalized(*_free_entries(t, omega, phi, gamma))


def drift_disk_traj(t, omega, gamma):
    """(x, y) of the drift trajectory; broadcasts over array arguments.

    Returns a DiskPoint for scalar input and a pair of arrays otherwise.
    """
    scalar = np.ndim(t) == 0 and np.ndim(omega) == 0 and np.ndim(gamma) == 0
    t, omega, gamma = (np.asarray(v, dtype=float) for v in (t, omega, gamma))
    b = 1.0 - omega
    a = np.hypot(gamma, b)
    ca, sa = np.cos(a * t), np.sin(a * t)
    cw, sw = np.cos(omega * t), np.sin(omega * t)
    x = cw * ca - (b / a) * sw * sa
    y = sw * ca + (b / a) * cw * sa
    if scalar:
        return DiskPoint(float(x), float(y))
    return x, y


def drift_disk_velocity(t, omega, gamma):
    """d/dt of the drift disk trajectory, as a complex number (or array)."""
    t, omega, gamma = (np.asarray(v, dtype=float) for v in (t, omega, gamma))
    b = 1.0 - omega
    a = np.hypot(gamma, b)
    rot = np.exp(1j * omega * t)
    inner = np.cos(a * t) + 1j * (b / a) * np.sin(a * t)
    d_inner = -a * np.sin(a * t) + 1j * b * np.cos(a * t)
    return rot * (1j * omega * inner + d_inner)


def free_disk_traj(t, omega, gamma):
    """(x, y) of the driftless trajectory, i.e. a point of the frontline family.

    Broadcasts like :func:`drift_disk_traj`.
    """
    scalar = np.ndim(t) == 0 and np.ndim(omega) == 0 and np.ndim(gamma) == 0
    x, y = free_xy(t, omega, gamma)
    if scalar:
        return DiskPoint(float(x), float(y))
    return x, y


def free_xy(t, omega, gamma):
    t, omega, gamma = (np.asarray(v, dtype=float) for v in (t, omega, gamma))
    a = np.hypot(omega, gamma)
    ca, sa = np.cos(a * t), np.sin(a * t)
    cw, sw = np.cos(omega * t), np.sin(omega * t)
    r = omega / a
    x = cw * ca + r * sw * sa
    y = sw * ca - r * cw * sa
    return x, y


def free_partials(t, omega, gamma):
    """Partial derivatives of the free (1,1) entry, as complex numbers.

    Returns ``(d/dt, d/domega)``; the omega-derivative has the closed form
    ``-i (gamma^2/a^3) (sin at - at cos at) e^{i omega t}``.
    """
    t, omega, gamma = (np.asarray(v, dtype=float) for v in (t, omega, gamma))
    a = np.hypot(omega, gamma)
    rot = np.exp(1j * omega * t)
    d_t = -rot * (gamma**2 / a) * np.sin(a * t)
    d_w = -1j * rot * (gamma**2 / a**3) * (np.sin(a * t) - a * t * np.cos(a * t))
    return d_t, d_w


def control_transform(free_law: FreeControlLaw, t: float):
    """Drift-system control equivalent to ``free_law`` at t-time ``t``.

    Applies the inverse of the interaction-picture rotation ``v = R(tau) u``.
    """
    tau = 2.0 * np.asarray(t, dtype=float)
    vx, vy = free_law.control(tau)
    c, s = np.cos(tau), np.sin(tau)
    ux = c * vx - s * vy
    uy = s * vx + c * vy
    if np.ndim(ux) == 0:
        return float(ux), float(uy)
    return ux, uy


def match_phase(
    target: SU2Element,
    t: float,
    omega: float,
    gamma: float,
    *,
    convention: str = "drift",
    tol: float = GEOMETRY_TOL,
) -> float:
    """Phase ``phi`` making the propagator's (1,2) entry equal ``target.beta``.

    The result is the principal branch in [-pi, pi). A target with
    ``|beta| < GEOMETRY_TOL`` has no usable phase and 0 is returned; ``tol``
    only bounds the accepted magnitude mismatch.
    """
    _check_gamma(gamma)
    if convention == "drift":
        a = math.hypot(gamma, 1.0 - omega)
    elif convention == "free":
        a = math.hypot(omega, gamma)
    else:
        raise InvalidInput(f"unknown convention {convention!r}")
    amp = (gamma / a) * math.sin(a * t)
    beta = target.beta
    if abs(abs(beta) - abs(amp)) > tol:
        raise MagnitudeMismatch(
            f"|beta| = {abs(beta):.12g} but (t, omega) give {abs(amp):.12g}"
        )
    if abs(beta) < GEOMETRY_TOL:
        return 0.0
    phi = math.atan2(beta.imag, beta.real) - omega * t
    if amp < 0:
        phi += math.pi
    return wrap_phase(phi)
