"""Reachable sets of the driftless system and their images under the drift.

At t-time ``T`` the driftless reachable set, projected on the unit disk, is the
region bounded by the *frontline* ``F_T`` (the free trajectories' endpoints
for ``|omega| <= Omega = sqrt(pi^2/T^2 - gamma^2)``) and by the arc of the unit
circle through (1, 0). The frontline meets the circle at angles
``+-(pi - sqrt(pi^2 - gamma^2 T^2))``, tangentially, and for ``gamma*T >= pi``
the region is the whole disk.

Membership is decided by a crossing-number test on a closed polygon made of
the sampled frontline, two radial spokes and an arc of radius 2 (so that the
polygon's outer side never clips the unit disk). Points whose polygon distance
is within the sampling error are re-examined against the analytic curve.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar, root

from .errors import InvalidInput
from .extremal import drift_disk_traj, drift_disk_velocity, free_xy
from .su2 import GEOMETRY_TOL, DiskPoint, as_complex

BASE_SAMPLES = 512
MAX_SAMPLES = 2**16
_OUTER_RADIUS = 2.0
_OUTER_ARC_POINTS = 64
_CHUNK = 512


def omega_max(T: float, gamma: float) -> float:
    """Half-width ``Omega`` of the frontline's parameter range (0 once gamma*T >= pi)."""
    if T <= 0:
        return math.inf
    return math.sqrt(max(math.pi**2 / T**2 - gamma**2, 0.0))


def endpoint_angle(T, gamma):
    """Polar angle of the frontline's upper endpoint; pi once the set is the whole disk."""
    gt = np.minimum(np.multiply(gamma, T), math.pi)
    return math.pi - np.sqrt(math.pi**2 - gt**2)


def radius_sq(omega, t, gamma):
    """Squared distance from the origin of a free trajectory point."""
    a = np.hypot(omega, gamma)
    return 1.0 - (gamma / a) ** 2 * np.sin(a * t) ** 2


def frontline_phase(omega: float, t: float, gamma: float) -> float:
    """Polar angle of the free trajectory point, from its arctan expression.

    The quadrant offset is pi whenever ``cos(a t) < 0``; at ``a t = pi/2`` the
    arctan term is replaced by its limit. Result is wrapped to [-pi, pi).
    """
    a = math.hypot(omega, gamma)
    at = a * t
    c = math.cos(at)
    if abs(c) < 1e-15:
        # omega/a * tan(at) -> +-inf
        term = math.copysign(math.pi / 2, omega * math.sin(at)) if omega != 0 else 0.0
        offset = 0.0
    else:
        term = math.atan((omega / a) * math.tan(at))
        offset = math.pi if c < 0 else 0.0
    psi = omega * t + offset - term
    return (psi + math.pi) % (2 * math.pi) - math.pi


@dataclass(frozen=True, eq=False)
class Frontline:
    T: float
    gamma: float
    omegas: np.ndarray
    x: np.ndarray
    y: np.ndarray

    @property
    def Omega(self) -> float:
        return omega_max(self.T, self.gamma)

    @property
    def degenerate(self) -> bool:
        return self.gamma * self.T >= math.pi

    @property
    def points(self) -> np.ndarray:
        return np.column_stack([self.x, self.y])

    @property
    def samples(self) -> list[tuple[float, DiskPoint]]:
        return [
            (float(w), DiskPoint(float(x), float(y)))
            for w, x, y in zip(self.omegas, self.x, self.y)
        ]


def _check_gamma(gamma):
    if not gamma > 0 or not math.isfinite(gamma):
        raise InvalidInput(f"gamma must be positive and finite, got {gamma!r}")


def frontline(T: float, gamma: float, n: int = BASE_SAMPLES) -> Frontline:
    """Sample ``F_T`` at ``n`` equispaced frequencies in [-Omega, Omega]."""
    _check_gamma(gamma)
    if not T > 0 or not math.isfinite(T):
        raise InvalidInput(f"T must be positive, got {T!r}")
    if n < 3:
        raise InvalidInput(f"need at least 3 samples, got {n}")
    if gamma * T >= math.pi:
        one = np.ones(1)
        return Frontline(T, gamma, np.zeros(1), -one, np.zeros(1))
    Om = omega_max(T, gamma)
    w = np.linspace(-Om, Om, n)
    x, y = free_xy(T, w, gamma)
    return Frontline(T, gamma, w, x, y)


def frontline_extension(T: float, gamma: float, n: int, factor: float = 20.0):
    """Samples of the continuation ``S_T`` (``Omega < |omega| <= factor*Omega``), both branches."""
    Om = omega_max(T, gamma)
    w = np.linspace(Om, factor * Om, n + 1)[1:]
    w = np.concatenate([-w[::-1], w])
    x, y = free_xy(T, w, gamma)
    return w, x, y


def hausdorff_refined(T: float, gamma: float, tol: float = GEOMETRY_TOL) -> Frontline:
    """Frontline sampled finely enough that doubling n moves it by less than ``tol``.

    The one-sided Hausdorff distance between successive refinements is the
    largest chord-to-midpoint deviation, evaluated exactly on the curve.
    """
    n = BASE_SAMPLES
    while True:
        fl = frontline(T, gamma, n)
        if fl.degenerate or n >= MAX_SAMPLES:
            return fl
        wm = 0.5 * (fl.omegas[1:] + fl.omegas[:-1])
        xm, ym = free_xy(T, wm, gamma)
        dev = _point_segment_distance(xm, ym, fl.x[:-1], fl.y[:-1], fl.x[1:], fl.y[1:])
        if dev.max() < tol:
            return fl
        n *= 2


def _point_segment_distance(px, py, ax, ay, bx, by):
    dx, dy = bx - ax, by - ay
    L2 = dx * dx + dy * dy
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(L2 > 0, ((px - ax) * dx + (py - ay) * dy) / L2, 0.0)
    s = np.clip(s, 0.0, 1.0)
    return np.hypot(px - (ax + s * dx), py - (ay + s * dy))


class Region:
    """Closed polygon approximating the driftless reachable set at (T, gamma).

    Vertices run counter-clockwise: an arc of radius 2 from angle ``-theta`` to
    ``theta`` (through angle 0), the spoke in to the upper frontline endpoint,
    the frontline for increasing omega, and the spoke back out.
    """

    def __init__(self, T: float, gamma: float, n: int = BASE_SAMPLES):
        self.T = float(T)
        self.gamma = float(gamma)
        self.front = frontline(T, gamma, n)
        self.theta = float(endpoint_angle(T, gamma))
        ang = np.linspace(-self.theta, self.theta, _OUTER_ARC_POINTS)
        ox, oy = _OUTER_RADIUS * np.cos(ang), _OUTER_RADIUS * np.sin(ang)
        self.vertices = np.column_stack(
            [np.concatenate([ox, self.front.x]), np.concatenate([oy, self.front.y])]
        )

    @property
    def is_simple(self) -> bool:
        """Brute-force check that no two non-adjacent polygon edges cross."""
        v = self.vertices
        a, b = v, np.roll(v, -1, axis=0)
        m = len(v)
        for i in range(m):
            j = np.arange(i + 2, m)
            if i == 0:
                j = j[j != m - 1]
            if j.size == 0:
                continue
            if np.any(_segments_cross(a[i], b[i], a[j], b[j])):
                return False
        return True


def _segments_cross(p, q, A, B):
    def orient(o, u, v):
        return (u[..., 0] - o[..., 0]) * (v[..., 1] - o[..., 1]) - (u[..., 1] - o[..., 1]) * (
            v[..., 0] - o[..., 0]
        )

    d1 = orient(A, B, p[None, :])
    d2 = orient(A, B, q[None, :])
    d3 = orient(p[None, :], q[None, :], A)
    d4 = orient(p[None, :], q[None, :], B)
    return (d1 * d2 < 0) & (d3 * d4 < 0)


def _free_point(w, T, gamma):
    a = math.hypot(w, gamma)
    ca, sa = math.cos(a * T), math.sin(a * T)
    cw, sw = math.cos(w * T), math.sin(w * T)
    r = w / a
    return cw * ca + r * sw * sa, sw * ca - r * cw * sa


def _free_dw(w, T, gamma):
    """d/domega of the frontline point, as (dx, dy)."""
    a = math.hypot(w, gamma)
    k = (gamma * gamma / a**3) * (math.sin(a * T) - a * T * math.cos(a * T))
    # -i k e^{i w T}
    return k * math.sin(w * T), -k * math.cos(w * T)


def _nearest_parameter(f, g, lo: float, hi: float, xatol: float) -> float:
    """Minimiser of a squared distance ``f`` on [lo, hi], sharpened via its stationarity ``g``.

    Minimising ``f`` alone resolves the parameter only to ~sqrt(eps); a root
    solve of ``g`` (the derivative's sign) restores full precision.
    """
    res = minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": xatol})
    w = float(res.x)
    d = max(1e-7 * max(1.0, abs(hi - lo)), 1e3 * xatol)
    a, b = max(lo, w - d), min(hi, w + d)
    if a < b:
        ga, gb = g(a), g(b)
        if ga < 0 < gb:
            w = brentq(g, a, b, xtol=1e-15)
    for edge in (lo, hi):
        if f(edge) < f(w):
            w = edge
    return w


def _refine(px, py, T, gamma, lo, hi, Om):
    """Exact signed distance to the analytic frontline, searching omega in [lo, hi]."""

    def f(w):
        x, y = _free_point(w, T, gamma)
        return (x - px) ** 2 + (y - py) ** 2

    def g(w):
        x, y = _free_point(w, T, gamma)
        dx, dy = _free_dw(w, T, gamma)
        return (x - px) * dx + (y - py) * dy

    w = _nearest_parameter(f, g, lo, hi, 1e-14 * max(1.0, abs(hi - lo)))
    x, y = _free_point(w, T, gamma)
    d = math.hypot(px - x, py - y)
    at_end = abs(abs(w) - Om) <= 1e-12 * max(1.0, Om)
    if at_end:
        # beyond the curve's end lies the arc side of the region
        return d, w
    # unit tangent for increasing omega is (sin wT, -cos wT); the region is on its left
    cross = math.sin(w * T) * (py - y) + math.cos(w * T) * (px - x)
    return (d if cross >= 0 else -d), w


def _margin_general(px, py, T, gamma, n):
    """Signed distances for points strictly inside the disk with 0 < gamma*T < pi."""
    K = px.size
    out = np.empty(K)
    if np.all(T == T[0]) and np.all(gamma == gamma[0]):
        # one shared curve: only the per-point distance arrays scale with K
        step = 4 * _CHUNK
        for s in range(0, K, step):
            sl = slice(s, min(s + step, K))
            out[sl] = _margin_chunk(px[sl], py[sl], T[:1], gamma[:1], n)
        return out
    for s in range(0, K, _CHUNK):
        sl = slice(s, min(s + _CHUNK, K))
        out[sl] = _margin_chunk(px[sl], py[sl], T[sl], gamma[sl], n)
    return out


def _margin_chunk(px, py, T, gamma, n):
    # T and gamma have one entry per point, or a single shared entry
    Om = np.sqrt(np.maximum(math.pi**2 / T**2 - gamma**2, 0.0))
    u = np.linspace(-1.0, 1.0, n)
    W = Om[:, None] * u[None, :]
    Tc, Gc = T[:, None], gamma[:, None]
    fx, fy = free_xy(Tc, W, Gc)

    Wm = 0.5 * (W[:, 1:] + W[:, :-1])
    mx, my = free_xy(Tc, Wm, Gc)
    sag = _point_segment_distance(mx, my, fx[:, :-1], fy[:, :-1], fx[:, 1:], fy[:, 1:]).max(axis=1)

    P = px[:, None], py[:, None]
    seg_d = _point_segment_distance(P[0], P[1], fx[:, :-1], fy[:, :-1], fx[:, 1:], fy[:, 1:])
    idx = seg_d.argmin(axis=1)
    d_poly = seg_d[np.arange(px.size), idx]

    theta = endpoint_angle(T, gamma)
    ang = theta[:, None] * np.linspace(-1.0, 1.0, _OUTER_ARC_POINTS)[None, :]
    vx = np.concatenate([_OUTER_RADIUS * np.cos(ang), fx], axis=1)
    vy = np.concatenate([_OUTER_RADIUS * np.sin(ang), fy], axis=1)
    wx, wy = np.roll(vx, -1, axis=1), np.roll(vy, -1, axis=1)
    straddle = (vy > P[1]) != (wy > P[1])
    with np.errstate(invalid="ignore", divide="ignore"):
        xint = vx + (P[1] - vy) * (wx - vx) / (wy - vy)
    crossings = np.count_nonzero(straddle & (P[0] < xint), axis=1)
    inside = crossings % 2 == 1

    shared = T.size == 1
    margin = np.where(inside, d_poly, -d_poly)
    near = d_poly <= 2.0 * sag + 10.0 * GEOMETRY_TOL
    for k in np.flatnonzero(near):
        c = 0 if shared else k
        i = idx[k]
        lo = W[c, max(i - 1, 0)]
        hi = W[c, min(i + 2, n - 1)]
        margin[k], _ = _refine(px[k], py[k], T[c], gamma[c], lo, hi, Om[c])
    return margin


def signed_margins(px, py, T, gamma, n: int = BASE_SAMPLES) -> np.ndarray:
    """Vectorised signed distance to the boundary of the driftless reachable set.

    Positive inside, negative outside; broadcasting over all four arguments.
    Near the boundary the distance is exact (to the analytic curve); further
    away it is the distance to the sampled polygon, off by at most the
    sampling sag, which never affects the sign.
    Points on the unit circle use the exact angular rule, so their margin is an
    arc length. ``+inf`` is returned once ``gamma*T >= pi``.
    """
    px, py, T, gamma = np.broadcast_arrays(
        *(np.asarray(v, dtype=float) for v in (px, py, T, gamma))
    )
    shape = px.shape
    px, py, T, gamma = (v.ravel() for v in (px, py, T, gamma))
    if np.any(~(gamma > 0)):
        raise InvalidInput("gamma must be positive")
    r = np.hypot(px, py)
    if np.any(~(r <= 1.0 + GEOMETRY_TOL)):
        raise InvalidInput("point outside the closed unit disk")
    out = np.empty(px.size)
    full = gamma * T >= math.pi
    zero = (T <= 0) & ~full
    circle = (r >= 1.0 - GEOMETRY_TOL) & ~full & ~zero
    general = ~(full | zero | circle)
    out[full] = np.inf
    out[zero] = -np.hypot(px[zero] - 1.0, py[zero])
    if circle.any():
        out[circle] = endpoint_angle(T[circle], gamma[circle]) - np.abs(
            np.arctan2(py[circle], px[circle])
        )
    if general.any():
        out[general] = _margin_general(px[general], py[general], T[general], gamma[general], n)
    return out.reshape(shape)


def signed_margin(P, T: float, gamma: float) -> float:
    z = as_complex(P)
    return float(signed_margins(z.real, z.imag, T, gamma)[()])


def contains(P, T: float, gamma: float) -> bool:
    """Whether disk point ``P`` lies in the closed driftless reachable set at time ``T``.

    Points within GEOMETRY_TOL of the boundary count as contained.
    """
    _check_gamma(gamma)
    return signed_margin(P, T, gamma) >= -GEOMETRY_TOL


def contains_many(points, T: float, gamma: float) -> np.ndarray:
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    return signed_margins(pts[:, 0], pts[:, 1], T, gamma) >= -GEOMETRY_TOL


def rotate_back(P, T: float) -> complex:
    """``e^{-iT} P``: the drift target seen from the interaction picture."""
    return as_complex(P) * complex(math.cos(T), -math.sin(T))


def contains_drift(P_f, T: float, gamma: float) -> bool:
    """Reachability of disk point ``P_f`` at t-time ``T`` for the drift system."""
    return contains(rotate_back(P_f, T), T, gamma)


def drift_margin(P_f, T, gamma) -> np.ndarray:
    """Signed margin of ``e^{-iT} P_f``; vectorised over ``T``."""
    T = np.asarray(T, dtype=float)
    z = as_complex(P_f) * np.exp(-1j * T)
    return signed_margins(z.real, z.imag, T, gamma)


def locate_on_frontline(Q, T: float, gamma: float, n: int = 4096) -> tuple[float, float]:
    """Frequency of the frontline point nearest to ``Q``, and the distance to it.

    The full parameter range is scanned before polishing; among equally close
    samples the one with smallest ``|omega|`` wins.
    """
    z = as_complex(Q)
    Om = omega_max(T, gamma)
    if gamma * T >= math.pi or Om == 0.0:
        return 0.0, abs(z + 1.0)
    w = np.linspace(-Om, Om, n)
    x, y = free_xy(T, w, gamma)
    d = np.hypot(x - z.real, y - z.imag)
    best = d.min()
    cand = np.flatnonzero(d <= best + 1e-14)
    i = int(cand[np.argmin(np.abs(w[cand]))])
    lo, hi = w[max(i - 1, 0)], w[min(i + 1, n - 1)]
    _, w_star = _refine(z.real, z.imag, T, gamma, lo, hi, Om)
    px, py = _free_point(w_star, T, gamma)
    return w_star, math.hypot(px - z.real, py - z.imag)


class CriticalTrajectory(NamedTuple):
    gamma: float
    omega_c: float
    T_c: float
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray

    def cusp_speed(self) -> float:
        return float(abs(drift_disk_velocity(self.T_c, self.omega_c, self.gamma)))


def critical_time(gamma: float) -> float:
    return math.pi / (2.0 * gamma * math.sqrt(1.0 + gamma**2))


def critical_trajectory(gamma: float, n: int = 1000) -> CriticalTrajectory:
    """Drift trajectory at the critical frequency ``1 + gamma^2``, up to its cusp."""
    _check_gamma(gamma)
    wc = 1.0 + gamma**2
    Tc = critical_time(gamma)
    t = np.linspace(0.0, Tc, n)
    x, y = drift_disk_traj(t, wc, gamma)
    return CriticalTrajectory(gamma, wc, Tc, t, x, y)


class Separatrix(NamedTuple):
    center: DiskPoint
    radius: float
    omega_star: float


def separatrix(gamma: float) -> Separatrix:
    _check_gamma(gamma)
    g2 = gamma**2
    return Separatrix(DiskPoint(g2 / (1 + g2), 0.0), 1.0 / (1 + g2), (1 + g2) / 2)


def jacobian_det(t, omega, gamma):
    """Determinant of d(x, y)/d(t, omega) for the drift trajectories."""
    a = np.hypot(gamma, 1.0 - np.asarray(omega, dtype=float))
    at = a * t
    return gamma**2 * (gamma**2 + 1.0 - omega) / a**4 * np.sin(at) * (np.sin(at) - at * np.cos(at))


def distance_to_critical(P, gamma: float, n: int = 2000) -> tuple[float, float]:
    """Distance from ``P`` to the critical trajectory and the fraction ``t/T_c`` of the nearest point."""
    z = as_complex(P)
    ct = critical_trajectory(gamma, n)
    d = np.hypot(ct.x - z.real, ct.y - z.imag)
    i = int(d.argmin())
    lo, hi = ct.t[max(i - 1, 0)], ct.t[min(i + 1, n - 1)]

    def f(t):
        p = drift_disk_traj(t, ct.omega_c, gamma)
        return (p.x - z.real) ** 2 + (p.y - z.imag) ** 2

    def g(t):
        p = drift_disk_traj(t, ct.omega_c, gamma)
        v = complex(drift_disk_velocity(t, ct.omega_c, gamma))
        return (p.x - z.real) * v.real + (p.y - z.imag) * v.imag

    t = _nearest_parameter(f, g, lo, hi, 1e-14)
    return math.sqrt(f(t)), t / ct.T_c


def critical_gammas(P, gamma_lo: float, gamma_hi: float, n: int = 400) -> list[float]:
    """Bounds ``gamma`` in [lo, hi] whose critical trajectory passes through ``P``.

    Coarse distance minima on a gamma grid are polished by solving
    ``crit(gamma, s*T_c(gamma)) = P`` for (gamma, s).
    """
    z = as_complex(P)
    grid = np.linspace(gamma_lo, gamma_hi, n)
    dist = np.array([distance_to_critical(z, g, 600)[0] for g in grid])
    step = grid[1] - grid[0] if n > 1 else 1.0
    found: list[float] = []
    for i in range(n):
        left = dist[i - 1] if i > 0 else np.inf
        right = dist[i + 1] if i < n - 1 else np.inf
        if not (dist[i] <= left and dist[i] <= right) or dist[i] > 0.05:
            continue
        _, s0 = distance_to_critical(z, grid[i])

        def F(v):
            g, s = v
            p = drift_disk_traj(s * critical_time(g), 1.0 + g * g, g)
            return [p.x - z.real, p.y - z.imag]

        sol = root(F, [grid[i], s0], method="hybr", options={"xtol": 1e-14})
        g, s = sol.x
        if (
            np.max(np.abs(F(sol.x))) < 1e-10
            and gamma_lo - step <= g <= gamma_hi + step
            and 0.0 <= s <= 1.0
            and all(abs(g - f) > 1e-8 for f in found)
        ):
            found.append(float(g))
    return sorted(found)
