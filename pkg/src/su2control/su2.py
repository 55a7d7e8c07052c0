"""SU(2) arithmetic in the (alpha, beta) parametrisation.

An element of SU(2) is stored through its first row::

    X = [[ alpha,        beta       ],
         [-conj(beta),   conj(alpha)]],   |alpha|^2 + |beta|^2 = 1

The Lie algebra basis used throughout the package is

    sx = (1/2) [[0, i], [i, 0]]
    sy = (1/2) [[0, -1], [1, 0]]
    sz = (1/2) [[i, 0], [0, -i]]

so that ``sx**2 == sy**2 == sz**2 == -I/4``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput

UNITARITY_TOL = 1e-12
GEOMETRY_TOL = 1e-9

SIGMA_X = 0.5 * np.array([[0, 1j], [1j, 0]])
SIGMA_Y = 0.5 * np.array([[0, -1], [1, 0]], dtype=complex)
SIGMA_Z = 0.5 * np.array([[1j, 0], [0, -1j]])


@dataclass(frozen=True)
class SU2Element:
    alpha: complex
    beta: complex

    def __post_init__(self):
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if not math.isfinite(norm) or abs(norm - 1.0) > UNITARITY_TOL:
            raise InvalidInput(f"|alpha|^2 + |beta|^2 = {norm!r}, expected 1")

    @classmethod
    def normalized(cls, alpha: complex, beta: complex) -> "SU2Element":
        """Build an element after rescaling (alpha, beta) to unit norm."""
        alpha, beta = complex(alpha), complex(beta)
        norm = math.hypot(abs(alpha), abs(beta))
        if not math.isfinite(norm) or norm == 0.0:
            raise InvalidInput("cannot normalise a zero or non-finite pair")
        return cls(alpha / norm, beta / norm)

    @classmethod
    def from_matrix(cls, m) -> "SU2Element":
        m = np.asarray(m, dtype=complex)
        if m.shape != (2, 2):
            raise InvalidInput(f"expected a 2x2 matrix, got shape {m.shape}")
        if abs(m[1, 0] + np.conj(m[0, 1])) > 1e-9 or abs(m[1, 1] - np.conj(m[0, 0])) > 1e-9:
            raise InvalidInput("matrix is not of the SU(2) form [[a, b], [-b*, a*]]")
        return cls.normalized(m[0, 0], m[0, 1])

    def matrix(self) -> np.ndarray:
        a, b = self.alpha, self.beta
        return np.array([[a, b], [-b.conjugate(), a.conjugate()]])

    def dagger(self) -> "SU2Element":
        return SU2Element(self.alpha.conjugate(), -self.beta)

    def __matmul__(self, other: "SU2Element") -> "SU2Element":
        return compose(self, other)


@dataclass(frozen=True)
class LieCoeffs:
    """Coefficients of ``cx*sx + cy*sy + cz*sz``."""

    cx: float
    cy: float
    cz: float

    def __neg__(self) -> "LieCoeffs":
        return LieCoeffs(-self.cx, -self.cy, -self.cz)

    def matrix(self) -> np.ndarray:
        return self.cx * SIGMA_X + self.cy * SIGMA_Y + self.cz * SIGMA_Z


@dataclass(frozen=True)
class DiskPoint:
    """The (1,1) entry of an SU(2) element, seen as a point of the closed unit disk."""

    x: float
    y: float

    def __post_init__(self):
        r2 = self.x * self.x + self.y * self.y
        if not math.isfinite(r2) or r2 > 1.0 + UNITARITY_TOL:
            raise InvalidInput(f"({self.x}, {self.y}) lies outside the unit disk")

    @property
    def complex(self) -> complex:
        return complex(self.x, self.y)

    @property
    def radius(self) -> float:
        return math.hypot(self.x, self.y)


IDENTITY = SU2Element(1.0 + 0j, 0j)


def identity() -> SU2Element:
    return IDENTITY


def swap_like(phase: float = 0.0) -> SU2Element:
    """SWAP-like element: zero diagonal, off-diagonal entry ``e^{i phase}``."""
    return SU2Element(0j, cmath.exp(1j * phase))


def phase_element(psi: float) -> SU2Element:
    """``diag(e^{i psi}, e^{-i psi})``, whose disk point is on the unit circle."""
    return SU2Element(cmath.exp(1j * psi), 0j)


def compose(A: SU2Element, B: SU2Element) -> SU2Element:
    """Matrix product ``A @ B``, renormalised onto SU(2)."""
    a1, b1, a2, b2 = A.alpha, A.beta, B.alpha, B.beta
    alpha = a1 * a2 - b1 * b2.conjugate()
    beta = a1 * b2 + b1 * a2.conjugate()
    return SU2Element.normalized(alpha, beta)


def inverse(A: SU2Element) -> SU2Element:
    return A.dagger()


def exp_lie(v: LieCoeffs) -> SU2Element:
    """Exponential of ``cx*sx + cy*sy + cz*sz``.

    The element equals ``(i/2) n.sigma`` with ``n = (cx, -cy, cz)``, hence
    ``exp = cos(|n|/2) I + i sin(|n|/2) n_hat.sigma``.
    """
    cx, cy, cz = float(v.cx), float(v.cy), float(v.cz)
    norm = math.sqrt(cx * cx + cy * cy + cz * cz)
    half = 0.5 * norm
    # sin(|n|/2) / |n|, finite at the origin
    s = 0.5 * float(np.sinc(half / math.pi))
    alpha = complex(math.cos(half), s * cz)
    beta = complex(-s * cy, s * cx)
    return SU2Element.normalized(alpha, beta)


def trace_inner(A: SU2Element, B: SU2Element) -> complex:
    """``Tr(A B^dagger)``."""
    return complex(np.trace(A.matrix() @ B.matrix().conj().T))


def distance(A: SU2Element, B: SU2Element) -> float:
    """Norm of ``A - B`` induced by the trace inner product.

    For SU(2) this is ``sqrt(2 (|da|^2 + |db|^2))``.
    """
    da = A.alpha - B.alpha
    db = A.beta - B.beta
    return math.sqrt(2.0 * (abs(da) ** 2 + abs(db) ** 2))


def disk_point(X: SU2Element) -> DiskPoint:
    return DiskPoint(X.alpha.real, X.alpha.imag)


def as_complex(P) -> complex:
    """Accept a DiskPoint, an SU2Element, a complex number or an (x, y) pair."""
    if isinstance(P, DiskPoint):
        return P.complex
    if isinstance(P, SU2Element):
        return P.alpha
    if isinstance(P, complex):
        return P
    if isinstance(P, (int, float)):
        return complex(P)
    x, y = P
    return complex(float(x), float(y))
