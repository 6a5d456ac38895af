"""Conductivity tensors, the symmetrized 6x6 block tensor and PSD orderings.

Conductivities are plain ``(3, 3)`` float arrays, block tensors ``(6, 6)``.
The magnetic field is along the third axis, so a transversely isotropic
conductivity has the form ``[[a, -c, 0], [c, a, 0], [0, 0, b]]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .exceptions import HallBoundsError, InvalidConductivityError

__all__ = [
    "J",
    "TIConductivity",
    "PhaseDistribution",
    "ti_to_matrix",
    "matrix_to_ti",
    "sym_antisym_split",
    "build_block_L",
    "block_L_to_conductivity",
    "average_block_L",
    "psd_margin",
    "psd_order_check",
    "delta12",
]

#: Generator of in-plane rotations; the antisymmetric part of a transversely
#: isotropic conductivity is ``c * J``.
J = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
J.setflags(write=False)

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class TIConductivity:
    """Transversely isotropic conductivity with in-plane coefficient ``a``,
    axial coefficient ``b`` and Hall coefficient ``c``."""

    a: float
    b: float
    c: float = 0.0

    def __post_init__(self):
        for name in ("a", "b", "c"):
            value = float(getattr(self, name))
            if not np.isfinite(value):
                raise InvalidConductivityError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if self.a <= 0 or self.b <= 0:
            raise InvalidConductivityError(
                f"not a valid conductivity: a={self.a}, b={self.b} must be positive"
            )

    def matrix(self) -> np.ndarray:
        return ti_to_matrix(self)

    def shifted(self, c0: float) -> "TIConductivity":
        """Same phase with ``c0 * J`` added."""
        return TIConductivity(self.a, self.b, self.c + c0)


class PhaseDistribution:
    """Volume fractions paired with transversely isotropic phases.

    Averages ``<.>`` over the unit cell reduce to fraction-weighted sums.
    """

    def __init__(self, entries: Iterable[tuple[float, TIConductivity]]):
        entries = [(float(w), p) for w, p in entries]
        if not entries:
            raise HallBoundsError("a phase distribution needs at least one phase")
        weights = np.array([w for w, _ in entries])
        if np.any(weights < 0) or not np.all(np.isfinite(weights)):
            raise HallBoundsError(f"volume fractions must be non-negative, got {weights}")
        if abs(weights.sum() - 1.0) > 1e-12:
            raise HallBoundsError(f"volume fractions sum to {weights.sum()!r}, expected 1")
        for _, p in entries:
            if not isinstance(p, TIConductivity):
                raise TypeError(f"expected TIConductivity, got {type(p).__name__}")
        self.entries = tuple(entries)
        self.fractions = weights
        self.a = np.array([p.a for _, p in entries])
        self.b = np.array([p.b for _, p in entries])
        self.c = np.array([p.c for _, p in entries])

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]]) -> "PhaseDistribution":
        """Build from rows ``(f, a, b, c)``."""
        return cls((f, TIConductivity(a, b, c)) for f, a, b, c in rows)

    def mean(self, values) -> float:
        return float(np.dot(self.fractions, values))

    def phases(self) -> list[TIConductivity]:
        return [p for _, p in self.entries]

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __repr__(self):
        body = ", ".join(f"({w:g}, {p})" for w, p in self.entries)
        return f"PhaseDistribution([{body}])"


def ti_to_matrix(p: TIConductivity) -> np.ndarray:
    return np.array([[p.a, -p.c, 0.0], [p.c, p.a, 0.0], [0.0, 0.0, p.b]])


def matrix_to_ti(m, tol: float = 1e-12) -> TIConductivity:
    """Inverse of :func:`ti_to_matrix`; rejects matrices off the pattern."""
    m = _as_matrix(m, 3)
    a = 0.5 * (m[0, 0] + m[1, 1])
    c = 0.5 * (m[1, 0] - m[0, 1])
    p = TIConductivity(a, m[2, 2], c)
    if np.abs(m - ti_to_matrix(p)).max() > tol * max(1.0, np.abs(m).max()):
        raise HallBoundsError("matrix is not transversely isotropic about the third axis")
    return p


def sym_antisym_split(m) -> tuple[np.ndarray, np.ndarray]:
    m = _as_matrix(m)
    return 0.5 * (m + m.T), 0.5 * (m - m.T)


def build_block_L(s) -> np.ndarray:
    """Symmetric 6x6 tensor mapping ``(j_S, e_A)`` to ``(e_S, j_A)``.

    Its quadratic form is the energy minimized by the variational principle
    for a non-symmetric conductivity ``s``.
    """
    s = _as_matrix(s, 3)
    sym, anti = sym_antisym_split(s)
    _require_pd(sym)
    sym_inv = np.linalg.inv(sym)
    upper_right = -sym_inv @ anti
    lower_left = anti @ sym_inv
    lower_right = sym - anti @ sym_inv @ anti
    L = np.block([[sym_inv, upper_right], [lower_left, lower_right]])
    return 0.5 * (L + L.T)


def block_L_to_conductivity(L) -> np.ndarray:
    """Recover ``s`` from ``build_block_L(s)``."""
    L = _as_matrix(L, 6)
    sym = np.linalg.inv(L[:3, :3])
    anti = -sym @ L[:3, 3:]
    return sym + anti


def average_block_L(d) -> np.ndarray:
    """Fraction-weighted average of the block tensors of the phases of ``d``."""
    return sum(w * build_block_L(p.matrix()) for w, p in d)


def psd_margin(m1, m2, tol: float = DEFAULT_TOL) -> float:
    """Smallest eigenvalue of ``m2 - m1``; non-negative when ``m1 <= m2``."""
    diff = _symmetrized(m2, tol) - _symmetrized(m1, tol)
    return float(np.linalg.eigvalsh(diff)[0])


def psd_order_check(m1, m2, tol: float = DEFAULT_TOL) -> bool:
    """``True`` iff ``m1 <= m2`` in the positive semidefinite order, up to ``tol``."""
    return psd_margin(m1, m2, tol) >= -tol


def delta12(m) -> float:
    """Upper-left 2x2 minor ``m11 m22 - m12 m21``."""
    m = np.asarray(m, dtype=float)
    return float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])


def _as_matrix(m, n=None) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or (n is not None and m.shape[0] != n):
        want = f"({n}, {n})" if n else "square"
        raise HallBoundsError(f"expected a {want} matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise HallBoundsError("matrix has non-finite entries")
    return m


def _symmetrized(m, tol) -> np.ndarray:
    m = _as_matrix(m)
    if np.abs(m - m.T).max() > tol:
        raise HallBoundsError(
            f"matrix is not symmetric within tol={tol:g} "
            f"(max asymmetry {np.abs(m - m.T).max():.3e})"
        )
    return 0.5 * (m + m.T)


def _require_pd(sym):
    if np.linalg.eigvalsh(sym)[0] <= 0:
        raise InvalidConductivityError(
            "not a valid conductivity: symmetric part is not positive definite"
        )
