"""Exact effective tensors of rank-one and two-scale rank-two laminates.

Fields in a laminate are piecewise constant.  Each field gradient ``E`` has
entries ``E[i, j] = d_i u_j`` and the effective tensor is
``sum_k f_k E_k^T sigma_k E_k``.  Across an interface with normal ``xi`` the
gradient jumps by a rank-one matrix ``xi (x) eta`` and the normal flux
``(sigma E)^T xi`` is continuous.  Both laminates are solved by assembling
the flux-jump equations as a small linear system in the jump amplitudes.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .exceptions import DegenerateLaminationError, HallBoundsError
from .tensor_core import J, _as_matrix, _require_pd, delta12, sym_antisym_split

__all__ = [
    "CounterexampleVariant",
    "LaminateSpec",
    "LaminateFields",
    "SweepResult",
    "rank_one_effective",
    "rank_one_fields",
    "rank_two_effective",
    "effective_from_fields",
    "counterexample_spec",
    "counterexample_sweep",
    "partial_isotropy_residual",
    "richardson_limit",
    "convergence_order",
]

DIRECTION_TOL = 1e-14
FIELD_AVERAGE_TOL = 1e-10


class CounterexampleVariant(enum.Enum):
    PLUS_J = "PlusJ"
    HALL_BLOCK = "HallBlock"

    def third_phase(self) -> np.ndarray:
        if self is CounterexampleVariant.PLUS_J:
            return 2.0 * np.eye(3) + J
        return np.array([[2.0, -1.0, 0.0], [1.0, 2.0, 0.0], [0.0, 0.0, 0.5]])

    def predicted_limit(self, kappa: float) -> float:
        """Limit of the effective Hall coefficient as ``theta -> 0``."""
        return -kappa / 17.0 if self is CounterexampleVariant.PLUS_J else kappa / 13.0


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(3)
    norm = np.linalg.norm(v)
    if not np.isfinite(norm) or norm == 0:
        raise HallBoundsError(f"lamination direction must be a non-zero vector, got {v}")
    return v / norm


def _check_fraction(f, name):
    f = float(f)
    if not 0.0 < f < 1.0:
        raise HallBoundsError(f"{name} must lie in (0, 1), got {f}")
    return f


@dataclass(frozen=True)
class LaminateSpec:
    """Phase 1 in slabs of fraction ``outer_fraction`` normal to ``outer_direction``,
    alternating with a finer laminate of phases 2 and 3 normal to
    ``inner_direction`` in which phase 2 has fraction ``inner_fraction``."""

    outer_direction: np.ndarray
    outer_fraction: float
    inner_direction: np.ndarray
    inner_fraction: float
    phases: tuple

    def __post_init__(self):
        object.__setattr__(self, "outer_direction", _unit(self.outer_direction))
        object.__setattr__(self, "inner_direction", _unit(self.inner_direction))
        object.__setattr__(self, "outer_fraction", _check_fraction(self.outer_fraction, "outer_fraction"))
        object.__setattr__(self, "inner_fraction", _check_fraction(self.inner_fraction, "inner_fraction"))
        if len(self.phases) != 3:
            raise HallBoundsError(f"a rank-two laminate has three phases, got {len(self.phases)}")
        phases = tuple(_as_matrix(p, 3).copy() for p in self.phases)
        for p in phases:
            _require_pd(sym_antisym_split(p)[0])
            p.setflags(write=False)
        object.__setattr__(self, "phases", phases)

    @property
    def fractions(self) -> tuple[float, float, float]:
        """Volume fractions of the three phases in the whole cell."""
        f, g = self.outer_fraction, self.inner_fraction
        return f, (1 - f) * g, (1 - f) * (1 - g)


@dataclass(frozen=True)
class LaminateFields:
    """Constant field gradients in the three regions and the jump amplitudes."""

    E1: np.ndarray
    E2: np.ndarray
    E3: np.ndarray
    eta1: np.ndarray
    eta2: np.ndarray
    condition: float = 1.0

    @property
    def gradients(self):
        return self.E1, self.E2, self.E3


def _solve_jumps(residual: Callable[[np.ndarray], np.ndarray], n: int) -> tuple[np.ndarray, float]:
    """Zero of an affine map ``R^n -> R^n`` given as a callable."""
    b = residual(np.zeros(n))
    A = np.column_stack([residual(e) - b for e in np.eye(n)])
    # Row equilibration: flux rows of a high-contrast phase dominate otherwise.
    scale = np.abs(A).max(axis=1)
    if np.any(scale == 0) or not np.all(np.isfinite(A)):
        raise DegenerateLaminationError("degenerate lamination: empty interface equation", np.inf)
    A, b = A / scale[:, None], b / scale
    cond = float(np.linalg.cond(A))
    if not np.isfinite(cond) or cond > 1e14:
        raise DegenerateLaminationError(
            f"degenerate lamination: interface system is singular (condition {cond:.3e})", cond
        )
    x = np.linalg.solve(A, -b)
    x -= np.linalg.solve(A, A @ x + b)  # one step of iterative refinement
    return x, cond


def rank_one_fields(sA, sB, f: float, xi) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Field gradients ``(E_A, E_B)`` and jump amplitude ``eta`` of a simple laminate."""
    sA, sB = _as_matrix(sA, 3), _as_matrix(sB, 3)
    for s in (sA, sB):
        _require_pd(sym_antisym_split(s)[0])
    f = _check_fraction(f, "f")
    xi = _unit(xi)

    def fields(eta):
        jump = np.outer(xi, eta)
        return np.eye(3) + (1 - f) * jump, np.eye(3) - f * jump

    def flux_jump(eta):
        EA, EB = fields(eta)
        return (sA @ EA - sB @ EB).T @ xi

    eta, _ = _solve_jumps(flux_jump, 3)
    EA, EB = fields(eta)
    return EA, EB, eta


def rank_one_effective(sA, sB, f: float, xi) -> np.ndarray:
    """Effective tensor of phase ``sA`` (fraction ``f``) laminated with ``sB``
    in layers normal to ``xi``."""
    EA, EB, _ = rank_one_fields(sA, sB, f, xi)
    return f * EA.T @ sA @ EA + (1 - f) * EB.T @ sB @ EB


def rank_two_effective(spec: LaminateSpec) -> tuple[np.ndarray, LaminateFields]:
    """Effective tensor and fields of a two-scale rank-two laminate.

    The unknowns are reduced to the two jump amplitudes: with
    ``M = I - f xi1 (x) eta1`` the gradients are ``E1 = M + xi1 (x) eta1``,
    ``E2 = M + (1 - g) xi2 (x) eta2`` and ``E3 = M - g xi2 (x) eta2``, which
    satisfy the average and curl-jump conditions identically.
    """
    s1, s2, s3 = spec.phases
    xi1, xi2 = spec.outer_direction, spec.inner_direction
    f, g = spec.outer_fraction, spec.inner_fraction

    def fields(x):
        eta1, eta2 = x[:3], x[3:]
        M = np.eye(3) - f * np.outer(xi1, eta1)
        return (
            M + np.outer(xi1, eta1),
            M + (1 - g) * np.outer(xi2, eta2),
            M - g * np.outer(xi2, eta2),
        )

    def flux_jumps(x):
        E1, E2, E3 = fields(x)
        inner = (s2 @ E2 - s3 @ E3).T @ xi2
        outer = (s1 @ E1 - (g * s2 @ E2 + (1 - g) * s3 @ E3)).T @ xi1
        return np.concatenate([inner, outer])

    x, cond = _solve_jumps(flux_jumps, 6)
    E1, E2, E3 = fields(x)
    out = LaminateFields(E1, E2, E3, x[:3].copy(), x[3:].copy(), cond)
    return effective_from_fields(spec.fractions, spec.phases, out), out


def effective_from_fields(fractions: Sequence[float], phases, fields) -> np.ndarray:
    """``sum_k f_k E_k^T sigma_k E_k`` for piecewise-constant field gradients."""
    gradients = fields.gradients if isinstance(fields, LaminateFields) else tuple(fields)
    fractions = np.asarray(fractions, dtype=float)
    if not (len(fractions) == len(phases) == len(gradients)):
        raise HallBoundsError("fractions, phases and fields must have equal length")
    gradients = [np.asarray(E, dtype=float) for E in gradients]
    mean = sum(w * E for w, E in zip(fractions, gradients))
    if np.abs(mean - np.eye(3)).max() > FIELD_AVERAGE_TOL:
        raise HallBoundsError(
            "fields are inconsistent with the fractions: average gradient is not the identity "
            f"(deviation {np.abs(mean - np.eye(3)).max():.3e})"
        )
    return sum(w * E.T @ np.asarray(s, dtype=float) @ E for w, s, E in zip(fractions, phases, gradients))


def counterexample_spec(theta: float, kappa: float, variant=CounterexampleVariant.PLUS_J) -> LaminateSpec:
    """High-contrast rank-two laminate whose effective Hall coefficient tends
    to ``-kappa/17`` (PlusJ) or ``kappa/13`` (HallBlock) as ``theta -> 0``."""
    theta, kappa = float(theta), float(kappa)
    if not 0.0 < theta < 1.0:
        raise HallBoundsError(f"theta must lie in (0, 1), got {theta}")
    if not (kappa > 0 and np.isfinite(kappa)):
        raise HallBoundsError(f"kappa must be positive, got {kappa}")
    variant = CounterexampleVariant(variant)
    stiff = np.diag([kappa / theta**2, kappa / theta**2, 1.0])
    return LaminateSpec(
        outer_direction=np.array([0.0, theta, 1.0]),
        outer_fraction=1.0 - theta,
        inner_direction=np.array([0.0, 1.0, 1.0]),
        inner_fraction=0.5,
        phases=(stiff, np.eye(3), variant.third_phase()),
    )


def partial_isotropy_residual(sigma_star) -> float:
    """Largest antisymmetric entry outside the in-plane ``c J`` pattern."""
    anti = sym_antisym_split(sigma_star)[1]
    return float(max(abs(anti[0, 2]), abs(anti[1, 2])))


def richardson_limit(h: Sequence[float], values: Sequence[float], order: float = 1.0) -> float:
    """Two-point Richardson extrapolation to ``h -> 0`` from the two smallest steps."""
    h, values = np.asarray(h, dtype=float), np.asarray(values, dtype=float)
    if len(h) < 2:
        raise HallBoundsError("Richardson extrapolation needs at least two points")
    i, j = np.argsort(h)[:2]
    wi, wj = h[j] ** order, h[i] ** order
    return float((wi * values[i] - wj * values[j]) / (wi - wj))


def convergence_order(h: Sequence[float], values: Sequence[float]) -> float:
    """Observed order ``p`` in ``v(h) = v0 + C h^p`` from the three smallest steps.

    Solves ``(v1 - v2) / (v2 - v3) = (h1^p - h2^p) / (h2^p - h3^p)`` for ``p``;
    the grid need not be geometric.
    """
    h, values = np.asarray(h, dtype=float), np.asarray(values, dtype=float)
    if len(h) < 3:
        raise HallBoundsError("estimating a convergence order needs three points")
    idx = np.argsort(h)[:3][::-1]
    (h1, h2, h3), (v1, v2, v3) = h[idx], values[idx]
    ratio = (v1 - v2) / (v2 - v3)

    def mismatch(p):
        return (h1**p - h2**p) / (h2**p - h3**p) - ratio

    lo, hi = 1e-3, 8.0
    if mismatch(lo) * mismatch(hi) > 0:
        return float("nan")
    return float(brentq(mismatch, lo, hi, xtol=1e-12))


@dataclass(frozen=True)
class SweepResult:
    thetas: np.ndarray
    c_star: np.ndarray
    delta12_E2: np.ndarray
    delta12_E3: np.ndarray
    partial_iso_residuals: np.ndarray
    conditions: np.ndarray
    limit_c: float
    order: float
    predicted_limit: float

    def __iter__(self):
        # unpacks as (limit_c, partial_iso_residuals)
        return iter((self.limit_c, self.partial_iso_residuals))


def counterexample_sweep(kappa: float, variant=CounterexampleVariant.PLUS_J,
                         thetas: Sequence[float] = (1e-2, 3e-3, 1e-3, 3e-4, 1e-4)) -> SweepResult:
    """Effective Hall coefficient ``c*(theta) = (theta/2) Delta_12(E3)`` along a
    decreasing ``theta`` grid, extrapolated to ``theta -> 0``."""
    variant = CounterexampleVariant(variant)
    thetas = np.asarray(thetas, dtype=float)
    if thetas.ndim != 1 or len(thetas) < 2:
        raise HallBoundsError("need at least two theta values")
    if np.any(np.diff(thetas) >= 0):
        raise HallBoundsError("theta grid must be strictly decreasing")
    rows = []
    for theta in thetas:
        spec = counterexample_spec(theta, kappa, variant)
        sigma, fields = rank_two_effective(spec)
        d2, d3 = delta12(fields.E2), delta12(fields.E3)
        rows.append((0.5 * theta * d3, d2, d3, partial_isotropy_residual(sigma), fields.condition))
    c_star, d2, d3, residuals, conds = (np.array(col) for col in zip(*rows))
    order = convergence_order(thetas, c_star) if len(thetas) >= 3 else float("nan")
    return SweepResult(
        thetas=thetas,
        c_star=c_star,
        delta12_E2=d2,
        delta12_E3=d3,
        partial_iso_residuals=residuals,
        conditions=conds,
        limit_c=richardson_limit(thetas, c_star, 1.0),
        order=order,
        predicted_limit=variant.predicted_limit(kappa),
    )
