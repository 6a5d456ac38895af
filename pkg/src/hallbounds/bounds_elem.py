"""Elementary bounds and strong-field bounds on the Hall coefficient.

All checks return a :class:`BoundsVerdict` carrying a signed residual
(``<= 0`` means the bound holds) so that tight cases can be inspected
rather than reduced to a flag.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import HallBoundsError
from .tensor_core import DEFAULT_TOL, PhaseDistribution, _require_pd, sym_antisym_split

__all__ = [
    "BoundsVerdict",
    "CircleParams",
    "b_interval",
    "b_interval_check",
    "circle_params",
    "circle_check",
    "superfluous_cstar_bound",
    "superfluous_check",
    "partial_iso_cstar_bound",
    "partial_iso_check",
    "optimal_shift_bound",
    "optimal_shift_check",
    "elementary_verdicts",
]


@dataclass(frozen=True)
class BoundsVerdict:
    name: str
    satisfied: bool
    residual: float
    inputs_echo: dict = field(default_factory=dict)

    @classmethod
    def from_residual(cls, name, residual, tol=DEFAULT_TOL, **inputs):
        residual = float(residual)
        return cls(name, bool(residual <= tol), residual, inputs)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "satisfied": self.satisfied,
            "residual": self.residual,
            "inputs": dict(self.inputs_echo),
        }


@dataclass(frozen=True)
class CircleParams:
    a_L: float
    c_L: float
    d_L: float

    def __post_init__(self):
        if not self.a_L > 0:
            raise HallBoundsError(f"a_L must be positive, got {self.a_L}")
        # d_L - a_L = <((a - a_L)^2 + (c - c_L)^2) / a> >= 0
        if self.d_L < self.a_L * (1 - 1e-12):
            raise HallBoundsError(f"d_L={self.d_L} < a_L={self.a_L}")

    @property
    def center(self) -> tuple[float, float]:
        return 0.5 * (self.a_L + self.d_L), self.c_L

    @property
    def radius(self) -> float:
        return 0.5 * (self.d_L - self.a_L)


def b_interval(d: PhaseDistribution) -> tuple[float, float]:
    """Harmonic and arithmetic means of the axial coefficient."""
    lower = 1.0 / d.mean(1.0 / d.b)
    upper = d.mean(d.b)
    return min(lower, upper), upper


def b_interval_check(bstar: float, d: PhaseDistribution, tol: float = DEFAULT_TOL) -> BoundsVerdict:
    lower, upper = b_interval(d)
    residual = max(lower - bstar, bstar - upper)
    return BoundsVerdict.from_residual("b_interval", residual, tol, b_star=bstar, lower=lower, upper=upper)


def circle_params(d: PhaseDistribution) -> CircleParams:
    a_L = 1.0 / d.mean(1.0 / d.a)
    c_L = d.mean(d.c / d.a) * a_L
    # <a + c^2/a> - c_L^2/a_L rewritten as a sum of squares, free of cancellation
    d_L = a_L + d.mean(((d.a - a_L) ** 2 + (d.c - c_L) ** 2) / d.a)
    return CircleParams(a_L, c_L, d_L)


def circle_check(astar: float, cstar: float, p: CircleParams, tol: float = DEFAULT_TOL) -> BoundsVerdict:
    """``(c* - c_L)^2 <= (a* - a_L)(d_L - a*)``: the pair ``(a*, c*)`` lies in
    the disk with diameter ``[a_L, d_L]`` on the line ``c = c_L``."""
    if not astar > 0:
        raise HallBoundsError(f"a* must be positive, got {astar}")
    residual = (cstar - p.c_L) ** 2 - (astar - p.a_L) * (p.d_L - astar)
    return BoundsVerdict.from_residual(
        "circle", residual, tol, a_star=astar, c_star=cstar, a_L=p.a_L, c_L=p.c_L, d_L=p.d_L
    )


def superfluous_cstar_bound(d: PhaseDistribution) -> tuple[float, float]:
    """``<a + c^2/a>`` bounding ``2|c*|``, and the coarser cap from the extreme
    values ``max a + max c^2 / min a``."""
    value = d.mean(d.a + d.c**2 / d.a)
    cap = d.a.max() + np.abs(d.c).max() ** 2 / d.a.min()
    return value, float(cap)


def superfluous_check(astar: float, cstar: float, d: PhaseDistribution,
                      tol: float = DEFAULT_TOL) -> BoundsVerdict:
    """``2|c*| <= a* + c*^2/a* <= <a + c^2/a>``; the residual is for the second
    inequality, the first holds for every ``a* > 0``."""
    value, cap = superfluous_cstar_bound(d)
    middle = astar + cstar**2 / astar
    return BoundsVerdict.from_residual(
        "superfluous", middle - value, tol, a_star=astar, c_star=cstar, bound=value, cap=cap
    )


def partial_iso_cstar_bound(sigma_star, a_lower: float, c_upper: float) -> float:
    """Upper bound on ``|c*|`` for a partially isotropic effective tensor.

    The caller is responsible for partial isotropy; see
    :func:`hallbounds.laminate.partial_isotropy_residual`.
    """
    sigma_star = np.asarray(sigma_star, dtype=float)
    _require_pd(sym_antisym_split(sigma_star)[0])
    if not a_lower > 0:
        raise HallBoundsError(f"a_lower must be positive, got {a_lower}")
    if c_upper < 0:
        raise HallBoundsError(f"c_upper must be non-negative, got {c_upper}")
    return float(c_upper / a_lower * np.sqrt(sigma_star[0, 0]) * np.sqrt(sigma_star[1, 1]))


def partial_iso_check(sigma_star, cstar: float, a_lower: float, c_upper: float,
                      tol: float = DEFAULT_TOL) -> BoundsVerdict:
    bound = partial_iso_cstar_bound(sigma_star, a_lower, c_upper)
    return BoundsVerdict.from_residual(
        "partial_isotropy", abs(cstar) - bound, tol,
        c_star=cstar, bound=bound, a_lower=a_lower, c_upper=c_upper,
    )


def optimal_shift_bound(sigma_star_a: float, a_lower: float, c_plus: float,
                        c_minus: float) -> tuple[float, float]:
    """Interval ``center +- halfwidth`` for ``c*`` from ``|2c* - c+ - c-| <= (a*/a_lower)(c+ - c-)``."""
    if not a_lower > 0:
        raise HallBoundsError(f"a_lower must be positive, got {a_lower}")
    if c_plus < c_minus:
        raise HallBoundsError(f"c_plus={c_plus} < c_minus={c_minus}")
    return 0.5 * (c_plus + c_minus), 0.5 * sigma_star_a / a_lower * (c_plus - c_minus)


def optimal_shift_check(astar: float, cstar: float, a_lower: float, c_plus: float, c_minus: float,
                        tol: float = DEFAULT_TOL) -> BoundsVerdict:
    center, halfwidth = optimal_shift_bound(astar, a_lower, c_plus, c_minus)
    return BoundsVerdict.from_residual(
        "optimal_shift", abs(cstar - center) - halfwidth, tol,
        c_star=cstar, center=center, halfwidth=halfwidth,
    )


def elementary_verdicts(d: PhaseDistribution, astar: float, bstar: float, cstar: float,
                        tol: float = DEFAULT_TOL) -> list[BoundsVerdict]:
    """Every bound on a transversely isotropic candidate ``(a*, b*, c*)``."""
    a_lower, c_upper = float(d.a.min()), float(np.abs(d.c).max())
    sigma_star = np.array([[astar, -cstar, 0.0], [cstar, astar, 0.0], [0.0, 0.0, bstar]])
    return [
        b_interval_check(bstar, d, tol),
        circle_check(astar, cstar, circle_params(d), tol),
        superfluous_check(astar, cstar, d, tol),
        partial_iso_check(sigma_star, cstar, a_lower, c_upper, tol),
        optimal_shift_check(astar, cstar, a_lower, float(d.c.max()), float(d.c.min()), tol),
    ]
