"""Hashin-Shtrikman type bounds for two-phase, geometrically isotropic composites.

The bounds are stated on the Y-transform ``(a_Y, c_Y, b_Y)`` of a candidate
transversely isotropic effective tensor.  In the ``(a, c)`` plane each phase
pair defines two circles through ``(a_1, c_1)`` and ``(a_2, c_2)`` tangent to
the axis ``a = 0``, at heights ``alpha_+`` and ``alpha_-``.  The bound says the
point ``(a_Y, -c_Y)`` lies in the larger disks tangent at the same points,
with radii ``1/(2 s_1)`` in place of ``1/(2 t_1)``.

Phases are relabeled so that ``b_1 >= b_2`` before anything is evaluated.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from scipy import integrate

from .bounds_elem import BoundsVerdict
from .exceptions import DegeneratePhasesError, HallBoundsError, YTransformPoleError
from .tensor_core import DEFAULT_TOL, TIConductivity, _as_matrix

__all__ = [
    "g_fun",
    "g_quadrature",
    "AlphaRoots",
    "HSCoefficients",
    "YTensorTI",
    "DiskGeometry",
    "VerticalLine",
    "HSReport",
    "alpha_pm",
    "t1_s1",
    "hs_coefficients",
    "order_phases",
    "y_tensor_matrix",
    "y_tensor_ti",
    "hs_disk_check",
    "phase_circle_residual",
    "b_hs_check",
    "hs_geometry",
    "hs_bounds",
]

# |r - 1| below which g uses its power series; the closed forms lose digits
# to cancellation as r -> 1.
_SERIES_RADIUS = 0.1
_DEGENERATE_RTOL = 1e-12
_POLE_RTOL = 1e-13


def g_fun(r):
    """``g(r) = 1/2 int_0^pi cos^2 t sin t / (cos^2 t + sin^2 t / r) dt``.

    Equivalently ``int_0^1 r x^2 / (1 + (r - 1) x^2) dx``, evaluated in closed
    form: an arctangent for ``r > 1``, an inverse hyperbolic tangent for
    ``r < 1``.  Accepts scalars or arrays; values lie in ``(0, 1)``.
    """
    r_arr = np.asarray(r, dtype=float)
    if np.any(~(r_arr > 0)) or np.any(~np.isfinite(r_arr)):
        raise HallBoundsError(f"g(r) needs finite r > 0, got {r}")
    r1 = np.atleast_1d(r_arr)
    k = r1 - 1.0
    out = np.empty_like(r1)

    near = np.abs(k) < _SERIES_RADIUS
    if np.any(near):
        kk = k[near]
        total = np.zeros_like(kk)
        term = np.ones_like(kk)
        for n in range(40):
            total += term / (2 * n + 3)
            term = term * -kk
        out[near] = r1[near] * total

    above = (k >= _SERIES_RADIUS)
    if np.any(above):
        s = np.sqrt(k[above])
        out[above] = r1[above] / k[above] * (1.0 - np.arctan(s) / s)

    below = (k <= -_SERIES_RADIUS)
    if np.any(below):
        m = -k[below]
        s = np.sqrt(m)
        # 1 - s = r / (1 + s) keeps artanh accurate for small r
        artanh = 0.5 * np.log((1.0 + s) ** 2 / r1[below])
        out[below] = r1[below] / m * (artanh / s - 1.0)

    return float(out[0]) if r_arr.ndim == 0 else out.reshape(r_arr.shape)


def g_quadrature(r: float) -> float:
    """Adaptive quadrature of the defining integral of ``g``; a check on :func:`g_fun`."""
    r = float(r)
    if not r > 0:
        raise HallBoundsError(f"g(r) needs r > 0, got {r}")

    def integrand(x):
        return r * x * x / (1.0 + (r - 1.0) * x * x)

    # the integrand has a boundary layer of width ~min(r, 1/sqrt(r)) at an endpoint
    width = min(r, 1.0 / np.sqrt(r), 0.5)
    breaks = sorted(x for x in {width, 10 * width, 1 - width, 1 - 10 * width} if 0 < x < 1)
    with warnings.catch_warnings():
        # quad reports roundoff once it reaches machine precision; that is the goal here
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, _ = integrate.quad(integrand, 0.0, 1.0, points=breaks or None,
                                  epsabs=1e-15, epsrel=1e-14, limit=500)
    return float(value)


class AlphaRoots(NamedTuple):
    plus: float
    minus: Optional[float]
    degenerate: bool


@dataclass(frozen=True)
class HSCoefficients:
    """Tangency heights ``alpha``, phase-circle parameters ``t1`` and bound
    parameters ``s1`` for both circles.

    When ``a_1 == a_2`` one circle degenerates to the vertical line
    ``a = a_1``; that branch is the minus branch and has ``alpha_minus=None``
    and ``t1_minus = s1_minus = 0``.
    """

    alpha_plus: float
    alpha_minus: Optional[float]
    t1_plus: float
    t1_minus: float
    s1_plus: float
    s1_minus: float
    degenerate_flag: bool = False
    line_a: Optional[float] = None

    def branches(self):
        """``(sign, alpha, t1, s1)`` for each bounded disk."""
        out = [("+", self.alpha_plus, self.t1_plus, self.s1_plus)]
        if not self.degenerate_flag:
            out.append(("-", self.alpha_minus, self.t1_minus, self.s1_minus))
        return out


@dataclass(frozen=True)
class YTensorTI:
    a_Y: float
    c_Y: float
    b_Y: float

    def matrix(self) -> np.ndarray:
        return np.array([[self.a_Y, -self.c_Y, 0.0], [self.c_Y, self.a_Y, 0.0], [0.0, 0.0, self.b_Y]])


@dataclass(frozen=True)
class DiskGeometry:
    """Circle in the ``(a, -c_Y)`` / ``(a, c)`` plot plane, tangent to ``a = 0``."""

    center: tuple[float, float]
    radius: float
    tangent_point: tuple[float, float]


@dataclass(frozen=True)
class VerticalLine:
    """Limit of a circle whose tangency height went to infinity."""

    a: float


def alpha_pm(a1: float, c1: float, a2: float, c2: float) -> AlphaRoots:
    """Heights of the two circles tangent to ``a = 0`` through both phase points.

    Roots of ``(a1 - a2) x^2 - 2 (a1 c2 - a2 c1) x + a1 (a2^2 + c2^2) - a2 (a1^2 + c1^2)``,
    taken in the cancellation-free form.
    """
    if not (a1 > 0 and a2 > 0):
        raise HallBoundsError(f"a1, a2 must be positive, got {a1}, {a2}")
    A = a1 - a2
    B = a1 * c2 - a2 * c1
    C = a1 * (a2**2 + c2**2) - a2 * (a1**2 + c1**2)
    if abs(A) <= _DEGENERATE_RTOL * max(a1, a2):
        if c1 == c2:
            raise DegeneratePhasesError("phases share (a, c): the tangent circles are not unique")
        return AlphaRoots(0.5 * (c1 + c2), None, True)
    root = np.sqrt(a1 * a2 * ((a1 - a2) ** 2 + (c1 - c2) ** 2))
    if B >= 0:
        q = B + root
        plus, minus = q / A, C / q
    else:
        q = B - root
        plus, minus = C / q, q / A
    return AlphaRoots(float(plus), float(minus), False)


def t1_s1(a1: float, c1: float, b1: float, alpha: float) -> tuple[float, float]:
    """Phase-circle parameter ``t1`` and the Hashin-Shtrikman parameter ``s1 < t1``."""
    if not (a1 > 0 and b1 > 0):
        raise HallBoundsError(f"a1, b1 must be positive, got {a1}, {b1}")
    t1 = a1 / (a1**2 + (c1 - alpha) ** 2)
    s1 = 2.0 * t1 / (1.0 + g_fun(b1 * t1)) - t1
    return float(t1), float(s1)


def order_phases(p1: TIConductivity, p2: TIConductivity, f1: float):
    """Relabel so that ``b_1 >= b_2``; returns ``(p1, p2, f1, swapped)``."""
    if p1.b < p2.b:
        return p2, p1, 1.0 - f1, True
    return p1, p2, f1, False


def hs_coefficients(p1: TIConductivity, p2: TIConductivity) -> HSCoefficients:
    """Coefficients for phases already ordered with ``b_1 >= b_2``."""
    if p1.b < p2.b:
        raise HallBoundsError("hs_coefficients expects b1 >= b2; use order_phases first")
    roots = alpha_pm(p1.a, p1.c, p2.a, p2.c)
    tp, sp = t1_s1(p1.a, p1.c, p1.b, roots.plus)
    if roots.degenerate:
        return HSCoefficients(roots.plus, None, tp, 0.0, sp, 0.0, True, line_a=p1.a)
    tm, sm = t1_s1(p1.a, p1.c, p1.b, roots.minus)
    return HSCoefficients(roots.plus, roots.minus, tp, tm, sp, sm, False)


def y_tensor_matrix(s1, s2, f1: float, sstar) -> np.ndarray:
    """``-f2 s1 - f1 s2 + f1 f2 (s1 - s2)(f1 s1 + f2 s2 - s*)^-1 (s1 - s2)``."""
    s1, s2, sstar = (_as_matrix(m, 3) for m in (s1, s2, sstar))
    f1 = _fraction(f1)
    f2 = 1.0 - f1
    jump = s1 - s2
    scale = max(np.abs(s1).max(), np.abs(s2).max(), np.abs(sstar).max())
    if np.abs(jump).max() <= _POLE_RTOL * scale:
        raise YTransformPoleError("Y-transform undefined for identical phases")
    middle = f1 * (s1 - sstar) + f2 * (s2 - sstar)
    if np.linalg.svd(middle, compute_uv=False)[-1] <= _POLE_RTOL * scale:
        raise YTransformPoleError("Y-transform arithmetic-mean pole (sigma* at the phase average)")
    return -f2 * s1 - f1 * s2 + f1 * f2 * jump @ np.linalg.solve(middle, jump)


def y_tensor_ti(p1: TIConductivity, p2: TIConductivity, f1: float, pstar: TIConductivity) -> YTensorTI:
    """Y-transform of transversely isotropic data through ``a + i c`` arithmetic."""
    f1 = _fraction(f1)
    f2 = 1.0 - f1
    z1, z2, zs = complex(p1.a, p1.c), complex(p2.a, p2.c), complex(pstar.a, pstar.c)
    b1, b2, bs = p1.b, p2.b, pstar.b
    scale = max(abs(z1), abs(z2), abs(zs), b1, b2, bs)
    if abs(z1 - z2) <= _POLE_RTOL * scale and abs(b1 - b2) <= _POLE_RTOL * scale:
        raise YTransformPoleError("Y-transform undefined for identical phases")
    # differences first: exact when the phases share a coefficient with the candidate
    z_den = f1 * (z1 - zs) + f2 * (z2 - zs)
    b_den = f1 * (b1 - bs) + f2 * (b2 - bs)
    if abs(z_den) <= _POLE_RTOL * scale:
        raise YTransformPoleError("Y-transform arithmetic-mean pole (sigma* at the phase average): in-plane block")
    if abs(b_den) <= _POLE_RTOL * scale:
        raise YTransformPoleError("Y-transform arithmetic-mean pole (sigma* at the phase average): axial entry")
    # the direct in-plane form keeps c_Y = -c exact for a common Hall
    # coefficient; the axial entry is factored so it vanishes at the harmonic mean
    zY = -f2 * z1 - f1 * z2 + f1 * f2 * (z1 - z2) ** 2 / z_den
    bY = _y_axial(b1, b2, bs, f1, b_den)
    return YTensorTI(float(zY.real), float(zY.imag), float(bY))


def _y_axial(x1, x2, xs, f1, den):
    """``-f2 x1 - f1 x2 + f1 f2 (x1 - x2)^2 / den`` with ``den = <x> - xs``,
    factored as ``(f2 x1 + f1 x2)(xs - harmonic mean) / den``.

    The direct form cancels when ``x1`` is close to ``x2``; the factored one
    vanishes exactly when ``xs`` is the harmonic mean ``1 / (f1/x1 + f2/x2)``.
    """
    f2 = 1.0 - f1
    harmonic = 1.0 / (f1 / x1 + f2 / x2)
    return (f2 * x1 + f1 * x2) * (xs - harmonic) / den


def hs_disk_check(y: YTensorTI, h: HSCoefficients, tol: float = DEFAULT_TOL) -> tuple[BoundsVerdict, BoundsVerdict]:
    """``a_Y^2 + (c_Y + alpha)^2 - a_Y / s1 <= 0`` for both circles.

    For a degenerate phase pair the minus branch is the half-plane
    ``a_Y >= a_1``, with residual ``a_1 - a_Y``.
    """
    out = []
    for sign, alpha, t1, s1 in h.branches():
        residual = y.a_Y**2 + (y.c_Y + alpha) ** 2 - y.a_Y / s1
        out.append(BoundsVerdict.from_residual(
            f"hs_disk{sign}", residual, tol, a_Y=y.a_Y, c_Y=y.c_Y, alpha=alpha, s1=s1))
    if h.degenerate_flag:
        out.append(BoundsVerdict.from_residual(
            "hs_disk-", h.line_a - y.a_Y, tol, a_Y=y.a_Y, c_Y=y.c_Y, line_a=h.line_a))
    return out[0], out[1]


def phase_circle_residual(a: float, c: float, alpha: float, t1: float) -> float:
    if not t1 > 0:
        raise HallBoundsError(f"t1 must be positive, got {t1}")
    return float(a**2 + (c - alpha) ** 2 - a / t1)


def b_hs_check(b_Y: float, b1: float, t1: float, tol: float = DEFAULT_TOL, name: str = "hs_b") -> BoundsVerdict:
    """``1/b_Y + 1/b1 >= 1/(b1 (1 - g(b1 t1)))`` and ``b_Y >= 0``.

    For ``b_Y > 0`` the reciprocal inequality is ``b_Y <= b1 (1 - g) / g``; the
    residual is taken in that form so ``b_Y = 0`` (harmonic-mean ``b*``) sits
    inside and ``b_Y -> inf`` (arithmetic-mean ``b*``) is rejected.
    """
    if not (b1 > 0 and t1 >= 0):
        raise HallBoundsError(f"need b1 > 0 and t1 >= 0, got {b1}, {t1}")
    if t1 == 0:
        cap = np.inf
    else:
        g = g_fun(b1 * t1)
        cap = b1 * (1.0 - g) / g
    residual = max(-b_Y, b_Y - cap)
    return BoundsVerdict.from_residual(name, residual, tol, b_Y=b_Y, b1=b1, t1=t1, b_Y_max=float(cap))


def hs_geometry(phases, h: HSCoefficients):
    """Bound disks and phase circles in the ``(a, c)`` plot plane.

    Returns ``(hs_disks, phase_circles)``; on a degenerate pair the minus
    entry of both is a :class:`VerticalLine`.
    """
    hs_disks, phase_disks = [], []
    for _, alpha, t1, s1 in h.branches():
        phase_disks.append(DiskGeometry((0.5 / t1, alpha), 0.5 / t1, (0.0, alpha)))
        hs_disks.append(DiskGeometry((0.5 / s1, alpha), 0.5 / s1, (0.0, alpha)))
    if h.degenerate_flag:
        line = VerticalLine(float(phases[0].a))
        phase_disks.append(line)
        hs_disks.append(line)
    return hs_disks, phase_disks


@dataclass(frozen=True)
class HSReport:
    phases: tuple
    f1: float
    candidate: TIConductivity
    swapped: bool
    coefficients: HSCoefficients
    y: YTensorTI
    disk_verdicts: tuple
    b_verdicts: tuple
    geometry: tuple = field(repr=False)

    @property
    def verdicts(self) -> list[BoundsVerdict]:
        return [*self.disk_verdicts, *self.b_verdicts]

    @property
    def satisfied(self) -> bool:
        return all(v.satisfied for v in self.verdicts)


def hs_bounds(p1: TIConductivity, p2: TIConductivity, f1: float, pstar: TIConductivity,
              tol: float = DEFAULT_TOL) -> HSReport:
    """Evaluate every Hashin-Shtrikman type bound for the candidate ``pstar``."""
    p1, p2, f1, swapped = order_phases(p1, p2, _fraction(f1))
    y = y_tensor_ti(p1, p2, f1, pstar)
    h = hs_coefficients(p1, p2)
    disks = hs_disk_check(y, h, tol)
    b_checks = [b_hs_check(y.b_Y, p1.b, t1, tol, name=f"hs_b{sign}") for sign, _, t1, _ in h.branches()]
    if h.degenerate_flag:
        b_checks.append(b_hs_check(y.b_Y, p1.b, 0.0, tol, name="hs_b-"))
    return HSReport(
        phases=(p1, p2),
        f1=f1,
        candidate=pstar,
        swapped=swapped,
        coefficients=h,
        y=y,
        disk_verdicts=tuple(disks),
        b_verdicts=tuple(b_checks),
        geometry=hs_geometry((p1, p2), h),
    )


def _fraction(f1):
    f1 = float(f1)
    if not 0.0 < f1 < 1.0:
        raise HallBoundsError(f"volume fraction must lie in (0, 1), got {f1}")
    return f1
