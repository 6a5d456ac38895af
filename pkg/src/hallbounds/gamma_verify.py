"""Numerical checks of the Gamma-operator algebra behind the Hashin-Shtrikman bounds.

The reference tensor ``L0`` has the five-parameter pattern

    [[t1, 0, 0, 0, t2, 0], [0, t1, 0, -t2, 0, 0], [0, 0, t4, 0, 0, 0],
     [0, -t2, 0, t3, 0, 0], [t2, 0, 0, 0, t3, 0], [0, 0, 0, 0, 0, t5]]

with 3x3 blocks ``C1 = diag(t1, t1, t4)``, ``C2 = -t2 J`` and
``C3 = diag(t3, t3, t5)``.  ``Gamma(xi)`` is evaluated from its closed form
and checked against its defining relations; its average over the unit sphere
is computed both by quadrature and from closed-form entries.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_legendre

from .bounds_elem import BoundsVerdict
from .bounds_hs import HSCoefficients, YTensorTI, g_fun
from .exceptions import HallBoundsError
from .tensor_core import DEFAULT_TOL, J, TIConductivity, _symmetrized, build_block_L

__all__ = [
    "L0Params",
    "GammaAverage",
    "gamma1_of_xi",
    "gamma_of_xi",
    "gamma_relation_residual",
    "gamma_avg_numeric",
    "gamma_avg_adaptive",
    "graded_breakpoints",
    "gamma_avg_closed",
    "gamma_avg_closed_inverse",
    "reference_l0",
    "y_block_tensor",
    "hs_inequality_check",
    "hs_matrix_ti_check",
    "hs_matrix_verdicts",
]


@dataclass(frozen=True)
class L0Params:
    t1: float
    t2: float
    t3: float
    t4: float
    t5: float

    def __post_init__(self):
        for name in ("t1", "t2", "t3", "t4", "t5"):
            value = float(getattr(self, name))
            if not np.isfinite(value):
                raise HallBoundsError(f"{name} must be finite")
            object.__setattr__(self, name, value)
        if min(self.t1, self.t3, self.t4, self.t5) < 0:
            raise HallBoundsError("L0 must be positive semidefinite: t1, t3, t4, t5 >= 0")
        if self.t1 * self.t3 < self.t2**2 * (1 - 1e-12):
            raise HallBoundsError("L0 must be positive semidefinite: t1 t3 >= t2^2")

    @classmethod
    def limit(cls, t1, t2, t4, t5) -> "L0Params":
        """Member of the family with ``t3 = t2^2 / t1`` (``d1 = 0``)."""
        return cls(t1, t2, t2**2 / t1, t4, t5)

    @property
    def d1(self) -> float:
        return self.t3 - self.t2**2 / self.t1

    @property
    def d2(self) -> float:
        return self.t5

    def blocks(self):
        C1 = np.diag([self.t1, self.t1, self.t4])
        C2 = -self.t2 * J
        C3 = np.diag([self.t3, self.t3, self.t5])
        return C1, C2, C3

    def matrix(self) -> np.ndarray:
        C1, C2, C3 = self.blocks()
        return np.block([[C1, C2], [C2.T, C3]])


@dataclass(frozen=True)
class GammaAverage:
    p1: float
    p2: float
    q1: float
    q2: float
    r1: float
    r2: float
    t2_over_t1: float

    def matrix(self) -> np.ndarray:
        tau, p1 = self.t2_over_t1, self.p1
        G = np.diag([self.r1 + tau**2 * p1, self.r1 + tau**2 * p1, self.r2, p1, p1, self.p2])
        G[0, 4] = G[4, 0] = -tau * p1
        G[1, 3] = G[3, 1] = tau * p1
        return G


def gamma1_of_xi(xi) -> np.ndarray:
    """Projection onto divergence-free (first block) and curl-free (second block)
    fields for wave direction ``xi``."""
    xi = np.asarray(xi, dtype=float)
    if abs(np.linalg.norm(xi) - 1.0) > 1e-12:
        raise HallBoundsError(f"xi must be a unit vector, |xi| = {np.linalg.norm(xi)}")
    X = np.outer(xi, xi)
    out = np.zeros((6, 6))
    out[:3, :3] = np.eye(3) - X
    out[3:, 3:] = X
    return out


def _gamma_batch(l0: L0Params, xis: np.ndarray) -> np.ndarray:
    """Closed-form ``Gamma(xi)`` for an ``(n, 3)`` array of unit vectors."""
    if not (l0.t1 > 0 and l0.t4 > 0):
        raise HallBoundsError("C1 must be invertible: t1, t4 > 0")
    if not (l0.d1 > 0 and l0.d2 > 0):
        raise HallBoundsError(
            f"D = diag(d1, d1, d2) must be positive definite, got d1={l0.d1:g}, d2={l0.d2:g}"
        )
    C1, C2, _ = l0.blocks()
    C1inv = np.diag(1.0 / np.diag(C1))
    D = np.array([l0.d1, l0.d1, l0.d2])
    X = xis[:, :, None] * xis[:, None, :]
    Dxx = (xis**2) @ D
    Cxx = (xis**2) @ np.diag(C1inv)
    A = C1inv @ C2           # C1^-1 C2
    At = C1inv @ C2.T        # C1^-1 C2^T
    G = np.empty((len(xis), 6, 6))
    G[:, :3, :3] = (
        C1inv
        + (A @ X @ A.transpose()) / Dxx[:, None, None]
        - (C1inv @ X @ C1inv) / Cxx[:, None, None]
    )
    G[:, :3, 3:] = (At @ X) / Dxx[:, None, None]
    G[:, 3:, :3] = (X @ C2 @ C1inv) / Dxx[:, None, None]
    G[:, 3:, 3:] = X / Dxx[:, None, None]
    return G


def gamma_of_xi(l0: L0Params, xi) -> np.ndarray:
    """``Gamma(xi)``: the map ``A -> B`` with ``B`` admissible and
    ``Gamma_1(xi) (A - L0 B) = 0``."""
    xi = np.asarray(xi, dtype=float)
    if abs(np.linalg.norm(xi) - 1.0) > 1e-12:
        raise HallBoundsError(f"xi must be a unit vector, |xi| = {np.linalg.norm(xi)}")
    return _gamma_batch(l0, xi[None, :])[0]


def gamma_relation_residual(l0: L0Params, xi, A) -> float:
    """Largest violation of the defining relations of ``B = Gamma(xi) A``,
    each relative to the magnitude of the terms it compares.

    ``A`` may be a 6-vector or a ``(6, k)`` array of columns.
    """
    A = np.asarray(A, dtype=float)
    G1 = gamma1_of_xi(xi)
    B = gamma_of_xi(l0, xi) @ A
    L = l0.matrix()
    R = A - L @ B
    # each relation relative to the size of the terms it cancels; L0 B itself
    # cancels when d1 is small, hence |L0| |B| rather than |L0 B|
    scale_B = max(1.0, np.abs(B).max())
    scale_R = max(1.0, np.abs(A).max(), np.abs(L).max() * np.abs(B).max())
    return float(max(np.abs(G1 @ B - B).max() / scale_B, np.abs(G1 @ R).max() / scale_R))


@lru_cache(maxsize=32)
def _legendre(n: int):
    u, w = roots_legendre(n)
    u.setflags(write=False)
    w.setflags(write=False)
    return u, w


def _panel_rule(n: int, breakpoints) -> tuple[np.ndarray, np.ndarray]:
    """Composite ``n``-point Gauss-Legendre rule on ``[-1, 1]`` split at ``breakpoints``."""
    u0, w0 = _legendre(n)
    if breakpoints is None:
        return np.asarray(u0), np.asarray(w0)
    edges = np.unique(np.clip(np.concatenate([[-1.0, 1.0], np.asarray(breakpoints, float)]), -1, 1))
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    u = ((lo + hi)[:, None] * 0.5 + half[:, None] * u0[None, :]).ravel()
    w = (half[:, None] * w0[None, :]).ravel()
    return u, w


def graded_breakpoints(l0: L0Params, ratio: float = 4.0) -> np.ndarray | None:
    """Panel edges in ``cos(theta)`` clustered where the integrand has a
    narrow peak: near the equator when ``d1 << d2`` or ``t4 << t1``, near the
    poles when ``d2 << d1``.  ``None`` when the integrand is uniformly tame."""
    pts = []
    w_eq = min(np.sqrt(l0.d1 / l0.d2), np.sqrt(l0.t4 / l0.t1)) if l0.d2 > 0 else 1.0
    if w_eq < 0.25:
        w = w_eq
        while w < 1.0:
            pts += [-w, w]
            w *= ratio
        pts.append(0.0)
    w_pole = l0.d2 / l0.d1 if l0.d1 > 0 else 1.0
    if w_pole < 0.25:
        w = w_pole
        while w < 1.0:
            pts += [-1.0 + w, 1.0 - w]
            w *= ratio
    return np.array(sorted(pts)) if pts else None


def gamma_avg_numeric(l0: L0Params, n_theta: int = 64, n_phi: int = 8, phi_offset: float = 0.0,
                      breakpoints=None) -> np.ndarray:
    """Average of ``Gamma(xi)`` over the unit sphere.

    Gauss-Legendre in ``cos(theta)`` times the trapezoid rule in ``phi``; the
    integrand is a trigonometric polynomial of degree two in ``phi``, so any
    ``n_phi >= 3`` integrates that direction exactly.  With ``breakpoints``
    the ``theta`` rule is composite, ``n_theta`` nodes per panel.
    """
    if n_theta < 2 or n_phi < 2:
        raise HallBoundsError("quadrature orders must be at least 2")
    u, w = _panel_rule(int(n_theta), breakpoints)
    sin_t = np.sqrt(np.maximum(1.0 - u**2, 0.0))
    total = np.zeros((6, 6))
    for j in range(int(n_phi)):
        phi = phi_offset + 2.0 * np.pi * j / n_phi
        xis = np.column_stack([sin_t * np.cos(phi), sin_t * np.sin(phi), u])
        G = _gamma_batch(l0, xis)
        total += np.einsum("i,ijk->jk", w, G)
    return total / (2.0 * n_phi)


def gamma_avg_adaptive(l0: L0Params, tol: float = 1e-11, n_start: int = 16,
                       n_max: int = 1024, n_phi: int = 8) -> tuple[np.ndarray, int]:
    """Double the ``theta`` order until successive averages agree entrywise to
    ``tol`` relative to the largest entry.  Returns ``(average, order)``; the
    order is per panel when the rule is graded (see :func:`graded_breakpoints`)."""
    bp = graded_breakpoints(l0)
    n = int(n_start)
    prev = gamma_avg_numeric(l0, n, n_phi, breakpoints=bp)
    while n < n_max:
        n *= 2
        cur = gamma_avg_numeric(l0, n, n_phi, breakpoints=bp)
        if np.abs(cur - prev).max() <= tol * max(1.0, np.abs(cur).max()):
            return cur, n
        prev = cur
    raise HallBoundsError(f"sphere average did not converge to {tol:g} by order {n_max}")


def gamma_avg_closed(l0: L0Params) -> GammaAverage:
    """Closed-form sphere average of ``Gamma`` for ``d1 > 0``."""
    if not (l0.d1 > 0 and l0.d2 > 0 and l0.t1 > 0 and l0.t4 > 0):
        raise HallBoundsError("closed-form average needs d1, d2, t1, t4 > 0")
    gD = g_fun(l0.d2 / l0.d1)
    p2 = gD / l0.d2
    p1 = (1.0 - gD) / (2.0 * l0.d1)
    gC = g_fun(l0.t1 / l0.t4)
    q2 = l0.t4 * gC
    q1 = 0.5 * l0.t1 * (1.0 - gC)
    r1 = 1.0 / l0.t1 - q1 / l0.t1**2
    r2 = 1.0 / l0.t4 - q2 / l0.t4**2
    return GammaAverage(p1, p2, q1, q2, r1, r2, l0.t2 / l0.t1)


def gamma_avg_closed_inverse(l0: L0Params) -> np.ndarray:
    """Limit of ``<Gamma>^-1`` as ``t3 -> t2^2 / t1``; ``t3`` itself is ignored."""
    if not (l0.t1 > 0 and l0.t4 > 0 and l0.t5 > 0):
        raise HallBoundsError("need t1, t4, t5 > 0")
    g = g_fun(l0.t1 / l0.t4)
    r1 = (1.0 + g) / (2.0 * l0.t1)
    r2 = (1.0 - g) / l0.t4
    tau = l0.t2 / l0.t1
    M = np.diag([1 / r1, 1 / r1, 1 / r2, tau**2 / r1, tau**2 / r1, l0.t5])
    M[0, 4] = M[4, 0] = tau / r1
    M[1, 3] = M[3, 1] = -tau / r1
    return M


def reference_l0(h: HSCoefficients, p1: TIConductivity, p2: TIConductivity, sign: str = "+") -> L0Params:
    """The reference tensor behind the bounds: ``t1 = t1_+-``,
    ``t2 = alpha t1``, ``t3 = alpha^2 t1``, ``t4 = 1/b1``, ``t5 = b2``."""
    if sign not in "+-" or len(sign) != 1:
        raise HallBoundsError(f"sign must be '+' or '-', got {sign!r}")
    if sign == "-" and h.degenerate_flag:
        raise HallBoundsError("degenerate phase pair has no minus circle")
    alpha, t1 = (h.alpha_plus, h.t1_plus) if sign == "+" else (h.alpha_minus, h.t1_minus)
    return L0Params(t1, alpha * t1, alpha**2 * t1, 1.0 / p1.b, p2.b)


def y_block_tensor(y: YTensorTI) -> np.ndarray:
    """Symmetric 6x6 tensor built from ``Y_*`` as the block tensor of ``Y_*^T``.

    Same construction as for a conductivity, but ``Y_*`` only needs an
    invertible symmetric part: ``a_Y`` and ``b_Y`` may be negative.
    """
    if y.a_Y == 0 or y.b_Y == 0:
        raise HallBoundsError("block tensor of Y needs a_Y != 0 and b_Y != 0")
    m = y.matrix().T
    sym, anti = 0.5 * (m + m.T), 0.5 * (m - m.T)
    sym_inv = np.diag(1.0 / np.diag(sym))
    L = np.block([[sym_inv, -sym_inv @ anti], [anti @ sym_inv, sym - anti @ sym_inv @ anti]])
    return 0.5 * (L + L.T)


def hs_inequality_check(yt, l0: L0Params, tol: float = DEFAULT_TOL) -> BoundsVerdict:
    """Matrix form of the bound: ``Ycal* + L0 - <Gamma>^-1`` is positive semidefinite.

    The residual is minus the smallest eigenvalue.  The details also report
    the invariant sub-blocks: the determinant of the ``(1, 5)`` pair and the
    ``(3, 3)`` entry, whose signs carry the disk and axial inequalities.
    """
    yt = _symmetrized(yt, tol)
    M = yt + l0.matrix() - gamma_avg_closed_inverse(l0)
    M = 0.5 * (M + M.T)
    lam = float(np.linalg.eigvalsh(M)[0])
    pair = M[np.ix_([0, 4], [0, 4])]
    return BoundsVerdict.from_residual(
        "hs_matrix", -lam, tol,
        min_eigenvalue=lam,
        pair_det=float(np.linalg.det(pair)),
        pair_diag=float(pair[0, 0]),
        axial_entry=float(M[2, 2]),
        axial_dual_entry=float(M[5, 5]),
    )


_IN_PLANE = [0, 1, 3, 4]


def hs_matrix_ti_check(y: YTensorTI, l0: L0Params, tol: float = DEFAULT_TOL,
                       name: str = "hs_matrix") -> BoundsVerdict:
    """:func:`hs_inequality_check` for transversely isotropic ``Y_*``.

    The in-plane rows and the two axial rows decouple.  The axial entries are
    ``1/b_Y + t4 - 1/r2`` and ``b_Y``; the first is tested multiplied by
    ``b_Y`` so that ``b_Y = 0`` (harmonic-mean ``b*``) stays finite.  Its
    residual, ``b_Y - 1/(1/r2 - t4)``, is the scalar axial residual.
    """
    Ginv = gamma_avg_closed_inverse(l0)
    if y.a_Y == 0:
        raise HallBoundsError("matrix form needs a_Y != 0")
    # in-plane block only reads a_Y and c_Y; any b_Y != 0 will do here
    yt = y_block_tensor(YTensorTI(y.a_Y, y.c_Y, 1.0))
    M = (yt + l0.matrix() - Ginv)[np.ix_(_IN_PLANE, _IN_PLANE)]
    lam = float(np.linalg.eigvalsh(0.5 * (M + M.T))[0])
    pair = M[np.ix_([0, 3], [0, 3])]
    gap = Ginv[2, 2] - l0.t4
    if gap > 0:
        axial = max(-y.b_Y, y.b_Y - 1.0 / gap)
    else:
        axial = -y.b_Y
    residual = max(-lam, axial)
    return BoundsVerdict.from_residual(
        name, residual, tol,
        min_eigenvalue_in_plane=lam,
        pair_det=float(np.linalg.det(pair)),
        pair_diag=float(pair[0, 0]),
        axial_residual=float(axial),
    )


def hs_matrix_verdicts(y: YTensorTI, h: HSCoefficients, p1: TIConductivity, p2: TIConductivity,
                       tol: float = DEFAULT_TOL) -> list[BoundsVerdict]:
    """Matrix-form check for each circle, phases ordered with ``b1 >= b2``."""
    signs = ["+"] if h.degenerate_flag else ["+", "-"]
    return [hs_matrix_ti_check(y, reference_l0(h, p1, p2, s), tol, name=f"hs_matrix{s}") for s in signs]
