"""scikit-learn style wrappers around the bound checks.

Each estimator is configured with the phase data, ``fit`` validates it and
precomputes the bound parameters, and ``transform`` maps candidate
effective coefficients, one row ``(a*, b*, c*)`` per sample, to signed
residuals (``<= 0`` where the bound holds).  ``predict`` reduces a row to a
single boolean.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .bounds_elem import (
    b_interval,
    circle_params,
    elementary_verdicts,
    superfluous_cstar_bound,
)
from .bounds_hs import hs_bounds, hs_coefficients, order_phases, y_tensor_ti
from .exceptions import HallBoundsError
from .tensor_core import DEFAULT_TOL, PhaseDistribution, TIConductivity

__all__ = ["ElementaryBounds", "HashinShtrikmanBounds", "YTransform"]


def _two_phases(phases, fraction):
    rows = [tuple(float(v) for v in row) for row in phases]
    if len(rows) != 2 or any(len(r) != 3 for r in rows):
        raise HallBoundsError("expected two phases given as rows (a, b, c)")
    f1 = float(fraction)
    if not 0.0 < f1 < 1.0:
        raise HallBoundsError(f"fraction must lie in (0, 1), got {f1}")
    return TIConductivity(*rows[0]), TIConductivity(*rows[1]), f1


def _candidates(X):
    X = check_array(X, dtype=float, ensure_min_features=3)
    if X.shape[1] != 3:
        raise ValueError(f"expected rows (a*, b*, c*), got {X.shape[1]} columns")
    return X


class ElementaryBounds(TransformerMixin, BaseEstimator):
    """Elementary bounds for phases given as rows ``(f, a, b, c)``.

    Output columns follow :attr:`feature_names_`.
    """

    def __init__(self, phases=None, tol=DEFAULT_TOL):
        self.phases = phases
        self.tol = tol

    def fit(self, X=None, y=None):
        if self.phases is None:
            raise HallBoundsError("phases must be given")
        self.distribution_ = PhaseDistribution.from_rows(self.phases)
        self.circle_ = circle_params(self.distribution_)
        self.b_interval_ = b_interval(self.distribution_)
        self.superfluous_bound_ = superfluous_cstar_bound(self.distribution_)[0]
        self.feature_names_ = np.array(
            [v.name for v in elementary_verdicts(self.distribution_, self.circle_.a_L,
                                                 self.b_interval_[0], self.circle_.c_L)]
        )
        self.n_features_in_ = 3
        return self

    def transform(self, X):
        check_is_fitted(self, "distribution_")
        X = _candidates(X)
        out = np.empty((len(X), len(self.feature_names_)))
        for i, (a, b, c) in enumerate(X):
            out[i] = [v.residual for v in elementary_verdicts(self.distribution_, a, b, c, self.tol)]
        return out

    def predict(self, X):
        return np.all(self.transform(X) <= self.tol, axis=1)

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "feature_names_")
        return self.feature_names_.astype(object)


class HashinShtrikmanBounds(TransformerMixin, BaseEstimator):
    """Hashin-Shtrikman type bounds for two phases given as rows ``(a, b, c)``,
    the first with volume fraction ``fraction``.

    Residual columns: ``hs_disk+``, ``hs_disk-``, ``hs_b+``, ``hs_b-``.
    """

    def __init__(self, phases=None, fraction=0.5, tol=DEFAULT_TOL):
        self.phases = phases
        self.fraction = fraction
        self.tol = tol

    def fit(self, X=None, y=None):
        if self.phases is None:
            raise HallBoundsError("phases must be given")
        p1, p2, f1 = _two_phases(self.phases, self.fraction)
        self.phase_pair_ = (p1, p2)
        self.f1_ = f1
        q1, q2, _, self.swapped_ = order_phases(p1, p2, f1)
        self.coefficients_ = hs_coefficients(q1, q2)
        self.feature_names_ = np.array(["hs_disk+", "hs_disk-", "hs_b+", "hs_b-"])
        self.n_features_in_ = 3
        return self

    def transform(self, X):
        check_is_fitted(self, "coefficients_")
        X = _candidates(X)
        p1, p2 = self.phase_pair_
        out = np.empty((len(X), 4))
        for i, (a, b, c) in enumerate(X):
            report = hs_bounds(p1, p2, self.f1_, TIConductivity(a, b, c), self.tol)
            out[i] = [v.residual for v in report.verdicts]
        return out

    def predict(self, X):
        return np.all(self.transform(X) <= self.tol, axis=1)

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "feature_names_")
        return self.feature_names_.astype(object)


class YTransform(TransformerMixin, BaseEstimator):
    """Rows ``(a*, b*, c*)`` to rows ``(a_Y, c_Y, b_Y)`` of the Y-transform."""

    def __init__(self, phases=None, fraction=0.5):
        self.phases = phases
        self.fraction = fraction

    def fit(self, X=None, y=None):
        if self.phases is None:
            raise HallBoundsError("phases must be given")
        p1, p2, f1 = _two_phases(self.phases, self.fraction)
        self.phase_pair_ = (p1, p2)
        self.f1_ = f1
        self.n_features_in_ = 3
        return self

    def transform(self, X):
        check_is_fitted(self, "phase_pair_")
        X = _candidates(X)
        p1, p2 = self.phase_pair_
        rows = []
        for a, b, c in X:
            y = y_tensor_ti(p1, p2, self.f1_, TIConductivity(a, b, c))
            rows.append((y.a_Y, y.c_Y, y.b_Y))
        return np.array(rows, dtype=float).reshape(len(X), 3)

    def get_feature_names_out(self, input_features=None):
        return np.array(["a_Y", "c_Y", "b_Y"], dtype=object)
