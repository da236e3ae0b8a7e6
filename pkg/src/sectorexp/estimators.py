"""scikit-learn style wrappers: points in, field values out."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .cornerseries import AnalyticRHS, sector_power
from .geometry import Opening, SectorScene
from .twoscale import build_corner_expansion, build_two_scale, solve_unperturbed


def _points(X) -> np.ndarray:
    X = check_array(X, ensure_min_features=2)
    if X.shape[1] != 2:
        raise ValueError(f"expected points with 2 columns, got {X.shape[1]}")
    return X[:, 0] + 1j * X[:, 1]


def _rhs(rhs):
    if isinstance(rhs, (int, float)):
        return AnalyticRHS.constant(float(rhs))
    return rhs


class PowerMapTransformer(TransformerMixin, BaseEstimator):
    """Maps sector points t to t**kappa (upper half plane for kappa = pi / omega)."""

    def __init__(self, omega="pi/2"):
        self.omega = omega

    def fit(self, X=None, y=None):
        self.opening_ = Opening.coerce(self.omega)
        self.kappa_ = self.opening_.kappa
        if X is not None:
            self.n_features_in_ = check_array(X).shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "kappa_")
        w = sector_power(_points(X), self.kappa_)
        return np.column_stack([w.real, w.imag])

    def inverse_transform(self, X):
        check_is_fitted(self, "kappa_")
        z = sector_power(_points(X), 1.0 / self.kappa_)
        return np.column_stack([z.real, z.imag])


class CornerExpansionModel(BaseEstimator):
    """Corner expansion of the unperturbed solution; predict evaluates it at points."""

    def __init__(self, omega="pi/2", outer_radius=1.0, rhs=1.0, delta=None, gamma_max=8.0,
                 panels_per_unit=6.0):
        self.omega = omega
        self.outer_radius = outer_radius
        self.rhs = rhs
        self.delta = delta
        self.gamma_max = gamma_max
        self.panels_per_unit = panels_per_unit

    def fit(self, X=None, y=None):
        scene = SectorScene(self.omega, self.outer_radius)
        f = _rhs(self.rhs)
        self.solution_ = solve_unperturbed(scene, f, panels_per_unit=self.panels_per_unit)
        self.expansion_ = build_corner_expansion(scene, f, self.solution_, gamma_max=self.gamma_max,
                                                 delta=self.delta)
        self.coef_ = {g.label(): complex(a) for g, a in self.expansion_.coeffs.items() if a != 0}
        self.growth_ = self.expansion_.growth
        return self

    def predict(self, X, cutoff=None):
        check_is_fitted(self, "expansion_")
        return self.expansion_.evaluate(_points(X), cutoff)

    def reference(self, X):
        """Boundary-integral values of the unperturbed solution."""
        check_is_fitted(self, "solution_")
        return self.solution_.evaluate(_points(X))


class TwoScaleModel(BaseEstimator):
    """Truncated two-scale expansion for a fixed hole pattern; predict gives u_eps at points."""

    def __init__(self, omega="pi/2", outer_radius=1.0, holes=(), rhs=1.0, eps=0.1, cutoff=8.0,
                 delta=None, frame="global", panels_per_unit=3.0):
        self.omega = omega
        self.outer_radius = outer_radius
        self.holes = holes
        self.rhs = rhs
        self.eps = eps
        self.cutoff = cutoff
        self.delta = delta
        self.frame = frame
        self.panels_per_unit = panels_per_unit

    def fit(self, X=None, y=None):
        scene = SectorScene(self.omega, self.outer_radius, tuple(self.holes))
        self.expansion_ = build_two_scale(scene, _rhs(self.rhs), cutoff=self.cutoff, delta=self.delta,
                                          panels_per_unit=self.panels_per_unit)
        self.manifest_ = self.expansion_.manifest()
        return self

    def predict(self, X):
        check_is_fitted(self, "expansion_")
        return self.expansion_.evaluate(self.eps, _points(X), self.frame, self.cutoff)

    def reference(self, X):
        """Direct block-system solve (correction plus u0) at the same points."""
        check_is_fitted(self, "expansion_")
        t = _points(X)
        return self.expansion_.u0.evaluate(t) + self.expansion_.reference(self.eps, t)
