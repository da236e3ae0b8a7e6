import cmath
import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from sectorexp.estimators import CornerExpansionModel, PowerMapTransformer, TwoScaleModel
from sectorexp.geometry import BoundaryCurve


def test_power_map_round_trip():
    X = np.array([[0.3, 0.2], [0.1, 0.5]])
    tr = PowerMapTransformer("pi/2").fit(X)
    Y = tr.transform(X)
    z = X[:, 0] + 1j * X[:, 1]
    np.testing.assert_allclose(Y[:, 0] + 1j * Y[:, 1], z**2)
    np.testing.assert_allclose(tr.inverse_transform(Y), X, atol=1e-15)


def test_params_and_clone():
    model = CornerExpansionModel(omega="pi/3", gamma_max=5.0)
    assert model.get_params()["gamma_max"] == 5.0
    assert clone(model).get_params() == model.get_params()


def test_unfitted_model_raises():
    with pytest.raises(NotFittedError):
        CornerExpansionModel().predict([[0.1, 0.1]])


def test_bad_point_array():
    tr = PowerMapTransformer().fit()
    with pytest.raises(ValueError):
        tr.transform([[0.1, 0.2, 0.3]])


def test_corner_model_tracks_unperturbed_solution():
    model = CornerExpansionModel().fit()
    X = 0.2 * np.column_stack([np.cos([0.3, 0.9]), np.sin([0.3, 0.9])])
    np.testing.assert_allclose(model.predict(X), model.reference(X), atol=1e-7)
    assert "(2,0)" in model.coef_


def test_two_scale_model_matches_direct_solve():
    hole = BoundaryCurve.circle(0.5 * cmath.exp(1j * math.pi / 4), 0.1)
    model = TwoScaleModel(holes=(hole,), eps=0.1, cutoff=8.0).fit()
    X = np.array([[0.4, 0.2], [0.1, 0.6]])
    np.testing.assert_allclose(model.predict(X), model.reference(X), atol=1e-9)
    assert model.manifest_["kappa"] == 2.0
