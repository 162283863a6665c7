import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import FunctionTransformer

from bellscope import (BooleBoundsTransformer, LocalHiddenVariableCHSH, QuantumCHSH,
                       RegimeBoundOptimizer, boole, lhv, quantum)
from bellscope.exceptions import BellscopeError


def test_optimizer_params_roundtrip():
    est = RegimeBoundOptimizer(regime="global", dim=4, restarts=3)
    params = est.get_params()
    assert params["regime"] == "global" and params["restarts"] == 3
    twin = clone(est).set_params(restarts=5)
    assert twin.restarts == 5 and est.restarts == 3


def test_optimizer_fit_tensor():
    est = RegimeBoundOptimizer(regime="tensor", restarts=4, random_state=3).fit()
    assert est.best_value_ == pytest.approx(2 * math.sqrt(2), abs=1e-3)
    assert est.score() == est.best_value_
    assert est.within_ceiling()
    assert est.per_restart_values_.shape == (4,)
    assert est.ceiling_ == pytest.approx(2 * math.sqrt(2))


def test_optimizer_classical():
    est = RegimeBoundOptimizer(regime="classical").fit()
    assert est.best_value_ == 2.0


def test_optimizer_seed_type_checked():
    with pytest.raises(BellscopeError):
        RegimeBoundOptimizer(random_state=np.random.default_rng(0)).fit()


def test_optimizer_unfitted():
    from sklearn.exceptions import NotFittedError
    with pytest.raises(NotFittedError):
        RegimeBoundOptimizer().score()


def test_quantum_estimator_matches_module():
    X = np.random.default_rng(1).uniform(-3, 3, (20, 4))
    est = QuantumCHSH(state="singlet").fit(X)
    pred = est.predict(X)
    want = [quantum.chsh_value(quantum.TwoParticleState.singlet(), quantum.MeasurementSettings.from_sequence(r))
            for r in X]
    np.testing.assert_allclose(pred, want, atol=1e-12)
    assert est.transform(X).shape == (20, 4)


def test_quantum_estimator_bad_shape():
    est = QuantumCHSH().fit()
    with pytest.raises(BellscopeError):
        est.predict(np.zeros((3, 3)))


def test_lhv_estimator():
    X = np.array([[0.0, math.pi / 2, math.pi / 4, 3 * math.pi / 4], [0.0, 0.0, 0.0, 0.0]])
    pred = LocalHiddenVariableCHSH(model="sign-cos").fit(X).predict(X)
    assert abs(abs(pred[0]) - 2) < 2e-3
    const = LocalHiddenVariableCHSH(model=lhv.constant_model()).fit(X).predict(X)
    np.testing.assert_allclose(const, 2.0, atol=1e-12)


def test_boole_transformer_in_pipeline():
    X = np.array([[0.5, 0.5], [0.9, 0.8], [0.2, 0.3]])
    pipe = make_pipeline(FunctionTransformer(), BooleBoundsTransformer())
    out = pipe.fit_transform(X)
    for row, got in zip(X, out):
        u, i = boole.union_bounds(row), boole.intersection_bounds(row)
        np.testing.assert_allclose(got, [u.lo, u.hi, i.lo, i.hi])


def test_boole_transformer_column_check():
    est = BooleBoundsTransformer().fit(np.full((2, 3), 0.5))
    with pytest.raises(BellscopeError):
        est.transform(np.full((2, 2), 0.5))
