"""scikit-learn compatible wrappers around the bellscope modules.

The estimators follow the usual contract: hyper-parameters are stored
verbatim in ``__init__``, validation happens in ``fit``, and learned state
carries a trailing underscore. Angle inputs are ``(n_samples, 4)`` arrays of
``(a, a', b, b')`` quadruples.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import boole, lhv, quantum
from ._validation import check_angle_array
from .bell_operator import CommutationRegime
from .exceptions import BellscopeError
from .regime_bounds import OptimizerConfig, optimize_bound, verify_ceiling


def _check_seed(random_state) -> int:
    # a generator object would make reports irreproducible
    if random_state is None:
        return 42
    if isinstance(random_state, (int, np.integer)) and not isinstance(random_state, bool):
        return int(random_state)
    raise BellscopeError(f"random_state must be an int seed, got {random_state!r}")


class RegimeBoundOptimizer(BaseEstimator):
    """Search for the largest Bell value attainable in a commutation regime.

    Parameters
    ----------
    regime : {"classical", "tensor", "global"}
    dim : int
        Per-factor dimension for ``"tensor"``, total dimension for ``"global"``.
    restarts, max_iters, initial_step, step_decay, fd_epsilon
        Ascent budget and schedule, see :class:`~bellscope.regime_bounds.OptimizerConfig`.
    observable_class : {"dichotomic", "contraction"}
    random_state : int
        Master seed; restart ``i`` uses the stream ``(random_state, i)``.
    n_jobs : int
        Worker threads for independent restarts. Results do not depend on it.

    Attributes
    ----------
    result_ : BoundResult
    best_value_ : float
    best_observables_ : tuple of Observable
    per_restart_values_ : ndarray
    n_iter_ : int
    ceiling_ : float
    """

    def __init__(self, regime="tensor", dim=2, restarts=64, max_iters=2000, initial_step=0.1,
                 step_decay=0.7, fd_epsilon=1e-5, observable_class="dichotomic", random_state=42,
                 n_jobs=1):
        self.regime = regime
        self.dim = dim
        self.restarts = restarts
        self.max_iters = max_iters
        self.initial_step = initial_step
        self.step_decay = step_decay
        self.fd_epsilon = fd_epsilon
        self.observable_class = observable_class
        self.random_state = random_state
        self.n_jobs = n_jobs

    def config(self) -> OptimizerConfig:
        return OptimizerConfig(
            dim=int(self.dim), restarts=int(self.restarts), max_iters=int(self.max_iters),
            initial_step=float(self.initial_step), step_decay=float(self.step_decay),
            seed=_check_seed(self.random_state), spectrum_class=self.observable_class,
            fd_epsilon=float(self.fd_epsilon), n_jobs=int(self.n_jobs),
        )

    def fit(self, X=None, y=None):
        result = optimize_bound(CommutationRegime(self.regime), self.config())
        self.result_ = result
        self.best_value_ = result.best_value
        self.best_observables_ = result.best_observables
        self.per_restart_values_ = np.asarray(result.per_restart_values)
        self.n_iter_ = result.iterations
        self.ceiling_ = result.ceiling
        return self

    def score(self, X=None, y=None) -> float:
        check_is_fitted(self, "result_")
        return self.best_value_

    def within_ceiling(self) -> bool:
        check_is_fitted(self, "result_")
        return verify_ceiling(self.result_)


class QuantumCHSH(BaseEstimator):
    """CHSH values of a two-particle state for rows of analyzer settings."""

    def __init__(self, state="photon"):
        self.state = state

    def fit(self, X=None, y=None):
        self.state_ = quantum.TwoParticleState.from_name(self.state)
        self.n_features_in_ = 4
        return self

    def transform(self, X) -> np.ndarray:
        """The four signed correlators per row, in combination order."""
        check_is_fitted(self, "state_")
        X = check_angle_array(X)
        out = np.empty_like(X)
        for r, row in enumerate(X):
            settings = quantum.MeasurementSettings.from_sequence(row)
            for c, ((al, be), sign) in enumerate(settings.pairs()):
                out[r, c] = sign * quantum.correlation(self.state_, al, be)
        return out

    def predict(self, X) -> np.ndarray:
        return self.transform(X).sum(axis=1)


class LocalHiddenVariableCHSH(BaseEstimator):
    """CHSH values of a hidden-variable model for rows of analyzer settings."""

    def __init__(self, model="sign-cos", method="quadrature", budget=None, random_state=42):
        self.model = model
        self.method = method
        self.budget = budget
        self.random_state = random_state

    def fit(self, X=None, y=None):
        self.model_ = self.model if isinstance(self.model, lhv.HiddenVariableModel) else lhv.get_model(self.model)
        self.method_ = lhv.Method(self.method)
        self.seed_ = _check_seed(self.random_state)
        self.n_features_in_ = 4
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "model_")
        X = check_angle_array(X)
        return np.array([
            lhv.chsh_value(self.model_, quantum.MeasurementSettings.from_sequence(row),
                           self.method_, self.budget, seed=self.seed_)
            for row in X
        ])


class BooleBoundsTransformer(TransformerMixin, BaseEstimator):
    """Map rows of event probabilities to ``[union_lo, union_hi, inter_lo, inter_hi]``."""

    def fit(self, X, y=None):
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] < 1:
            raise BellscopeError(f"expected a 2-D array of probabilities, got shape {X.shape}")
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "n_features_in_")
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features_in_:
            raise BellscopeError(f"expected {self.n_features_in_} columns, got shape {X.shape}")
        out = np.empty((X.shape[0], 4))
        for r, row in enumerate(X):
            u = boole.union_bounds(row)
            i = boole.intersection_bounds(row)
            out[r] = (u.lo, u.hi, i.lo, i.hi)
        return out
