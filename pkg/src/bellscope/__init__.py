"""bellscope: numerical checks of Bell-type bounds.

Operator limits of the Bell combination under three commutation regimes,
local hidden-variable coincidence simulations, exact two-particle quantum
correlations, and Boole's probability bounds.
"""
__version__ = "0.1.0"

from .bell_operator import (  # noqa: E402
    BellEvaluation,
    BellOperatorInstance,
    CommutationRegime,
    build_bell,
    classify_regime,
    expectation,
    max_expectation,
)
from .hermitian import (  # noqa: E402
    EigenDecomposition,
    Observable,
    SpectrumClass,
    commutator,
    hermitian_eigen,
    spectral_norm,
    tensor,
)
from .regime_bounds import BoundResult, OptimizerConfig, classical_max, optimize_bound, verify_ceiling  # noqa: E402

__all__ = [
    "BellEvaluation",
    "BellOperatorInstance",
    "BooleBoundsTransformer",
    "BoundResult",
    "CommutationRegime",
    "EigenDecomposition",
    "LocalHiddenVariableCHSH",
    "Observable",
    "OptimizerConfig",
    "QuantumCHSH",
    "RegimeBoundOptimizer",
    "SpectrumClass",
    "build_bell",
    "classical_max",
    "classify_regime",
    "commutator",
    "expectation",
    "hermitian_eigen",
    "max_expectation",
    "optimize_bound",
    "spectral_norm",
    "tensor",
    "verify_ceiling",
]

_ESTIMATORS = {"BooleBoundsTransformer", "LocalHiddenVariableCHSH", "QuantumCHSH", "RegimeBoundOptimizer"}


def __getattr__(name):
    # scikit-learn is only imported when an estimator is first requested
    if name in _ESTIMATORS:
        from . import estimators

        return getattr(estimators, name)
    raise AttributeError(f"module 'bellscope' has no attribute {name!r}")
