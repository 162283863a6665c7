"""The Bell combination as an operator, under three commutation regimes.

``B = a1 b1 + a1 b2 + a2 b1 - a2 b2``

* ``LOCAL_TENSOR`` -- a's act on one factor, b's on the other; products are
  Kronecker products, so every a commutes with every b.
* ``GLOBAL`` -- all four observables share one space and nothing is assumed
  to commute. Products are Jordan-symmetrized, ``(ab + ba) / 2``, so B stays
  Hermitian.
* ``CLASSICAL`` -- one shared space, all six pairs must commute.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import _kernels
from ._validation import check_unit_vector
from .exceptions import BellscopeError, FalsificationError, RegimeViolationError, ShapeError
from .hermitian import (
    HERMITIAN_TOL,
    Observable,
    commutator,
    eigvalsh,
    hermitian_defect,
    spectral_norm,
    tensor,
)

COMMUTE_TOL = 1e-10
NORM_CEILING = 4.0


class CommutationRegime(str, enum.Enum):
    CLASSICAL = "classical"
    LOCAL_TENSOR = "tensor"
    GLOBAL = "global"


class EvaluationMode(str, enum.Enum):
    STATE_EXPECTATION = "state_expectation"
    MAX_EIGENVALUE = "max_eigenvalue"


@dataclass(frozen=True, eq=False)
class BellOperatorInstance:
    a1: Observable
    a2: Observable
    b1: Observable
    b2: Observable
    regime: CommutationRegime
    composite: np.ndarray

    @property
    def dim(self) -> int:
        return self.composite.shape[0]


@dataclass(frozen=True)
class BellEvaluation:
    value: float
    mode: EvaluationMode
    regime: CommutationRegime


def _jordan(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return 0.5 * (a @ b + b @ a)


def _embedded(a1, a2, b1, b2):
    """Operators on the full space: factor-local ones are lifted with identities."""
    da, db = a1.dim, b1.dim
    ia, ib = np.eye(da), np.eye(db)
    return [tensor(a.matrix, ib) for a in (a1, a2)] + [tensor(ia, b.matrix) for b in (b1, b2)]


def _commutator_norms(mats):
    """Spectral norms of all six pairwise commutators, keyed by index pair."""
    return {(i, j): spectral_norm(commutator(mats[i], mats[j])) for i, j in combinations(range(4), 2)}


def build_bell(a1: Observable, a2: Observable, b1: Observable, b2: Observable,
               regime: CommutationRegime | str) -> BellOperatorInstance:
    """Assemble the Bell operator for ``regime``.

    Raises
    ------
    ShapeError
        On inconsistent dimensions (the a's must share one dimension and the
        b's another; outside the tensor regime all four must agree).
    RegimeViolationError
        If ``CLASSICAL`` is requested for operators that do not all commute.
    """
    regime = CommutationRegime(regime)
    if a1.dim != a2.dim or b1.dim != b2.dim:
        raise ShapeError("a1/a2 and b1/b2 must have matching dimensions")
    if regime is CommutationRegime.LOCAL_TENSOR:
        composite = (tensor(a1.matrix, b1.matrix) + tensor(a1.matrix, b2.matrix)
                     + tensor(a2.matrix, b1.matrix) - tensor(a2.matrix, b2.matrix))
    else:
        if a1.dim != b1.dim:
            raise ShapeError(f"{regime.value} regime needs one shared dimension, got {a1.dim} and {b1.dim}")
        mats = [o.matrix for o in (a1, a2, b1, b2)]
        if regime is CommutationRegime.CLASSICAL:
            norms = _commutator_norms(mats)
            bad = {k: v for k, v in norms.items() if v >= COMMUTE_TOL}
            if bad:
                raise RegimeViolationError(f"classical regime requires commuting observables; failing pairs {bad}")
        a1m, a2m, b1m, b2m = mats
        composite = _jordan(a1m, b1m) + _jordan(a1m, b2m) + _jordan(a2m, b1m) - _jordan(a2m, b2m)
    composite = np.ascontiguousarray(composite)
    composite.setflags(write=False)
    if hermitian_defect(composite) > HERMITIAN_TOL:
        raise BellscopeError("assembled Bell operator is not Hermitian")
    norm = spectral_norm(composite)
    if norm > NORM_CEILING + 1e-9:
        raise FalsificationError(f"Bell operator norm {norm!r} exceeds the absolute ceiling 4")
    return BellOperatorInstance(a1, a2, b1, b2, regime, composite)


def classify_regime(a1: Observable, a2: Observable, b1: Observable, b2: Observable,
                    same_space: bool) -> CommutationRegime:
    """Classify four observables by which of their commutators vanish.

    With ``same_space=False`` the a's are lifted to ``a (x) I`` and the b's to
    ``I (x) b`` before testing.
    """
    if a1.dim != a2.dim or b1.dim != b2.dim:
        raise ShapeError("a1/a2 and b1/b2 must have matching dimensions")
    if same_space:
        if a1.dim != b1.dim:
            raise ShapeError("same_space=True needs all four observables on one space")
        mats = [o.matrix for o in (a1, a2, b1, b2)]
    else:
        mats = _embedded(a1, a2, b1, b2)
    norms = _commutator_norms(mats)
    if all(v < COMMUTE_TOL for v in norms.values()):
        return CommutationRegime.CLASSICAL
    cross = [norms[(0, 2)], norms[(0, 3)], norms[(1, 2)], norms[(1, 3)]]
    if all(v < COMMUTE_TOL for v in cross):
        return CommutationRegime.LOCAL_TENSOR
    return CommutationRegime.GLOBAL


def expectation(inst: BellOperatorInstance, state) -> BellEvaluation:
    psi = check_unit_vector(state, inst.dim)
    z = complex(np.vdot(psi, inst.composite @ psi))
    if abs(z.imag) >= 1e-10:
        raise BellscopeError(f"expectation has imaginary part {z.imag:.3e}")
    return BellEvaluation(z.real, EvaluationMode.STATE_EXPECTATION, inst.regime)


def max_expectation(inst: BellOperatorInstance) -> BellEvaluation:
    value = float(eigvalsh(inst.composite)[-1])
    return BellEvaluation(value, EvaluationMode.MAX_EIGENVALUE, inst.regime)


def gram_max_eigenvalue(inst: BellOperatorInstance) -> float:
    """``lambda_max(B^dagger B)``; never above 16 for legal observables."""
    return spectral_norm(inst.composite) ** 2


def kernel_regime(regime: CommutationRegime) -> int:
    return _kernels.REGIME_TENSOR if regime is CommutationRegime.LOCAL_TENSOR else _kernels.REGIME_GLOBAL
