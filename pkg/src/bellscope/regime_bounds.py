"""Maximize the Bell value within each commutation regime.

The tensor and global regimes are searched by multi-start ascent on the
largest eigenvalue of ``B``. Each observable is parameterized as
``V diag(eigs) V^dagger`` with ``V = exp(G)`` for an anti-Hermitian generator
``G``, so every iterate is a legal observable by construction. Dichotomic
observables use a fixed balanced sign pattern; contraction observables carry
their eigenvalues as extra parameters, clamped into [-1, 1] after each step.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _kernels
from .bell_operator import CommutationRegime, kernel_regime
from .exceptions import BellscopeError
from .hermitian import Observable, SpectrumClass

CEILINGS = {
    CommutationRegime.CLASSICAL: 2.0,
    CommutationRegime.LOCAL_TENSOR: 2.0 * math.sqrt(2.0),
    CommutationRegime.GLOBAL: 2.0 * math.sqrt(3.0),
}
CEILING_TOL = 1e-6
MIN_STEP = 1e-9


@dataclass(frozen=True)
class OptimizerConfig:
    """Search budget and schedule.

    ``dim`` is the per-factor dimension in the tensor regime and the total
    dimension in the global regime; it is ignored for the classical regime.
    """

    dim: int = 2
    restarts: int = 64
    max_iters: int = 2000
    initial_step: float = 0.1
    step_decay: float = 0.7
    seed: int = 42
    spectrum_class: SpectrumClass = SpectrumClass.DICHOTOMIC
    fd_epsilon: float = 1e-5
    n_jobs: int = 1

    def __post_init__(self):
        object.__setattr__(self, "spectrum_class", SpectrumClass(self.spectrum_class))
        if self.restarts < 1:
            raise BellscopeError("restarts must be >= 1")
        if self.max_iters < 1:
            raise BellscopeError("max_iters must be >= 1")
        if not 0.0 < self.step_decay < 1.0:
            raise BellscopeError("step_decay must lie in (0, 1)")
        if not self.fd_epsilon > 0.0:
            raise BellscopeError("fd_epsilon must be positive")
        if not self.initial_step > 0.0:
            raise BellscopeError("initial_step must be positive")
        if self.n_jobs < 1:
            raise BellscopeError("n_jobs must be >= 1")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["spectrum_class"] = self.spectrum_class.value
        return d


@dataclass(frozen=True)
class BoundResult:
    best_value: float
    regime: CommutationRegime
    best_observables: tuple
    per_restart_values: tuple
    iterations: int
    max_gram_eigenvalue: float
    witness_signs: tuple | None = field(default=None)

    @property
    def ceiling(self) -> float:
        return CEILINGS[self.regime]


def _chsh_signs(s1, s2, t1, t2):
    return s1 * t1 + s1 * t2 + s2 * t1 - s2 * t2


def classical_max() -> BoundResult:
    """Enumerate all 16 joint sign assignments of commuting dichotomic observables."""
    best, witness = -math.inf, None
    values = []
    for signs in itertools.product((1, -1), repeat=4):
        v = _chsh_signs(*signs)
        values.append(v)
        if v > best:
            best, witness = v, signs
    observables = tuple(Observable(np.array([[s]], dtype=complex)) for s in witness)
    return BoundResult(
        best_value=float(best),
        regime=CommutationRegime.CLASSICAL,
        best_observables=observables,
        per_restart_values=(float(best),),
        iterations=len(values),
        max_gram_eigenvalue=float(max(v * v for v in values)),
        witness_signs=witness,
    )


def _run_restart(index: int, regime: CommutationRegime, cfg: OptimizerConfig):
    contraction = cfg.spectrum_class is SpectrumClass.CONTRACTION
    m = _kernels.n_params(cfg.dim, contraction)
    rng = np.random.default_rng([cfg.seed, index])
    x0 = rng.standard_normal(4 * m)
    return _kernels.ascend(
        x0, cfg.dim, contraction, kernel_regime(regime),
        cfg.max_iters, cfg.initial_step, cfg.step_decay, cfg.fd_epsilon, MIN_STEP,
    )


def optimize_bound(regime: CommutationRegime | str, cfg: OptimizerConfig | None = None) -> BoundResult:
    """Multi-start ascent of ``lambda_max(B)`` over observables in ``regime``.

    Restart ``i`` draws its starting generators from ``default_rng([seed, i])``,
    and results are reduced in restart order, so serial and threaded runs
    (``cfg.n_jobs > 1``) return identical values. Hitting ``max_iters`` is not
    an error: the best point found so far is returned.
    """
    regime = CommutationRegime(regime)
    cfg = cfg or OptimizerConfig()
    if regime is CommutationRegime.CLASSICAL:
        return classical_max()
    if cfg.dim < 2:
        raise BellscopeError(f"{regime.value} regime requires dim >= 2, got {cfg.dim}")
    total = cfg.dim * cfg.dim if regime is CommutationRegime.LOCAL_TENSOR else cfg.dim
    if total > 64:
        raise BellscopeError(f"Bell operator dimension {total} exceeds cap 64")

    indices = range(cfg.restarts)
    if cfg.n_jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.n_jobs) as pool:
            runs = list(pool.map(lambda i: _run_restart(i, regime, cfg), indices))
    else:
        runs = [_run_restart(i, regime, cfg) for i in indices]

    values = tuple(float(r[1]) for r in runs)
    best_idx = int(np.argmax(values))
    x_best = runs[best_idx][0]
    contraction = cfg.spectrum_class is SpectrumClass.CONTRACTION
    m = _kernels.n_params(cfg.dim, contraction)
    observables = tuple(
        Observable(_kernels.observable_from_params(x_best[k * m:(k + 1) * m], cfg.dim, contraction),
                   cfg.spectrum_class)
        for k in range(4)
    )
    return BoundResult(
        best_value=values[best_idx],
        regime=regime,
        best_observables=observables,
        per_restart_values=values,
        iterations=int(sum(r[2] for r in runs)),
        max_gram_eigenvalue=float(max(r[3] for r in runs)),
    )


def verify_ceiling(result: BoundResult) -> bool:
    """True iff ``best_value`` respects the regime's stated limit (2, 2*sqrt2, 2*sqrt3)."""
    return result.best_value <= CEILINGS[result.regime] + CEILING_TOL
