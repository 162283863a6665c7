"""Local hidden-variable coincidence experiments.

A model pairs two local response functions ``a(lam, alpha)``, ``b(lam, beta)``
with values in [-1, 1] and a density over ``lam`` in ``[0, 2*pi)``. The
correlator is ``P(alpha, beta) = integral a(lam, alpha) b(lam, beta) rho(lam)``.

Quadrature uses the periodic composite rule on midpoint-shifted nodes
``lam_k = (k + 1/2) * 2*pi / n`` so that sign-function jumps at multiples of
``pi/2`` never land on a node.
"""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._validation import check_angle, check_budget
from .exceptions import BellscopeError
from .quantum import MeasurementSettings

TWO_PI = 2.0 * math.pi
VALIDATION_GRID = 1024
DENSITY_NODES = 4096
DEFAULT_NODES = 4096
DEFAULT_SAMPLES = 1_000_000
MC_CHUNK = 1 << 16


class Method(str, enum.Enum):
    QUADRATURE = "quadrature"
    MONTE_CARLO = "montecarlo"


def _uniform_density(lam):
    return np.full_like(np.asarray(lam, dtype=float), 1.0 / TWO_PI)


@dataclass(frozen=True)
class HiddenVariableModel:
    """Response functions and hidden-variable density.

    ``response_a`` and ``response_b`` take ``(lam: ndarray, angle: float)`` and
    return an array of the same shape. ``sampler(rng, n)`` draws ``lam`` values
    from the density; when omitted an inverse-CDF table is used.
    """

    response_a: Callable
    response_b: Callable
    name: str
    density: Callable = _uniform_density
    sampler: Callable | None = None

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.sampler is not None:
            return self.sampler(rng, n)
        if self.density is _uniform_density:
            return rng.uniform(0.0, TWO_PI, n)
        grid = (np.arange(DENSITY_NODES) + 0.5) * (TWO_PI / DENSITY_NODES)
        cdf = np.concatenate([[0.0], np.cumsum(self.density(grid)) * (TWO_PI / DENSITY_NODES)])
        edges = np.linspace(0.0, TWO_PI, DENSITY_NODES + 1)
        return np.interp(rng.uniform(0.0, cdf[-1], n), cdf, edges)


def validate_model(model: HiddenVariableModel, angles=(0.0,)) -> None:
    """Spot-check response bounds on a 1024-point grid and the density's normalization."""
    lam = np.arange(VALIDATION_GRID) * (TWO_PI / VALIDATION_GRID)
    for angle in angles:
        for resp, side in ((model.response_a, "a"), (model.response_b, "b")):
            vals = np.asarray(resp(lam, angle), dtype=float)
            if not np.all(np.isfinite(vals)) or np.max(np.abs(vals)) > 1.0:
                raise BellscopeError(f"model {model.name!r}: response {side} leaves [-1, 1] at angle {angle}")
    nodes = (np.arange(DENSITY_NODES) + 0.5) * (TWO_PI / DENSITY_NODES)
    rho = np.asarray(model.density(nodes), dtype=float)
    if np.any(rho < 0.0) or not np.all(np.isfinite(rho)):
        raise BellscopeError(f"model {model.name!r}: density must be finite and nonnegative")
    total = float(np.sum(rho) * (TWO_PI / DENSITY_NODES))
    if abs(total - 1.0) > 1e-6:
        raise BellscopeError(f"model {model.name!r}: density integrates to {total!r}, not 1")


@dataclass(frozen=True)
class CorrelationEstimate:
    value: float
    method: Method
    budget: int
    stderr: float = 0.0


def _nodes(budget):
    lam = (np.arange(budget) + 0.5) * (TWO_PI / budget)
    return lam, TWO_PI / budget


def _quadrature(model, alpha, beta, budget):
    lam, h = _nodes(budget)
    integrand = model.response_a(lam, alpha) * model.response_b(lam, beta) * model.density(lam)
    return float(np.sum(integrand) * h)


def _monte_carlo(model, alpha, beta, samples, seed, stream):
    total = 0.0
    total_sq = 0.0
    done = 0
    chunk_index = 0
    while done < samples:
        n = min(MC_CHUNK, samples - done)
        rng = np.random.default_rng([seed, stream, chunk_index])
        lam = model.sample(rng, n)
        prod = model.response_a(lam, alpha) * model.response_b(lam, beta)
        total += float(np.sum(prod))
        total_sq += float(np.sum(prod * prod))
        done += n
        chunk_index += 1
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0) * samples / (samples - 1)
    return mean, math.sqrt(var / samples)


def correlation(model: HiddenVariableModel, alpha: float, beta: float,
                method: Method | str = Method.QUADRATURE, budget: int | None = None,
                *, seed: int = 42, stream: int = 0) -> CorrelationEstimate:
    """Estimate ``P(alpha, beta)``.

    ``budget`` is the node count for quadrature and the sample count for
    Monte Carlo. Monte Carlo chunk ``c`` draws from ``default_rng([seed,
    stream, c])``, so the estimate does not depend on how chunks are scheduled.
    """
    method = Method(method)
    alpha, beta = check_angle(alpha), check_angle(beta)
    if budget is None:
        budget = DEFAULT_NODES if method is Method.QUADRATURE else DEFAULT_SAMPLES
    budget = check_budget(budget)
    validate_model(model, (alpha, beta))
    if method is Method.QUADRATURE:
        return CorrelationEstimate(_quadrature(model, alpha, beta, budget), method, budget)
    value, stderr = _monte_carlo(model, alpha, beta, budget, seed, stream)
    return CorrelationEstimate(value, method, budget, stderr)


@dataclass(frozen=True)
class CHSHEstimate:
    value: float
    correlations: tuple
    stderr: float


def chsh_estimate(model: HiddenVariableModel, settings: MeasurementSettings,
                  method: Method | str = Method.QUADRATURE, budget: int | None = None,
                  *, seed: int = 42) -> CHSHEstimate:
    """Combine four correlators as ``E(a,b) - E(a,b') + E(a',b) + E(a',b')``.

    Each pair gets its own Monte Carlo stream; the aggregate standard error is
    the root-sum-square of the four.
    """
    estimates = []
    value = 0.0
    for stream, ((al, be), sign) in enumerate(settings.pairs()):
        est = correlation(model, al, be, method, budget, seed=seed, stream=stream)
        estimates.append(est)
        value += sign * est.value
    stderr = math.sqrt(sum(e.stderr ** 2 for e in estimates))
    return CHSHEstimate(value, tuple(estimates), stderr)


def chsh_value(model: HiddenVariableModel, settings: MeasurementSettings,
               method: Method | str = Method.QUADRATURE, budget: int | None = None,
               *, seed: int = 42) -> float:
    return chsh_estimate(model, settings, method, budget, seed=seed).value


def zero_expression_audit(model: HiddenVariableModel, settings: MeasurementSettings,
                          budget: int = DEFAULT_NODES) -> float:
    """Quadrature of ``a1 b1 a2 b2 - a1 b2 a2 b1``; scalar responses make it vanish node by node."""
    budget = check_budget(budget)
    al1, al2, be1, be2 = settings.operator_labels()
    validate_model(model, (al1, al2, be1, be2))
    lam, h = _nodes(budget)
    a1, a2 = model.response_a(lam, al1), model.response_a(lam, al2)
    b1, b2 = model.response_b(lam, be1), model.response_b(lam, be2)
    integrand = (a1 * b1 * a2 * b2 - a1 * b2 * a2 * b1) * model.density(lam)
    return float(np.sum(integrand) * h)


def interchange_gap(model: HiddenVariableModel, alpha: float, beta1: float, beta2: float,
                    budget: int = DEFAULT_NODES) -> float:
    """``|P(alpha, beta1) - P(alpha, beta2)|``, zero only if the model ignores the b setting."""
    p1 = correlation(model, alpha, beta1, Method.QUADRATURE, budget).value
    p2 = correlation(model, alpha, beta2, Method.QUADRATURE, budget).value
    return abs(p1 - p2)


def bell_difference_decomposition(model: HiddenVariableModel, alpha1: float, beta1: float,
                                  beta2: float, budget: int = DEFAULT_NODES) -> tuple:
    """``(P(a1,b1) - P(a1,b2), integral a1 (b1 - b2) rho)``: one integral split two ways."""
    lhs = (correlation(model, alpha1, beta1, Method.QUADRATURE, budget).value
           - correlation(model, alpha1, beta2, Method.QUADRATURE, budget).value)
    lam, h = _nodes(budget)
    rhs = float(np.sum(model.response_a(lam, alpha1)
                       * (model.response_b(lam, beta1) - model.response_b(lam, beta2))
                       * model.density(lam)) * h)
    return lhs, rhs


# --- built-in catalog -------------------------------------------------------

def _sign(x):
    return np.where(x >= 0.0, 1.0, -1.0)


def sign_cos_model() -> HiddenVariableModel:
    """Deterministic outcomes ``sgn cos(lam - alpha)`` and ``-sgn cos(lam - beta)``."""
    return HiddenVariableModel(
        response_a=lambda lam, t: _sign(np.cos(lam - t)),
        response_b=lambda lam, t: -_sign(np.cos(lam - t)),
        name="sign-cos",
    )


def constant_model() -> HiddenVariableModel:
    return HiddenVariableModel(
        response_a=lambda lam, t: np.ones_like(lam),
        response_b=lambda lam, t: np.ones_like(lam),
        name="constant",
    )


def smooth_cos_model() -> HiddenVariableModel:
    """Graded responses ``cos(lam - alpha)`` and ``-cos(lam - beta)``; ``P = -cos(alpha - beta) / 2``."""
    return HiddenVariableModel(
        response_a=lambda lam, t: np.cos(lam - t),
        response_b=lambda lam, t: -np.cos(lam - t),
        name="smooth-cos",
    )


BUILTIN_MODELS = {
    "sign-cos": sign_cos_model,
    "constant": constant_model,
    "smooth-cos": smooth_cos_model,
}


def get_model(name: str) -> HiddenVariableModel:
    try:
        return BUILTIN_MODELS[name]()
    except KeyError:
        raise BellscopeError(f"unknown model {name!r}; choose from {sorted(BUILTIN_MODELS)}") from None


# --- CSV response tables ----------------------------------------------------

class StepResponse:
    """Piecewise-constant response read from ``(lambda, response)`` rows.

    The value at ``lam`` is the response of the last row whose ``lambda`` is at
    or below ``(lam - angle) mod 2*pi``, wrapping to the final row before the
    first breakpoint.
    """

    def __init__(self, breakpoints, values):
        self.breakpoints = np.asarray(breakpoints, dtype=float)
        self.values = np.asarray(values, dtype=float)

    def __call__(self, lam, angle):
        shifted = np.mod(np.asarray(lam, dtype=float) - angle, TWO_PI)
        idx = np.searchsorted(self.breakpoints, shifted, side="right") - 1
        return self.values[idx]  # idx == -1 wraps to the last row


def read_response_csv(path) -> StepResponse:
    """Load a response table with header ``lambda,response``.

    Raises
    ------
    BellscopeError
        On a missing header, unparsable or unsorted rows, breakpoints outside
        ``[0, 2*pi)`` or responses outside ``[-1, 1]``.
    """
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or {"lambda", "response"} - set(reader.fieldnames):
                raise BellscopeError(f"{path}: header must contain 'lambda' and 'response'")
            rows = [(float(r["lambda"]), float(r["response"])) for r in reader]
    except (OSError, ValueError, TypeError) as exc:
        raise BellscopeError(f"{path}: malformed response table ({exc})") from exc
    if not rows:
        raise BellscopeError(f"{path}: response table is empty")
    lam = np.array([r[0] for r in rows])
    resp = np.array([r[1] for r in rows])
    if not (np.all(np.isfinite(lam)) and np.all(np.isfinite(resp))):
        raise BellscopeError(f"{path}: non-finite entries")
    if np.any(lam < 0.0) or np.any(lam >= TWO_PI) or np.any(np.diff(lam) <= 0.0):
        raise BellscopeError(f"{path}: lambda values must be strictly increasing in [0, 2*pi)")
    if np.any(np.abs(resp) > 1.0):
        raise BellscopeError(f"{path}: responses must lie in [-1, 1]")
    return StepResponse(lam, resp)


def model_from_csv(path_a, path_b=None, name: str | None = None) -> HiddenVariableModel:
    """Model with uniform density; side b reuses side a's table unless ``path_b`` is given."""
    resp_a = read_response_csv(path_a)
    resp_b = read_response_csv(path_b) if path_b is not None else resp_a
    return HiddenVariableModel(resp_a, resp_b, name or f"csv:{path_a}")
