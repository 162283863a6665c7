"""Boole's bounds on union and intersection probabilities.

Given only ``p_i = P(A_i)``::

    max p_i                  <= P(union)        <= min(1, sum p_i)
    max(0, sum p_i - n + 1)  <= P(intersection) <= min p_i

Joint distributions are weight vectors over the ``2**n`` atoms; bit ``i`` of
an atom's index is set when the atom lies inside ``A_i``.
"""
from __future__ import annotations

import csv
import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ._validation import check_probabilities
from .exceptions import BellscopeError

JOINT_TOL = 1e-12
MAX_WITNESS_EVENTS = 20
MAX_ORACLE_EVENTS = 3


class Target(str, enum.Enum):
    UNION_LO = "union_lo"
    UNION_HI = "union_hi"
    INTER_LO = "inter_lo"
    INTER_HI = "inter_hi"


@dataclass(frozen=True)
class BoundsInterval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (0.0 <= self.lo <= self.hi <= 1.0):
            raise BellscopeError(f"invalid probability interval [{self.lo}, {self.hi}]")

    def contains(self, value: float, tol: float = JOINT_TOL) -> bool:
        return self.lo - tol <= value <= self.hi + tol


def _exact_or_float(probs):
    """Keep ``Fraction`` inputs exact; everything else becomes a float list."""
    check_probabilities([float(v) for v in probs] if not np.isscalar(probs) else [float(probs)])
    vals = list(probs) if not np.isscalar(probs) else [probs]
    if all(isinstance(v, Fraction) for v in vals):
        return vals, sum, Fraction(0), Fraction(1)
    return [float(v) for v in vals], math.fsum, 0.0, 1.0


def union_bounds(probs) -> BoundsInterval:
    p, total, _, one = _exact_or_float(probs)
    lo = max(p)
    return BoundsInterval(lo, max(lo, min(one, total(p))))


def intersection_bounds(probs) -> BoundsInterval:
    p, total, zero, one = _exact_or_float(probs)
    hi = min(p)
    return BoundsInterval(min(hi, max(zero, total(p) - len(p) + one)), hi)


def marginals(joint: np.ndarray, n: int) -> np.ndarray:
    idx = np.arange(joint.size)
    return np.array([joint[(idx >> i) & 1 == 1].sum() for i in range(n)])


def union_probability(joint: np.ndarray) -> float:
    return math.fsum(joint[1:])


def intersection_probability(joint: np.ndarray) -> float:
    return float(joint[-1])


@dataclass(frozen=True, eq=False)
class BooleSystem:
    probs: np.ndarray
    joint: np.ndarray | None = None

    def __post_init__(self):
        p = check_probabilities(self.probs)
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)
        if self.joint is not None:
            j = np.asarray(self.joint, dtype=float).reshape(-1)
            if j.size != 2 ** p.size:
                raise BellscopeError(f"joint needs {2 ** p.size} atoms, got {j.size}")
            if np.any(j < 0.0) or abs(j.sum() - 1.0) > JOINT_TOL:
                raise BellscopeError("joint weights must be nonnegative and sum to 1")
            err = np.max(np.abs(marginals(j, p.size) - p))
            if err > JOINT_TOL:
                raise BellscopeError(f"joint does not reproduce the marginals (error {err:.3e})")
            j.setflags(write=False)
            object.__setattr__(self, "joint", j)

    @property
    def n(self) -> int:
        return self.probs.size

    def union_probability(self) -> float:
        self._require_joint()
        return union_probability(self.joint)

    def intersection_probability(self) -> float:
        self._require_joint()
        return intersection_probability(self.joint)

    def _require_joint(self):
        if self.joint is None:
            raise BellscopeError("this system carries no joint distribution")


def _layered_joint(n: int, intervals) -> np.ndarray:
    """Atom weights induced by placing each event on arcs of the unit circle.

    ``intervals[i]`` is a list of ``(start, end)`` pieces inside ``[0, 1]``.
    Arc endpoints are exact fractions, so every atom weight is rounded once.
    """
    cuts = {Fraction(0), Fraction(1)}
    for pieces in intervals:
        for s, e in pieces:
            cuts.update((s, e))
    cuts = sorted(cuts)
    exact = {}
    for left, right in zip(cuts[:-1], cuts[1:]):
        mid = (left + right) / 2
        mask = 0
        for i, pieces in enumerate(intervals):
            if any(s <= mid < e for s, e in pieces):
                mask |= 1 << i
        exact[mask] = exact.get(mask, 0) + (right - left)
    joint = np.zeros(2 ** n)
    for mask, weight in exact.items():
        joint[mask] = float(weight)
    return joint


def _nested(lengths):
    return [[(Fraction(0), length)] for length in lengths]


def _spread(lengths):
    """Consecutive arcs of the given lengths, wrapping around the unit circle."""
    out = []
    start = Fraction(0)
    for length in lengths:
        end = start + length
        if end <= 1:
            out.append([(start, end)])
        else:
            out.append([(start, Fraction(1)), (Fraction(0), end - 1)])
        start = end if end < 1 else end - 1
    return out


def witness(probs, target: Target | str) -> BooleSystem:
    """A joint distribution with marginals ``probs`` that attains ``target``.

    Nested events attain the union lower and intersection upper bounds;
    events spread end to end around a circle attain the union upper bound, and
    spreading the complements instead attains the intersection lower bound.
    """
    target = Target(target)
    p = check_probabilities(probs, max_len=MAX_WITNESS_EVENTS)
    n = p.size
    exact = [Fraction(float(v)) for v in p]
    if target in (Target.UNION_LO, Target.INTER_HI):
        joint = _layered_joint(n, _nested(exact))
    elif target is Target.UNION_HI:
        joint = _layered_joint(n, _spread(exact))
    else:
        comp = _layered_joint(n, _spread([1 - v for v in exact]))
        # complement arcs: atom mask flips to the complementary membership
        joint = comp[::-1].copy()
    return BooleSystem(p, joint)


# --- brute-force oracle -----------------------------------------------------

@lru_cache(maxsize=8)
def _composition_table(n: int, grid: int):
    """Union/intersection extremes over all grid-valued joints, keyed by marginal counts."""
    atoms = 2 ** n
    table = {}
    bits = np.array([[(a >> i) & 1 for i in range(n)] for a in range(atoms)])
    for bars in itertools.combinations(range(grid + atoms - 1), atoms - 1):
        edges = (-1,) + bars + (grid + atoms - 1,)
        weights = np.diff(edges) - 1
        key = tuple(int(v) for v in weights @ bits)
        union = grid - int(weights[0])
        inter = int(weights[-1])
        if key in table:
            ulo, uhi, ilo, ihi = table[key]
            table[key] = (min(ulo, union), max(uhi, union), min(ilo, inter), max(ihi, inter))
        else:
            table[key] = (union, union, inter, inter)
    return table


@dataclass(frozen=True)
class OracleExtremes:
    union: BoundsInterval
    intersection: BoundsInterval


def oracle_extremes(probs, grid_resolution: int = 10, *, include_witnesses: bool = True) -> OracleExtremes:
    """Exhaustive search over joint distributions whose atom weights are multiples of ``1/grid``.

    Each marginal is snapped to the nearest grid point, so the observed extremes
    track the analytic bounds to within the grid spacing. With
    ``include_witnesses`` the analytic witnesses are folded in as well.
    """
    p = check_probabilities(probs)
    if p.size > MAX_ORACLE_EVENTS:
        raise BellscopeError(f"oracle supports at most {MAX_ORACLE_EVENTS} events, got {p.size}")
    if grid_resolution < 10:
        raise BellscopeError("grid_resolution must be >= 10")
    key = tuple(int(round(v * grid_resolution)) for v in p)
    ulo, uhi, ilo, ihi = (v / grid_resolution for v in _composition_table(p.size, grid_resolution)[key])
    if include_witnesses:
        for t in Target:
            sysw = witness(p, t)
            u, i = sysw.union_probability(), sysw.intersection_probability()
            ulo, uhi = min(ulo, u), max(uhi, u)
            ilo, ihi = min(ilo, i), max(ihi, i)
    clip = lambda v: min(1.0, max(0.0, v))  # noqa: E731
    return OracleExtremes(BoundsInterval(clip(ulo), clip(uhi)), BoundsInterval(clip(ilo), clip(ihi)))


# --- CSV I/O ----------------------------------------------------------------

def write_joint_csv(system: BooleSystem, path) -> None:
    system._require_joint()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["atom_bitmask", "weight"])
        for mask, weight in enumerate(system.joint):
            writer.writerow([mask, repr(float(weight))])


def read_joint_csv(path, n: int | None = None) -> BooleSystem:
    """Load atom weights written by :func:`write_joint_csv`.

    The event count is inferred from the largest bitmask unless ``n`` is given;
    marginals are recomputed from the weights.
    """
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or {"atom_bitmask", "weight"} - set(reader.fieldnames):
                raise BellscopeError(f"{path}: header must contain 'atom_bitmask' and 'weight'")
            rows = [(int(r["atom_bitmask"]), float(r["weight"])) for r in reader]
    except (OSError, ValueError, TypeError) as exc:
        raise BellscopeError(f"{path}: malformed joint table ({exc})") from exc
    if not rows:
        raise BellscopeError(f"{path}: no atoms")
    if any(m < 0 for m, _ in rows):
        raise BellscopeError(f"{path}: negative atom bitmask")
    if n is None:
        n = max(1, max(m for m, _ in rows).bit_length())
    joint = np.zeros(2 ** n)
    for mask, weight in rows:
        if mask >= joint.size:
            raise BellscopeError(f"{path}: bitmask {mask} out of range for {n} events")
        joint[mask] += weight
    probs = np.clip(marginals(joint, n), 0.0, 1.0)
    return BooleSystem(probs, joint)
