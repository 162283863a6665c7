"""Two-particle quantum states, correlators and coincidence tables.

Angle quadruples follow the usual experimental listing ``(a, a', b, b')``, and
the combination is

    S = E(a, b) - E(a, b') + E(a', b) + E(a', b')

which is the operator combination ``a1 b1 + a1 b2 + a2 b1 - a2 b2`` with
``a1 = a'``, ``a2 = a``, ``b1 = b``, ``b2 = b'``. With this listing the
textbook optimal settings, ``(0, pi/4, pi/8, 3pi/8)`` for photons and
``(0, pi/2, pi/4, 3pi/4)`` for spins, give ``|S| = 2*sqrt(2)``.

Spin analyzers at angle ``t`` measure ``cos(t) sz + sin(t) sx``; photon
polarizers use the doubled angle ``2t``.
"""
from __future__ import annotations

import csv
import enum
from dataclasses import dataclass

import numpy as np

from ._validation import check_angle
from .bell_operator import BellOperatorInstance, CommutationRegime, build_bell
from .exceptions import BellscopeError
from .hermitian import PAULI_X, PAULI_Z, Observable, tensor

STATE_TOL = 1e-12


class StateKind(str, enum.Enum):
    SPIN_SINGLET = "singlet"
    PHOTON_CASCADE = "photon"


_SQRT_HALF = 1.0 / np.sqrt(2.0)
_VECTORS = {
    StateKind.SPIN_SINGLET: np.array([0.0, _SQRT_HALF, -_SQRT_HALF, 0.0], dtype=np.complex128),
    StateKind.PHOTON_CASCADE: np.array([_SQRT_HALF, 0.0, 0.0, _SQRT_HALF], dtype=np.complex128),
}


@dataclass(frozen=True, eq=False)
class TwoParticleState:
    vector: np.ndarray
    kind: StateKind

    def __post_init__(self):
        vec = np.array(self.vector, dtype=np.complex128).reshape(-1)
        if vec.shape != (4,):
            raise BellscopeError("two-particle state needs 4 amplitudes")
        if abs(np.linalg.norm(vec) - 1.0) > STATE_TOL:
            raise BellscopeError("two-particle state is not normalized")
        vec.setflags(write=False)
        object.__setattr__(self, "vector", vec)
        object.__setattr__(self, "kind", StateKind(self.kind))

    @classmethod
    def singlet(cls) -> "TwoParticleState":
        return cls(_VECTORS[StateKind.SPIN_SINGLET], StateKind.SPIN_SINGLET)

    @classmethod
    def photon_pair(cls) -> "TwoParticleState":
        return cls(_VECTORS[StateKind.PHOTON_CASCADE], StateKind.PHOTON_CASCADE)

    @classmethod
    def from_name(cls, name: str) -> "TwoParticleState":
        try:
            kind = StateKind(name)
        except ValueError:
            raise BellscopeError(f"unknown state {name!r}; choose from {[k.value for k in StateKind]}") from None
        return cls(_VECTORS[kind], kind)


@dataclass(frozen=True)
class MeasurementSettings:
    """Analyzer angles in radians, listed as ``(a, a', b, b')``."""

    a: float
    a_prime: float
    b: float
    b_prime: float

    def __post_init__(self):
        for name in ("a", "a_prime", "b", "b_prime"):
            object.__setattr__(self, name, check_angle(getattr(self, name), name=name))

    @classmethod
    def from_sequence(cls, angles) -> "MeasurementSettings":
        angles = list(angles)
        if len(angles) != 4:
            raise BellscopeError(f"expected 4 angles, got {len(angles)}")
        return cls(*angles)

    def as_tuple(self) -> tuple:
        return (self.a, self.a_prime, self.b, self.b_prime)

    def pairs(self):
        """``((alpha, beta), sign)`` for the four terms of the combination."""
        return (
            ((self.a, self.b), 1.0),
            ((self.a, self.b_prime), -1.0),
            ((self.a_prime, self.b), 1.0),
            ((self.a_prime, self.b_prime), 1.0),
        )

    def operator_labels(self) -> tuple:
        """Angles in the operator order ``(alpha1, alpha2, beta1, beta2)``."""
        return (self.a_prime, self.a, self.b, self.b_prime)

    def shifted(self, offset: float) -> "MeasurementSettings":
        return MeasurementSettings(self.a, self.a_prime, self.b + offset, self.b_prime + offset)


CANONICAL_SETTINGS = {
    StateKind.PHOTON_CASCADE: MeasurementSettings(0.0, np.pi / 4, np.pi / 8, 3 * np.pi / 8),
    StateKind.SPIN_SINGLET: MeasurementSettings(0.0, np.pi / 2, np.pi / 4, 3 * np.pi / 4),
}


def analyzer_matrix(angle: float, kind: StateKind | str = StateKind.SPIN_SINGLET) -> np.ndarray:
    t = check_angle(angle)
    if StateKind(kind) is StateKind.PHOTON_CASCADE:
        t = 2.0 * t
    return np.cos(t) * PAULI_Z + np.sin(t) * PAULI_X


def spin_observable(angle: float, kind: StateKind | str = StateKind.SPIN_SINGLET) -> Observable:
    """Dichotomic analyzer observable; photon contexts double the angle."""
    return Observable(analyzer_matrix(angle, kind))


def correlation(state: TwoParticleState, alpha: float, beta: float) -> float:
    """``<psi| A(alpha) (x) B(beta) |psi>`` by direct contraction."""
    op = tensor(analyzer_matrix(alpha, state.kind), analyzer_matrix(beta, state.kind))
    return float(np.vdot(state.vector, op @ state.vector).real)


def chsh_value(state: TwoParticleState, settings: MeasurementSettings) -> float:
    return float(sum(sign * correlation(state, al, be) for (al, be), sign in settings.pairs()))


def bell_instance(state: TwoParticleState, settings: MeasurementSettings) -> BellOperatorInstance:
    """The tensor-regime Bell operator whose expectation on ``state`` is the CHSH value."""
    obs = [spin_observable(t, state.kind) for t in settings.operator_labels()]
    return build_bell(*obs, CommutationRegime.LOCAL_TENSOR)


@dataclass(frozen=True)
class CoincidenceTable:
    """Outcome probabilities ``(p++, p+-, p-+, p--)`` per analyzer pair."""

    entries: dict

    def correlator(self, alpha: float, beta: float) -> float:
        pp, pm, mp, mm = self.entries[(alpha, beta)]
        return pp - pm - mp + mm

    def marginals(self, alpha: float, beta: float) -> tuple:
        """``(P(A=+), P(B=+))`` for the given analyzer pair."""
        pp, pm, mp, _ = self.entries[(alpha, beta)]
        return pp + pm, pp + mp


def _projector(angle, kind, sign):
    return 0.5 * (np.eye(2) + sign * analyzer_matrix(angle, kind))


def coincidence_table(state: TwoParticleState, settings: MeasurementSettings) -> CoincidenceTable:
    entries = {}
    for (al, be), _ in settings.pairs():
        probs = []
        for sa in (1.0, -1.0):
            for sb in (1.0, -1.0):
                proj = np.kron(_projector(al, state.kind, sa), _projector(be, state.kind, sb))
                probs.append(float(np.vdot(state.vector, proj @ state.vector).real))
        entries[(al, be)] = tuple(probs)
    return CoincidenceTable(entries)


def chsh_from_table(table: CoincidenceTable, settings: MeasurementSettings) -> float:
    return float(sum(sign * table.correlator(al, be) for (al, be), sign in settings.pairs()))


def scan_offsets(start: float, stop: float, step: float) -> np.ndarray:
    if not step > 0.0 or stop < start:
        raise BellscopeError("scan needs step > 0 and stop >= start")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)


def angle_scan(state: TwoParticleState, offsets, settings: MeasurementSettings | None = None):
    """CHSH value as both b-side analyzers are rotated by each offset.

    Returns a list of ``(offset, value)`` pairs in input order.
    """
    offsets = np.asarray(offsets, dtype=float).reshape(-1)
    if offsets.size == 0:
        raise BellscopeError("angle scan needs at least one offset")
    base = settings or CANONICAL_SETTINGS[state.kind]
    return [(float(d), chsh_value(state, base.shifted(float(d)))) for d in offsets]


def write_scan_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["offset_radians", "chsh_value"])
        for offset, value in rows:
            writer.writerow([repr(offset), repr(value)])
