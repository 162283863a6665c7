"""Dense complex matrix algebra for small Hermitian operators.

Matrices are ``numpy`` complex128 arrays (a pair of float64s per entry) that are
marked read-only once validated. Dimensions are capped at :data:`MAX_DIM`.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from ._validation import MAX_DIM, check_matrix, check_same_dim
from .exceptions import HermiticityError, SizingError, SpectrumError

HERMITIAN_TOL = 1e-12
SPECTRUM_TOL = 1e-9

PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
for _m in (PAULI_X, PAULI_Y, PAULI_Z):
    _m.setflags(write=False)


class SpectrumClass(str, enum.Enum):
    DICHOTOMIC = "dichotomic"
    CONTRACTION = "contraction"


class EigenDecomposition(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def hermitian_defect(M) -> float:
    M = np.asarray(M)
    return float(np.max(np.abs(M - M.conj().T)))


def check_hermitian(M, *, tol: float = HERMITIAN_TOL, name: str = "matrix") -> np.ndarray:
    """Validate ``M`` and require ``max|M - M^dagger| <= tol``; never symmetrizes."""
    arr = check_matrix(M, name=name)
    defect = hermitian_defect(arr)
    if defect > tol:
        raise HermiticityError(f"{name} is not Hermitian (max |M - M^H| = {defect:.3e})")
    return arr


def tensor(A, B, *, max_dim: int = MAX_DIM) -> np.ndarray:
    """Kronecker product; block ``(i, j)`` of the result is ``A[i, j] * B``."""
    A = check_matrix(A, name="A")
    B = check_matrix(B, name="B")
    dim = A.shape[0] * B.shape[0]
    if dim > max_dim:
        raise SizingError(f"tensor product dimension {dim} exceeds cap {max_dim}")
    out = np.kron(A, B)
    out.setflags(write=False)
    return out


def commutator(A, B) -> np.ndarray:
    A = check_matrix(A, name="A")
    B = check_matrix(B, name="B")
    check_same_dim(A, B)
    out = A @ B - B @ A
    out.setflags(write=False)
    return out


def hermitian_eigen(M) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Eigenvalues are returned in ascending order with the eigenvectors as the
    matching columns. The result is deterministic for a fixed input.
    """
    M = check_hermitian(M)
    w, v, _ = _kernels.jacobi_eigh(np.ascontiguousarray(M), True)
    order = np.argsort(w, kind="stable")
    w = w[order]
    v = v[:, order]
    w.setflags(write=False)
    v.setflags(write=False)
    return EigenDecomposition(w, v)


def eigvalsh(M) -> np.ndarray:
    M = check_hermitian(M)
    w, _, _ = _kernels.jacobi_eigh(np.ascontiguousarray(M), False)
    return np.sort(w)


def spectral_norm(M) -> float:
    """Largest singular value; for Hermitian input, the largest ``|eigenvalue|``."""
    M = check_matrix(M)
    if hermitian_defect(M) <= HERMITIAN_TOL:
        w = eigvalsh(M)
    else:
        gram = M.conj().T @ M
        gram = 0.5 * (gram + gram.conj().T)
        w = np.sqrt(np.clip(eigvalsh(gram), 0.0, None))
    return float(np.max(np.abs(w)))


@dataclass(frozen=True, eq=False)
class Observable:
    """A Hermitian measurement operator with a declared spectrum class.

    ``Dichotomic`` observables square to the identity (spectrum in {-1, +1});
    ``Contraction`` observables have spectral norm at most one. Either class
    keeps every expectation value inside [-1, 1].
    """

    matrix: np.ndarray
    spectrum_class: SpectrumClass = SpectrumClass.DICHOTOMIC

    def __post_init__(self):
        mat = check_hermitian(self.matrix, name="observable")
        cls = SpectrumClass(self.spectrum_class)
        w = eigvalsh(mat)
        if cls is SpectrumClass.DICHOTOMIC:
            worst = float(np.max(np.abs(np.abs(w) - 1.0)))
            if worst > SPECTRUM_TOL:
                raise SpectrumError(f"dichotomic observable has eigenvalue off +-1 by {worst:.3e}")
        elif float(np.max(np.abs(w))) > 1.0 + SPECTRUM_TOL:
            raise SpectrumError("contraction observable has spectral norm above 1")
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "spectrum_class", cls)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __repr__(self):
        return f"Observable(dim={self.dim}, spectrum_class={self.spectrum_class.value})"
