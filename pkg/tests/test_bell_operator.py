import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bellscope.bell_operator import (
    CommutationRegime,
    EvaluationMode,
    build_bell,
    classify_regime,
    expectation,
    gram_max_eigenvalue,
    max_expectation,
)
from bellscope.exceptions import BellscopeError, RegimeViolationError, ShapeError
from bellscope.hermitian import Observable, tensor

from conftest import I2, SIGMA_X, SIGMA_Z, random_dichotomic, random_hermitian, random_unit

SQRT2 = math.sqrt(2.0)
seeds = st.integers(min_value=0, max_value=2**32 - 1)
SINGLET = np.array([0, 1, -1, 0], dtype=complex) / SQRT2


def canonical():
    a1, a2 = Observable(SIGMA_Z), Observable(SIGMA_X)
    b1 = Observable((SIGMA_Z + SIGMA_X) / SQRT2)
    b2 = Observable((SIGMA_Z - SIGMA_X) / SQRT2)
    return build_bell(a1, a2, b1, b2, CommutationRegime.LOCAL_TENSOR)


def random_local(rng, d=2):
    return [Observable(random_dichotomic(rng, d)) for _ in range(4)]


def test_classical_identities():
    eye = Observable(np.eye(3))
    inst = build_bell(eye, eye, eye, eye, CommutationRegime.CLASSICAL)
    np.testing.assert_allclose(inst.composite, 2 * np.eye(3))
    assert max_expectation(inst).value == pytest.approx(2.0, abs=1e-12)


def test_tensor_all_sigma_z():
    z = Observable(SIGMA_Z)
    inst = build_bell(z, z, z, z, "tensor")
    np.testing.assert_allclose(inst.composite, 2 * tensor(SIGMA_Z, SIGMA_Z))
    assert max_expectation(inst).value == pytest.approx(2.0, abs=1e-12)


def test_tensor_canonical_is_tsirelson():
    ev = max_expectation(canonical())
    assert ev.mode is EvaluationMode.MAX_EIGENVALUE
    assert ev.value == pytest.approx(2 * SQRT2, abs=1e-12)


def test_expectation_examples():
    eye = Observable(np.eye(2))
    inst = build_bell(eye, eye, eye, eye, "classical")
    assert expectation(inst, random_unit(np.random.default_rng(1), 2)).value == pytest.approx(2.0, abs=1e-12)
    assert expectation(canonical(), SINGLET).value == pytest.approx(-2 * SQRT2, abs=1e-12)


def test_expectation_on_top_eigenvector():
    inst = canonical()
    w, v = np.linalg.eigh(inst.composite)
    assert expectation(inst, v[:, -1]).value == pytest.approx(max_expectation(inst).value, abs=1e-9)


def test_expectation_rejects_bad_state():
    inst = canonical()
    with pytest.raises(BellscopeError):
        expectation(inst, np.array([1, 1, 0, 0]))
    with pytest.raises(ShapeError):
        expectation(inst, np.array([1, 0]))


def test_classical_regime_violation():
    z, x = Observable(SIGMA_Z), Observable(SIGMA_X)
    with pytest.raises(RegimeViolationError):
        build_bell(z, x, z, z, CommutationRegime.CLASSICAL)


def test_dimension_mismatch():
    with pytest.raises(ShapeError):
        build_bell(Observable(SIGMA_Z), Observable(np.eye(3)), Observable(SIGMA_Z), Observable(SIGMA_Z), "tensor")
    with pytest.raises(ShapeError):
        build_bell(*(Observable(SIGMA_Z),) * 2, *(Observable(np.eye(3)),) * 2, "global")


def test_classify_commuting_diagonal(rng):
    obs = [Observable(np.diag(rng.choice([-1.0, 1.0], 4))) for _ in range(4)]
    assert classify_regime(*obs, same_space=True) is CommutationRegime.CLASSICAL


def test_classify_local_tensor():
    z, x = Observable(SIGMA_Z), Observable(SIGMA_X)
    assert classify_regime(z, x, z, x, same_space=False) is CommutationRegime.LOCAL_TENSOR


def test_classify_global(rng):
    obs = [Observable(random_hermitian(rng, 4) / 10, "contraction") for _ in range(4)]
    for i in range(4):
        for j in range(i + 1, 4):
            c = obs[i].matrix @ obs[j].matrix - obs[j].matrix @ obs[i].matrix
            assert np.linalg.norm(c, 2) > 1e-10
    assert classify_regime(*obs, same_space=True) is CommutationRegime.GLOBAL


def test_global_composite_is_hermitian(rng):
    obs = [Observable(random_dichotomic(rng, 4)) for _ in range(4)]
    inst = build_bell(*obs, CommutationRegime.GLOBAL)
    np.testing.assert_allclose(inst.composite, inst.composite.conj().T, atol=1e-12)


@given(seeds, st.sampled_from(["tensor", "global"]))
def test_gram_and_norm_ceiling(seed, regime):
    rng = np.random.default_rng(seed)
    d = 2 if regime == "tensor" else 4
    inst = build_bell(*random_local(rng, d), regime)
    assert gram_max_eigenvalue(inst) <= 16 + 1e-9
    assert max_expectation(inst).value <= 4 + 1e-9


@given(seeds)
def test_rayleigh_bound(seed):
    rng = np.random.default_rng(seed)
    inst = build_bell(*random_local(rng), "tensor")
    top = np.max(np.abs(np.linalg.eigvalsh(inst.composite)))
    assert abs(expectation(inst, random_unit(rng, 4)).value) <= top + 1e-12


@given(seeds)
def test_tensor_factor_unitary_invariance(seed):
    rng = np.random.default_rng(seed)
    a1, a2, b1, b2 = random_local(rng)
    q, _ = np.linalg.qr(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
    rot = [Observable(q @ b.matrix @ q.conj().T) for b in (b1, b2)]
    base = build_bell(a1, a2, b1, b2, "tensor")
    moved = build_bell(a1, a2, *rot, "tensor")
    u = tensor(I2, q)
    np.testing.assert_allclose(moved.composite, u @ base.composite @ u.conj().T, atol=1e-12)
    assert abs(max_expectation(moved).value - max_expectation(base).value) < 1e-9


@given(seeds, st.integers(min_value=1, max_value=6))
def test_classical_matches_joint_sign_enumeration(seed, d):
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
    signs = rng.choice([-1.0, 1.0], size=(4, d))
    obs = [Observable((q * s) @ q.conj().T) for s in signs]
    inst = build_bell(*obs, CommutationRegime.CLASSICAL)
    s1, s2, t1, t2 = signs
    brute = np.max(s1 * t1 + s1 * t2 + s2 * t1 - s2 * t2)
    assert abs(max_expectation(inst).value - brute) < 1e-9


@given(seeds)
def test_global_symmetrized_never_beats_two_root_two(seed):
    # Re<a psi, b psi> pairing bounds the symmetrized combination by 2*sqrt(2)
    rng = np.random.default_rng(seed)
    obs = [Observable(random_dichotomic(rng, 4)) for _ in range(4)]
    assert max_expectation(build_bell(*obs, "global")).value <= 2 * SQRT2 + 1e-9
