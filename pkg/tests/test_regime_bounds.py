import itertools
import math

import numpy as np
import pytest

from bellscope import _kernels
from bellscope.bell_operator import CommutationRegime, build_bell, max_expectation
from bellscope.exceptions import BellscopeError
from bellscope.hermitian import SpectrumClass
from bellscope.regime_bounds import (
    BoundResult,
    OptimizerConfig,
    classical_max,
    optimize_bound,
    verify_ceiling,
)

TSIRELSON = 2 * math.sqrt(2)


def test_classical_max_is_two():
    res = classical_max()
    assert res.best_value == 2.0
    s1, s2, t1, t2 = res.witness_signs
    assert s1 * t1 + s1 * t2 + s2 * t1 - s2 * t2 == 2


def test_classical_witness_all_plus():
    assert classical_max().witness_signs == (1, 1, 1, 1)


def test_sign_enumeration_range():
    values = [s1 * t1 + s1 * t2 + s2 * t1 - s2 * t2
              for s1, s2, t1, t2 in itertools.product((1, -1), repeat=4)]
    assert len(values) == 16 and min(values) == -2 and max(values) == 2


def test_optimize_classical_delegates():
    res = optimize_bound("classical")
    assert abs(res.best_value - classical_max().best_value) < 1e-9
    assert res.regime is CommutationRegime.CLASSICAL


@pytest.fixture(scope="module")
def tensor_run():
    return optimize_bound("tensor", OptimizerConfig(dim=2, restarts=8, seed=3))


def test_tensor_reaches_tsirelson(tensor_run):
    assert TSIRELSON - 1e-3 <= tensor_run.best_value <= TSIRELSON + 1e-6
    assert tensor_run.best_value == max(tensor_run.per_restart_values)
    assert verify_ceiling(tensor_run)


def test_tensor_witnesses_reproduce_value(tensor_run):
    obs = tensor_run.best_observables
    assert all(o.spectrum_class is SpectrumClass.DICHOTOMIC for o in obs)
    for o in obs:
        np.testing.assert_allclose(o.matrix @ o.matrix, np.eye(2), atol=1e-9)
    inst = build_bell(*obs, CommutationRegime.LOCAL_TENSOR)
    assert max_expectation(inst).value == pytest.approx(tensor_run.best_value, abs=1e-9)


def test_gram_ceiling_tracked(tensor_run):
    assert 0 < tensor_run.max_gram_eigenvalue <= 16 + 1e-9


def test_determinism_and_threads():
    cfg = OptimizerConfig(dim=2, restarts=4, seed=11, max_iters=300)
    a = optimize_bound("tensor", cfg)
    b = optimize_bound("tensor", cfg)
    c = optimize_bound("tensor", OptimizerConfig(dim=2, restarts=4, seed=11, max_iters=300, n_jobs=3))
    assert a.per_restart_values == b.per_restart_values == c.per_restart_values
    assert a.iterations == c.iterations


def test_different_seeds_differ():
    a = optimize_bound("tensor", OptimizerConfig(dim=2, restarts=2, seed=1, max_iters=5))
    b = optimize_bound("tensor", OptimizerConfig(dim=2, restarts=2, seed=2, max_iters=5))
    assert a.per_restart_values != b.per_restart_values


def test_iteration_cap_returns_best_so_far():
    res = optimize_bound("tensor", OptimizerConfig(dim=2, restarts=2, max_iters=1))
    assert res.iterations == 2
    assert len(res.per_restart_values) == 2


def test_contraction_class_stays_legal():
    res = optimize_bound("tensor", OptimizerConfig(dim=2, restarts=4, seed=5, spectrum_class="contraction"))
    assert res.best_value <= TSIRELSON + 1e-6
    for o in res.best_observables:
        assert o.spectrum_class is SpectrumClass.CONTRACTION
        assert np.max(np.abs(np.linalg.eigvalsh(o.matrix))) <= 1 + 1e-9


def test_parameterized_observables_are_legal():
    rng = np.random.default_rng(0)
    for d in (2, 3, 4):
        for contraction in (False, True):
            x = 3 * rng.standard_normal(_kernels.n_params(d, contraction))
            m = _kernels.observable_from_params(x, d, contraction)
            w = np.linalg.eigvalsh(m)
            np.testing.assert_allclose(m, m.conj().T, atol=1e-12)
            if contraction:
                assert np.all(np.abs(w) <= 1 + 1e-9)
            else:
                np.testing.assert_allclose(np.abs(w), 1, atol=1e-9)


def test_global_small_run_respects_ceilings():
    res = optimize_bound("global", OptimizerConfig(dim=2, restarts=4, seed=9))
    assert res.best_value <= 2 * math.sqrt(3) + 1e-6
    # Jordan-symmetrized products pair a|psi> with b|psi>, which caps the value at 2*sqrt(2)
    assert res.best_value <= TSIRELSON + 1e-9
    assert res.max_gram_eigenvalue <= 16 + 1e-9


@pytest.mark.parametrize("kwargs", [
    dict(restarts=0), dict(max_iters=0), dict(step_decay=1.0), dict(step_decay=0.0),
    dict(fd_epsilon=0.0), dict(initial_step=-1.0), dict(n_jobs=0),
])
def test_config_validation(kwargs):
    with pytest.raises(BellscopeError):
        OptimizerConfig(**kwargs)


def test_invalid_dims():
    with pytest.raises(BellscopeError):
        optimize_bound("tensor", OptimizerConfig(dim=1))
    with pytest.raises(BellscopeError):
        optimize_bound("tensor", OptimizerConfig(dim=9))
    with pytest.raises(BellscopeError):
        optimize_bound("global", OptimizerConfig(dim=65))


def _result(regime, value):
    return BoundResult(value, regime, (), (value,), 0, 0.0)


def test_verify_ceiling_examples():
    assert verify_ceiling(_result(CommutationRegime.CLASSICAL, 2.0))
    assert verify_ceiling(_result(CommutationRegime.LOCAL_TENSOR, 2.8284))
    assert not verify_ceiling(_result(CommutationRegime.GLOBAL, 3.60))
    assert not verify_ceiling(_result(CommutationRegime.CLASSICAL, 2.01))
