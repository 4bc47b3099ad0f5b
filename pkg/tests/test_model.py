import math

import numpy as np
import pytest

from unruhbell.linalg import InvalidInputError, hermitian_eigen, partial_trace
from unruhbell.model import (
    DensityMatrix,
    ModelParams,
    Pair,
    reduced_state,
    reduced_state_by_trace,
    tripartite_state,
    unruh_angle,
)

PAIRS = list(Pair)


def test_unruh_angle_limits():
    assert unruh_angle(1e12) == pytest.approx(math.pi / 4, abs=1e-6)
    assert unruh_angle(1e-3) < 1e-6
    assert unruh_angle(2 * math.pi / math.log(3)) == pytest.approx(math.pi / 6, abs=1e-14)


def test_unruh_angle_physical_units():
    a = 2 * math.pi * 3.0 * 2.0 / math.log(3)
    assert unruh_angle(a, omega=3.0, light_speed=2.0) == pytest.approx(math.pi / 6, abs=1e-14)


def test_unruh_angle_monotone():
    vals = [unruh_angle(a) for a in np.logspace(-2, 3, 50)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("args", [(0.0,), (-1.0,), (1.0, 0.0), (1.0, 1.0, -2.0), (float("inf"),), (float("nan"),)])
def test_unruh_angle_rejects_bad_input(args):
    with pytest.raises(InvalidInputError):
        unruh_angle(*args)


def test_model_params_range():
    with pytest.raises(InvalidInputError):
        ModelParams(-0.1, 0.0)
    with pytest.raises(InvalidInputError):
        ModelParams(0.0, 2.0)


def test_tripartite_state_cases():
    np.testing.assert_allclose(tripartite_state(ModelParams(0, 0)).amplitudes, np.eye(8)[0], atol=1e-16)
    for th in (0.0, 0.4, math.pi / 2):
        np.testing.assert_allclose(tripartite_state(ModelParams(math.pi / 2, th)).amplitudes, np.eye(8)[6], atol=1e-16)
    amp = tripartite_state(ModelParams(math.pi / 4, math.pi / 4)).amplitudes
    np.testing.assert_allclose(amp, [0.5, 0, 0, 0.5, 0, 0, 1 / math.sqrt(2), 0], atol=1e-15)


def test_reduced_state_examples():
    ai = reduced_state(ModelParams(math.pi / 4, 0), "ai").mat
    expected = np.zeros((4, 4))
    expected[np.ix_([0, 3], [0, 3])] = 0.5
    np.testing.assert_allclose(ai, expected, atol=1e-15)

    ai = reduced_state(ModelParams(math.pi / 4, math.pi / 4), "ai").mat
    assert ai[0, 0].real == pytest.approx(0.25, abs=1e-15)
    assert ai[0, 3].real == pytest.approx(math.sqrt(2) / 4, abs=1e-15)

    aii = reduced_state(ModelParams(math.pi / 4, 0), "aii").mat
    np.testing.assert_allclose(aii, np.diag([0.5, 0, 0.5, 0]), atol=1e-15)


def test_closed_form_matches_trace_down(rng):
    for _ in range(100):
        p = ModelParams(*rng.uniform(0, math.pi / 2, 2))
        for pair in PAIRS:
            closed = reduced_state(p, pair)
            traced = reduced_state_by_trace(p, pair)
            assert np.max(np.abs(closed.mat - traced.mat)) < 1e-12


def test_reduced_states_are_valid(rng):
    for _ in range(100):
        p = ModelParams(*rng.uniform(0, math.pi / 2, 2))
        for pair in PAIRS:
            m = reduced_state(p, pair).mat
            assert np.max(np.abs(m - m.conj().T)) < 1e-10
            assert abs(np.trace(m) - 1) < 1e-10
            assert hermitian_eigen(m).eigenvalues[0] >= -1e-10


def test_marginal_consistency(rng):
    for _ in range(50):
        p = ModelParams(*rng.uniform(0, math.pi / 2, 2))
        rho_a1 = partial_trace(reduced_state(p, "ai").mat, [2, 2], {0})
        rho_a2 = partial_trace(reduced_state(p, "aii").mat, [2, 2], {0})
        assert np.max(np.abs(rho_a1 - rho_a2)) < 1e-12


def test_tripartite_norm(rng):
    for _ in range(50):
        amp = tripartite_state(ModelParams(*rng.uniform(0, math.pi / 2, 2))).amplitudes
        assert abs(np.linalg.norm(amp) - 1) < 1e-12


def test_density_matrix_validation():
    with pytest.raises(InvalidInputError):
        DensityMatrix(np.diag([0.5, 0.6]))
    with pytest.raises(InvalidInputError):
        DensityMatrix(np.diag([1.5, -0.5]))
    with pytest.raises(InvalidInputError):
        DensityMatrix(np.array([[0.5, 0.1], [0.2, 0.5]]))
    rho = DensityMatrix(np.eye(4) / 4)
    assert rho.dims == (2, 2)
    with pytest.raises(ValueError):
        rho.mat[0, 0] = 1


def test_pair_parse():
    assert Pair.parse("AII") is Pair.AII
    with pytest.raises(InvalidInputError):
        Pair.parse("ab")
