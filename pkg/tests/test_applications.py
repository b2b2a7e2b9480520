import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import grover_success
from qcosamp.applications import (AmplificationProblem, amplify_unknown, amplitude_amplify,
                                  branch_state, compare_states, comparison_circuit,
                                  comparison_formula, grover_prediction, integrate,
                                  optimal_iterations)
from qcosamp.builder import constant_encode
from qcosamp.errors import ValidationError
from qcosamp.fourier import fcosamp_eval
from qcosamp.spec import ConstantData, Direct, Steerable, single
from qcosamp.statevec import Circuit, hadamard


def _random_state(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


@pytest.mark.parametrize("qubits", [2, 3, 5])
def test_integral_of_one_leaf_is_pi(qubits):
    r = integrate(single(1, 0.4, -1.1, Steerable(qubits)))
    assert r.probability == pytest.approx(0.5, abs=1e-12)
    assert r.integral == pytest.approx(np.pi, abs=1e-11)
    assert r.points == 1 << qubits


def test_integration_constant_data_matches_grid_mean():
    xs = (0.1, 0.5, -2.0, 3.0)
    spec = single(3, 0.2, 0.9, ConstantData(xs, 2))
    r = integrate(spec)
    mean = fcosamp_eval(spec.with_argument(Direct(0.0)), np.array(xs)).mean()
    assert r.probability == pytest.approx(mean, abs=1e-12)
    assert r.grid_mean == pytest.approx(mean, abs=1e-12)


def test_integration_rejects_direct_argument():
    with pytest.raises(ValidationError):
        integrate(single(1, 0, 0))


@pytest.mark.parametrize("seed", range(4))
@pytest.mark.parametrize("dim", [1, 2, 8])
def test_compare_matches_formula(seed, dim):
    rng = np.random.default_rng(seed)
    w, y = _random_state(rng, dim), _random_state(rng, dim)
    assert compare_states(w, y) == pytest.approx(comparison_formula(w, y), abs=1e-12)
    assert compare_states(w, y) == pytest.approx(1 - np.linalg.norm(w - y) ** 2 / 8, abs=1e-12)


def test_compare_identical_and_opposite():
    v = np.array([1, 1j]) / np.sqrt(2)
    assert compare_states(v, v) == pytest.approx(1.0)
    assert compare_states(v, -v) == pytest.approx(0.5)


def test_compare_circuits_embed_controlled_preparations():
    a = constant_encode((0.3, 1.2, -0.4, 2.0), 2, (0, 1))
    b = constant_encode((0.0, 0.9, 1.4, -3.0), 2, (0, 1))
    from qcosamp.statevec import simulate
    w, y = simulate(a).amplitudes, simulate(b).amplitudes
    assert compare_states(a, b) == pytest.approx(comparison_formula(w, y), abs=1e-12)
    assert comparison_circuit(a, b).qubit_count == 4


def test_branch_state_shape():
    s = branch_state(np.array([1, 0]), np.array([0, 1]))
    assert s.qubit_count == 3
    assert np.linalg.norm(s.amplitudes) == pytest.approx(1.0)
    with pytest.raises(ValidationError):
        branch_state(np.ones(2), np.ones(4))
    with pytest.raises(ValidationError):
        comparison_circuit(Circuit(1, [hadamard(0)]), Circuit(2, []))


def test_four_element_search_is_certain():
    phi = np.full(4, 0.5)
    good = np.array([False, False, True, False])
    prob = AmplificationProblem.from_mask(phi, good)
    assert prob.iterations == 1
    psi, trace = amplitude_amplify(prob)
    assert trace == pytest.approx([0.25, 1.0], abs=1e-12)
    assert abs(psi[0, 2]) == pytest.approx(1.0)


@settings(max_examples=60)
@given(st.integers(2, 6), st.integers(0, 2 ** 16), st.integers(0, 6))
def test_trace_matches_prediction(qubits, seed, m):
    rng = np.random.default_rng(seed)
    dim = 1 << qubits
    phi = _random_state(rng, dim)
    good = rng.random(dim) < 0.3
    if not good.any():
        good[0] = True
    prob = AmplificationProblem.from_mask(phi, good, m)
    _, trace = amplitude_amplify(prob)
    a = prob.overlap
    for k, t in enumerate(trace):
        assert t == pytest.approx(grover_success(a, k), abs=1e-10)
        assert t == pytest.approx(grover_prediction(a, k), abs=1e-10)


def test_reflections_match_dense_operators():
    rng = np.random.default_rng(1)
    phi = _random_state(rng, 8)
    prob = AmplificationProblem.from_mask(phi, np.arange(8) % 3 == 0, 1)
    psi = _random_state(rng, 8)[None, :]
    np.testing.assert_allclose(prob.reflect_omega(psi)[0], prob.operator("omega") @ psi[0], atol=1e-12)
    np.testing.assert_allclose(prob.reflect_phi(psi)[0], prob.operator("phi") @ psi[0], atol=1e-12)
    for w in ("omega", "phi"):
        U = prob.operator(w)
        np.testing.assert_allclose(U @ U, np.eye(8), atol=1e-12)


def test_sectors_amplify_independently():
    rng = np.random.default_rng(3)
    phi = np.stack([_random_state(rng, 4), _random_state(rng, 4)]) / np.sqrt(2)
    good = np.array([[True, False, False, False], [False, True, True, False]])
    joint = AmplificationProblem.from_mask(phi, good, 2)
    _, trace = amplitude_amplify(joint)
    expect = 0.0
    for k in range(2):
        one = AmplificationProblem.from_mask(phi[k] * np.sqrt(2), good[k], 2)
        expect += amplitude_amplify(one)[1][-1] / 2
    assert trace[-1] == pytest.approx(expect, abs=1e-12)


@pytest.mark.parametrize("a,m", [(0.25, 1), (0.5, 0), (1.0, 0), (0.0, 0), (1 / 64, 6)])
def test_optimal_iterations(a, m):
    assert optimal_iterations(a) == m


def test_problem_validation():
    with pytest.raises(ValidationError):
        AmplificationProblem(np.ones(4), np.eye(4)[0])
    with pytest.raises(ValidationError):
        AmplificationProblem(np.full(4, 0.5), np.ones(4))
    with pytest.raises(ValidationError):
        AmplificationProblem(np.full(4, 0.5), np.ones(2) / np.sqrt(2))
    with pytest.raises(ValidationError):
        AmplificationProblem(np.full(4, 0.5), np.eye(4)[0], iterations=-1)


def test_unknown_overlap_schedule_finds_target():
    phi = np.full(64, 1 / 8)
    prob = AmplificationProblem.from_mask(phi, np.arange(64) == 5)
    m, psi = amplify_unknown(prob, seed=4)
    assert m in (0, 1, 2, 4, 8, 16)
