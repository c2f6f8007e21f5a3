import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qlra.binary import (
    CONTEXT_INDEPENDENT,
    binary_model,
    build_a_basis,
    build_a_operator,
    build_b_basis,
    build_b_operator,
    build_wavefunction,
    change_of_basis,
    commutator_norm,
    expectation,
    express_state_in_a_basis,
    general_change_of_basis,
    random_symmetric_model,
    represent,
    StateVector,
    Operator2,
)
from qlra.contextual import BinaryObservable, TransitionMatrix, angle_set
from qlra.errors import ModelError, SymmetricConditioningRequired

HALF = [[0.5, 0.5], [0.5, 0.5]]
SX = np.array([[0, 1], [1, 0]])
SZ = np.diag([1, -1])

unit = st.floats(min_value=0.02, max_value=0.98)
angle = st.floats(min_value=0.0, max_value=math.pi)


def pieces(model):
    t = model.transition("B", "A")
    pa, pb = model.distribution("A"), model.distribution("B")
    return t, pa, pb, angle_set(pb, t, pa)


def test_wavefunction_zero_supplementarity():
    t, pa, pb, ang = pieces(binary_model([0.5, 0.5], [0.5, 0.5], HALF))
    psi = build_wavefunction(t, pa, ang)
    assert psi.amplitudes[0] == pytest.approx(0.5 + 0.5j, abs=1e-15)
    assert psi.probabilities[0] == pytest.approx(0.5, abs=1e-15)


def test_wavefunction_recovers_input():
    t, pa, pb, ang = pieces(binary_model([0.25, 0.75], [0.6, 0.4], HALF))
    assert ang.theta1 == pytest.approx(1.337753, abs=1e-6)
    psi = build_wavefunction(t, pa, ang)
    assert psi.probabilities == pytest.approx([0.6, 0.4], abs=1e-12)


def test_b_basis_and_operator():
    assert np.array_equal(build_b_basis().vectors, np.eye(2))
    assert np.array_equal(build_b_operator(BinaryObservable("B", (1, -1))).matrix, SZ)
    assert np.array_equal(build_b_operator(BinaryObservable("B", (2, 5))).matrix, np.diag([2, 5]))


def test_a_basis_gauges():
    m = binary_model([0.3, 0.7], [0.6, 0.4], HALF)
    t, pa, pb, ang = pieces(m)
    fixed = build_a_basis(t, ang, CONTEXT_INDEPENDENT)
    assert fixed.vectors == pytest.approx(np.array([[1, 1], [1, -1]]) / math.sqrt(2), abs=1e-15)
    assert not fixed.context_dependent
    raw = build_a_basis(t, ang, 0.0)
    assert raw.vectors[1] == pytest.approx(np.exp(1j * ang.theta1) * np.array([1, -1]) / math.sqrt(2))
    assert raw.context_dependent


def test_change_of_basis_examples():
    m = binary_model([0.3, 0.7], [0.6, 0.4], HALF)
    t, pa, pb, ang = pieces(m)
    u = change_of_basis(t, ang, ang.theta1).matrix
    assert u == pytest.approx(np.array([[1, 1], [1, -1]]) / math.sqrt(2), abs=1e-15)
    u = change_of_basis(t, ang, ang.theta1 - math.pi / 2).matrix
    assert u[1] == pytest.approx(np.array([1j, -1j]) / math.sqrt(2), abs=1e-15)


def test_a_operator_examples():
    t = TransitionMatrix(BinaryObservable("B", (1, -1)), BinaryObservable("A", (1, -1)), HALF)
    assert np.array_equal(build_a_operator(BinaryObservable("A", (1, -1)), t).matrix, SX)
    assert np.array_equal(build_a_operator(BinaryObservable("A", (3, 1)), t).matrix,
                          np.array([[2, 1], [1, 2]]))


def test_symmetric_conditioning_required():
    m = binary_model([0.5, 0.5], [0.5, 0.5], [[0.7, 0.6], [0.3, 0.4]])
    with pytest.raises(SymmetricConditioningRequired):
        represent(m)


def test_state_in_a_basis_phases():
    m = binary_model([0.3, 0.7], [0.6, 0.4], HALF)
    t, pa, pb, ang = pieces(m)
    psi = build_wavefunction(t, pa, ang)
    comps = express_state_in_a_basis(psi, build_a_basis(t, ang, 0.0)).amplitudes
    assert comps == pytest.approx(np.sqrt([0.3, 0.7]), abs=1e-15)
    comps = express_state_in_a_basis(psi, build_a_basis(t, ang, math.pi / 3)).amplitudes
    assert comps[1] == pytest.approx(np.exp(1j * math.pi / 3) * math.sqrt(0.7), abs=1e-15)


def test_expectation_examples():
    b = build_b_operator(BinaryObservable("B", (1, -1)))
    assert expectation(b, StateVector([1, 0], "B")) == 1.0
    assert expectation(b, StateVector(np.sqrt([0.6, 0.4]), "B")) == pytest.approx(0.2)
    with pytest.raises(ModelError):
        expectation(b, StateVector([1, 0], "A"))
    with pytest.raises(ModelError):
        expectation(Operator2([[0, 1j], [1j, 0]], "B"), StateVector(np.sqrt([0.5, 0.5]), "B"))


def test_general_change_of_basis_unitarity_gap():
    A, B = BinaryObservable("A", (1, -1)), BinaryObservable("B", (1, -1))
    t = TransitionMatrix(B, A, [[0.8, 0.5], [0.2, 0.5]])
    for th in np.linspace(-math.pi, math.pi, 13):
        res = general_change_of_basis(t, [th, th - 1.0]).unitarity_residual()
        assert res >= abs(0.8 + 0.5 - 1) - 1e-15


def test_represent_verification_passes(rng):
    rep = represent(random_symmetric_model(rng))
    assert rep.ok, rep.verification


def test_non_half_symmetric_conditioning_supported(rng):
    rep = represent(random_symmetric_model(rng, p=0.8))
    assert rep.ok


@given(unit, unit, angle, st.floats(min_value=0, max_value=2 * math.pi))
def test_born_round_trip_property(pa1, p, theta, omega):
    pb1 = p * pa1 + (1 - p) * (1 - pa1) + 2 * math.sqrt(p * (1 - p) * pa1 * (1 - pa1)) * math.cos(theta)
    pb1 = min(max(pb1, 0.0), 1.0)
    m = binary_model([pa1, 1 - pa1], [pb1, 1 - pb1], [[p, 1 - p], [1 - p, p]])
    rep = represent(m, omega)
    assert rep.ok, rep.verification


@given(unit, unit, st.floats(min_value=0, max_value=2 * math.pi))
def test_gauge_never_changes_operator(pa1, pb1, omega):
    m = binary_model([pa1, 1 - pa1], [pb1, 1 - pb1], HALF)
    try:
        base = represent(m, 0.0)
    except ValueError:
        return
    other = represent(m, omega)
    assert np.array_equal(base.a_operator.matrix, other.a_operator.matrix)
    assert other.state_a.probabilities == pytest.approx(base.state_a.probabilities, abs=1e-12)


@given(st.floats(min_value=-5, max_value=5), st.floats(min_value=-5, max_value=5))
def test_commutator_nonzero(a1, a2):
    if abs(a1 - a2) < 1e-6:
        return
    A, B = BinaryObservable("A", (a1, a2)), BinaryObservable("B", (1, -1))
    t = TransitionMatrix(B, A, HALF)
    assert commutator_norm(build_a_operator(A, t), build_b_operator(B)) > 0
