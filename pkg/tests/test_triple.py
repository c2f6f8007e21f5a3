import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qlra.binary import binary_model
from qlra.contextual import (
    BinaryObservable,
    ContextualDistribution,
    ContextualModel,
    validate_model,
)
from qlra.errors import (
    ConstraintViolated,
    DegenerateContext,
    ModelError,
    SymmetricConditioningRequired,
)
from qlra.triple import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    ZETA,
    build_c_operator,
    build_w_matrix,
    check_angle_constraint,
    check_consistency,
    gamma_basis,
    generate_consistent_triple,
    random_consistent_triple,
    represent_triple,
    spin_representation,
    state_from_gamma,
    state_in_gamma_basis,
    triple_angles,
    TripleAngles,
)

C_OBS = BinaryObservable("C", (1, -1))
unit = st.floats(min_value=0.05, max_value=0.95)


def with_pb(model, pb1):
    dists = dict(model.distributions)
    B = model.observable("B")
    dists["B"] = ContextualDistribution(B, [pb1, 1 - pb1])
    return ContextualModel(model.context, model.observables, dists, model.transitions)


def test_w_matrix_examples():
    w = build_w_matrix(0.0, math.pi / 2)
    assert w.w1 == pytest.approx((1 - 1j) / 2, abs=1e-15)
    assert w.w2 == pytest.approx((1 + 1j) / 2, abs=1e-15)
    assert abs(w.w1) ** 2 == pytest.approx(0.5, abs=1e-15)
    assert build_w_matrix(0.7, 0.7).matrix == pytest.approx(np.eye(2))
    w = build_w_matrix(math.pi, 0.0)
    assert (w.w1, w.w2) == pytest.approx((0, 1), abs=1e-15)


@given(st.floats(-10, 10), st.floats(-10, 10))
def test_w_always_unitary_with_weights_from_angle(theta, phi):
    w = build_w_matrix(theta, phi)
    assert w.unitarity_residual() <= 1e-14
    assert abs(w.w1) ** 2 == pytest.approx(math.cos((theta - phi) / 2) ** 2, abs=1e-12)


def test_constraint_examples():
    plus = check_angle_constraint(math.pi / 2, 0.0)
    minus = check_angle_constraint(0.0, math.pi / 2)
    assert plus.ok and plus.branch == "+"
    assert minus.ok and minus.branch == "-"
    flat = check_angle_constraint(1.0, 1.0)
    assert not flat.ok
    assert flat.w1_excess == pytest.approx(0.5)


@given(st.floats(-10, 10), st.sampled_from([1, -1]))
def test_constraint_holds_on_both_branches(phi, s):
    assert check_angle_constraint(phi + s * math.pi / 2, phi).ok


def test_gamma_basis_spin_vectors():
    basis = gamma_basis(build_w_matrix(0.0, math.pi / 2))
    assert basis.ket(0) == pytest.approx(ZETA * np.array([1, 1j]) / math.sqrt(2), abs=1e-15)
    assert basis.ket(1) == pytest.approx(ZETA.conjugate() * np.array([1, -1j]) / math.sqrt(2), abs=1e-15)
    assert abs(np.vdot(basis.ket(0), basis.ket(1))) <= 1e-15


def test_gamma_basis_requires_constraint():
    with pytest.raises(ConstraintViolated):
        gamma_basis(build_w_matrix(0.3, 0.1))


@given(st.floats(-10, 10))
def test_gamma_overlaps_doubly_stochastic(phi):
    basis = gamma_basis(build_w_matrix(phi - math.pi / 2, phi))
    overlaps = np.abs(basis.vectors) ** 2
    assert overlaps == pytest.approx(np.full((2, 2), 0.5), abs=1e-12)


def test_state_in_gamma_basis_examples():
    psi = state_in_gamma_basis(ContextualDistribution(C_OBS, [0.5, 0.5]), math.pi / 2)
    assert psi.probabilities[0] == pytest.approx(0.5, abs=1e-15)
    with pytest.raises(DegenerateContext):
        state_in_gamma_basis(ContextualDistribution(C_OBS, [1.0, 0.0]), 0.0)


def test_generator_degenerate_case():
    with pytest.raises(DegenerateContext):
        generate_consistent_triple([0.5, 0.5], math.pi / 2, 1)


def test_generated_triple_validates():
    m = generate_consistent_triple([0.3, 0.7], 2 * math.pi / 3)
    assert validate_model(m).ok
    assert check_consistency(m).consistent


def test_generator_sign_flip_is_distinct():
    a = generate_consistent_triple([0.3, 0.7], 2 * math.pi / 3, 1)
    b = generate_consistent_triple([0.3, 0.7], math.pi / 3, -1)
    assert not np.allclose(a.distribution("C").probs, b.distribution("C").probs)
    assert check_consistency(b).consistent
    ra, rb = represent_triple(a), represent_triple(b)
    assert ra.ok and rb.ok
    assert ra.c_operator.matrix == pytest.approx(rb.c_operator.matrix.conj(), abs=1e-12)


def test_generator_rejects_out_of_range_phi():
    with pytest.raises(ModelError):
        generate_consistent_triple([0.3, 0.7], 0.2, 1)


def test_consistency_equal_ratio_case():
    m = generate_consistent_triple([0.3, 0.7], 2 * math.pi / 3)
    A, B, C = m.observables
    dists = {
        "A": ContextualDistribution(A, [0.5, 0.5]),
        "B": ContextualDistribution(B, [0.6, 0.4]),
        "C": ContextualDistribution(C, [0.5, 0.5]),
    }
    m = ContextualModel(m.context, m.observables, dists, m.transitions)
    rep = check_consistency(m, TripleAngles(math.pi, math.pi / 2))
    assert rep.expected == pytest.approx(math.cos(math.pi), abs=1e-15)


def test_consistency_flags_perturbation(rng):
    for _ in range(50):
        m, theta, sign = random_consistent_triple(rng)
        perturbed = with_pb(m, m.distribution("B").probs[0] + 0.05)
        assert check_consistency(perturbed).residual > 1e-3


def test_roles_require_uniform_matrices():
    m = generate_consistent_triple([0.3, 0.7], 2 * math.pi / 3)
    trans = dict(m.transitions)
    B, A = m.observable("B"), m.observable("A")
    trans["B|A"] = binary_model([0.3, 0.7], [0.5, 0.5], [[0.7, 0.3], [0.3, 0.7]]).transition("B", "A")
    bad = ContextualModel(m.context, m.observables, dict(m.distributions), trans)
    with pytest.raises(SymmetricConditioningRequired):
        represent_triple(bad)
    assert A.label == "A" and B.label == "B"


def test_c_operator_examples():
    sy = build_c_operator(C_OBS, build_w_matrix(0.0, math.pi / 2))
    assert sy.matrix == pytest.approx(SIGMA_Y, abs=1e-15)
    op = build_c_operator(BinaryObservable("C", (1, 0)), build_w_matrix(math.pi / 2, 0.0))
    assert np.diag(op.matrix).real == pytest.approx([0.5, 0.5])
    assert abs(op.matrix[0, 1]) == pytest.approx(0.5)
    with pytest.raises(ConstraintViolated):
        build_c_operator(C_OBS, build_w_matrix(0.2, 0.1))


@given(st.floats(-10, 10), st.sampled_from([1, -1]),
       st.floats(-3, 3), st.floats(-3, 3))
def test_c_operator_spectrum(phi, s, g1, g2):
    if abs(g1 - g2) < 1e-3:
        return
    op = build_c_operator(BinaryObservable("C", (g1, g2)), build_w_matrix(phi + s * math.pi / 2, phi))
    assert op.hermitian_residual() <= 1e-14
    assert op.eigenvalue_residual((g1, g2)) <= 1e-12
    assert abs(op.matrix[0, 1].imag) > 0


@given(unit, st.floats(0.05, math.pi - 0.05), st.sampled_from([1, -1]))
def test_triple_round_trip(pa1, theta, sign):
    phi = theta - sign * math.pi / 2
    if not 0 <= phi <= math.pi:
        sign = -sign
    try:
        m = generate_consistent_triple([pa1, 1 - pa1], theta, sign)
        rep = represent_triple(m)
    except (DegenerateContext, ValueError):
        return
    assert rep.ok, rep.verification


def test_round_trip_matches_pair_state(rng):
    m, theta, sign = random_consistent_triple(rng)
    rep = represent_triple(m)
    back = state_from_gamma(rep.state_c, rep.w)
    assert back.amplitudes == pytest.approx(rep.pair.state.amplitudes, abs=1e-12)
    assert rep.verification["b_decomposition"]["passed"]


def test_angles_are_recovered(rng):
    m, theta, sign = random_consistent_triple(rng)
    ang = triple_angles(m)
    assert ang.theta == pytest.approx(theta, abs=1e-10)
    assert ang.phi == pytest.approx(theta - sign * math.pi / 2, abs=1e-10)


@pytest.mark.parametrize("pa1", [0.1, 0.3, 0.5, 0.8])
def test_spin_representation_is_exact(pa1):
    report = spin_representation([pa1, 1 - pa1], math.pi / 3)
    assert report.exact, report.pauli_residuals
    rep = report.representation
    assert rep.pair.b_operator.matrix == pytest.approx(SIGMA_Z, abs=1e-15)
    assert rep.pair.a_operator.matrix == pytest.approx(SIGMA_X, abs=1e-15)
    assert max(report.gamma_residuals.values()) <= 1e-12
    assert 0 <= report.g <= 1


def test_zeta_phase_leaves_gamma_probabilities():
    rep = spin_representation([0.3, 0.7], math.pi / 3).representation
    b = rep.pair.state.amplitudes
    probs = np.abs(rep.c_basis.vectors.conj().T @ b) ** 2
    rotated = np.abs((rep.c_basis.vectors * ZETA).conj().T @ b) ** 2
    assert probs == pytest.approx(rotated, abs=1e-15)
    assert probs == pytest.approx(rep.state_c.probabilities, abs=1e-12)
