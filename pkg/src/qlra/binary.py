"""Hilbert representation of two binary observables.

Given a contextual model with observables A and B and a symmetrically
conditioned transition matrix ``P(b|a)``, this module builds the state vector
in the B eigenbasis, the A eigenbasis, the change-of-basis matrix and both
operators, and checks that Born's rule gives back the input probabilities.

Everything is expressed in B-basis components: ``|b1> = (1, 0)`` and
``|b2> = (0, 1)``.  A ``Basis2`` stores its kets as the rows of a 2x2 array.

Symmetric conditioning for two outcomes means ``T = [[p, 1-p], [1-p, p]]``.
The construction below works for any such ``p``; ``p = 1/2`` gives the
Hadamard-type basis.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .contextual import (
    TOL,
    AngleSet,
    BinaryObservable,
    ContextualDistribution,
    ContextualModel,
    TransitionMatrix,
    angle_set,
)
from .errors import ModelError, SymmetricConditioningRequired

__all__ = [
    "CONTEXT_INDEPENDENT",
    "StateVector",
    "Basis2",
    "Operator2",
    "ChangeOfBasis2",
    "BinaryRepresentation",
    "resolve_gauge",
    "build_wavefunction",
    "build_b_basis",
    "build_b_operator",
    "build_a_basis",
    "change_of_basis",
    "general_change_of_basis",
    "build_a_operator",
    "express_state_in_a_basis",
    "expectation",
    "commutator_norm",
    "binary_model",
    "random_symmetric_model",
    "represent",
]

#: Gauge preset that sets ``omega = theta`` so the A basis no longer depends on c.
CONTEXT_INDEPENDENT = "context-independent"

Gauge = Union[float, str]


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray
    basis: str

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amp.shape != (2,):
            raise ModelError("a binary state vector has two amplitudes")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm_residual(self) -> float:
        return abs(float(self.probabilities.sum()) - 1.0)


@dataclass(frozen=True)
class Basis2:
    """Two kets, stored as rows, in B-basis components."""

    vectors: np.ndarray
    labels: tuple[str, str]
    context_dependent: bool = False

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=complex)
        if v.shape != (2, 2):
            raise ModelError("Basis2 needs a 2x2 array of row vectors")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    def ket(self, i: int) -> np.ndarray:
        return self.vectors[i]

    def gram(self) -> np.ndarray:
        return self.vectors.conj() @ self.vectors.T

    def orthonormality_residual(self) -> float:
        return float(np.max(np.abs(self.gram() - np.eye(2))))


@dataclass(frozen=True)
class Operator2:
    matrix: np.ndarray
    basis: str

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ModelError("Operator2 needs a 2x2 matrix")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def hermitian_residual(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def eigenvalue_residual(self, outcomes) -> float:
        return float(np.max(np.abs(self.eigenvalues() - np.sort(np.asarray(outcomes, float)))))


@dataclass(frozen=True)
class ChangeOfBasis2:
    """``matrix[i]`` is the i-th target ket in source-basis components."""

    matrix: np.ndarray
    source: str
    target: str

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def unitarity_residual(self) -> float:
        u = self.matrix
        return float(np.max(np.abs(u @ u.conj().T - np.eye(2))))

    def is_unitary(self, tol: float = 1e-10) -> bool:
        return self.unitarity_residual() <= tol


def resolve_gauge(gauge: Gauge, theta1: float) -> float:
    """Turn a gauge value (number or the context-independent preset) into omega."""
    if isinstance(gauge, str):
        if gauge == CONTEXT_INDEPENDENT:
            return float(theta1)
        try:
            return float(gauge)
        except ValueError:
            raise ModelError(f"unknown gauge {gauge!r}") from None
    return float(gauge)


def _symmetric_p(t: TransitionMatrix, reverse: TransitionMatrix | None = None,
                 tol: float = TOL) -> float:
    if not t.is_symmetric(reverse, tol):
        raise SymmetricConditioningRequired(
            f"transition {t.key!r} is not symmetrically conditioned "
            f"(residual {t.symmetry_residual(reverse):.3e})"
        )
    return float(t.matrix[0, 0])


def build_wavefunction(t: TransitionMatrix, p_a: ContextualDistribution,
                       angles: AngleSet) -> StateVector:
    """``psi(b) = sqrt(P(b|a1) P(a1)) + exp(i theta(b)) sqrt(P(b|a2) P(a2))``."""
    x = np.sqrt(t.matrix[:, 0] * p_a.probs[0])
    y = np.sqrt(t.matrix[:, 1] * p_a.probs[1])
    psi = x + np.exp(1j * angles.theta) * y
    return StateVector(psi, t.target.label)


def build_b_basis(label: str = "B") -> Basis2:
    return Basis2(np.eye(2), (f"{label}1", f"{label}2"))


def build_b_operator(obs: BinaryObservable) -> Operator2:
    return Operator2(np.diag(np.asarray(obs.outcomes, dtype=complex)), obs.label)


def _a_kets(p: float, phase: float) -> np.ndarray:
    sp, sq = math.sqrt(p), math.sqrt(1.0 - p)
    return np.array([[sp, sq], [sq, -sp]], dtype=complex) * np.array(
        [[1.0], [cmath.exp(1j * phase)]]
    )


def build_a_basis(t: TransitionMatrix, angles: AngleSet, gauge: Gauge = 0.0,
                  reverse: TransitionMatrix | None = None) -> Basis2:
    """A eigenbasis in B components under gauge omega.

    ``|a1> = (sqrt p, sqrt(1-p))`` and
    ``|a2> = exp(i(theta - omega)) (sqrt(1-p), -sqrt p)``.
    """
    p = _symmetric_p(t, reverse)
    omega = resolve_gauge(gauge, angles.theta1)
    phase = angles.theta1 - omega
    labels = (f"{t.given.label}1", f"{t.given.label}2")
    return Basis2(_a_kets(p, phase), labels, context_dependent=phase != 0.0)


def change_of_basis(t: TransitionMatrix, angles: AngleSet, gauge: Gauge = 0.0,
                    reverse: TransitionMatrix | None = None) -> ChangeOfBasis2:
    """Matrix whose rows are the A kets in B components."""
    basis = build_a_basis(t, angles, gauge, reverse)
    return ChangeOfBasis2(basis.vectors.copy(), t.target.label, t.given.label)


def general_change_of_basis(t: TransitionMatrix, theta) -> ChangeOfBasis2:
    """Change of basis for an arbitrary column-stochastic ``T``.

    Row ``j`` holds ``sqrt(P(b_i|a_j))`` with the phase ``exp(i theta(b_i))``
    applied to the second row.  Orthogonality of the rows requires
    ``T`` to be doubly stochastic: the off-diagonal Gram entry is at least
    ``|T[0,0] + T[0,1] - 1|`` in magnitude for any choice of angles.
    """
    theta = np.asarray(theta, dtype=float)
    m = np.sqrt(np.clip(t.matrix, 0.0, None))
    u = np.empty((2, 2), dtype=complex)
    u[0] = m[:, 0]
    u[1] = np.exp(1j * theta) * m[:, 1]
    return ChangeOfBasis2(u, t.target.label, t.given.label)


def build_a_operator(obs: BinaryObservable, t: TransitionMatrix,
                     reverse: TransitionMatrix | None = None) -> Operator2:
    """``A = sum_a a |a><a|`` in B components.

    The gauge phase cancels in every projector, so the entries are written in
    closed form; the result is bitwise independent of theta and omega.
    """
    p = _symmetric_p(t, reverse)
    a1, a2 = obs.outcomes
    off = (a1 - a2) * math.sqrt(p * (1.0 - p))
    m = np.array([[a1 * p + a2 * (1.0 - p), off], [off, a1 * (1.0 - p) + a2 * p]],
                 dtype=complex)
    return Operator2(m, t.target.label)


def express_state_in_a_basis(psi: StateVector, basis: Basis2, label: str = "A") -> StateVector:
    """Components ``<a|psi>``; with gauge omega these are
    ``(sqrt P(a1), exp(i omega) sqrt P(a2))``."""
    return StateVector(basis.vectors.conj() @ psi.amplitudes, label)


def expectation(op: Operator2, psi: StateVector, imag_tol: float = 1e-10) -> float:
    if op.basis != psi.basis:
        raise ModelError(f"operator in basis {op.basis!r}, state in {psi.basis!r}")
    value = complex(psi.amplitudes.conj() @ op.matrix @ psi.amplitudes)
    if abs(value.imag) > imag_tol:
        raise ModelError(f"expectation has imaginary part {value.imag:.3e}")
    return value.real


def commutator_norm(a: Operator2, b: Operator2) -> float:
    c = a.matrix @ b.matrix - b.matrix @ a.matrix
    return float(np.linalg.norm(c))


def binary_model(p_a, p_b, t, outcomes_a=(1.0, -1.0), outcomes_b=(1.0, -1.0),
                 labels=("A", "B"), context: str = "c") -> ContextualModel:
    """Convenience constructor; ``t[i][j] = P(b_i | a_j)``."""
    A = BinaryObservable(labels[0], tuple(outcomes_a))
    B = BinaryObservable(labels[1], tuple(outcomes_b))
    tm = TransitionMatrix(B, A, np.asarray(t, dtype=float))
    return ContextualModel(
        context,
        (A, B),
        {A.label: ContextualDistribution(A, p_a), B.label: ContextualDistribution(B, p_b)},
        {tm.key: tm},
    )


def random_symmetric_model(rng: np.random.Generator, p: float | None = None,
                           margin: float = 0.02) -> ContextualModel:
    """Random trigonometric model with symmetric conditioning.

    ``P_A``, ``p`` and ``theta`` are drawn and ``P_B`` is obtained from the
    amplitudes, so ``|lambda| <= 1`` holds by construction.
    """
    if p is None:
        p = float(rng.uniform(margin, 1 - margin))
    pa1 = float(rng.uniform(margin, 1 - margin))
    theta = float(rng.uniform(0.0, math.pi))
    pb1 = (p * pa1 + (1 - p) * (1 - pa1)
           + 2 * math.sqrt(p * (1 - p) * pa1 * (1 - pa1)) * math.cos(theta))
    pb1 = min(max(pb1, 0.0), 1.0)
    return binary_model([pa1, 1 - pa1], [pb1, 1 - pb1], [[p, 1 - p], [1 - p, p]])


@dataclass
class BinaryRepresentation:
    angles: AngleSet
    gauge: float
    state: StateVector
    state_a: StateVector
    b_basis: Basis2
    a_basis: Basis2
    change: ChangeOfBasis2
    a_operator: Operator2
    b_operator: Operator2
    verification: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(v["passed"] for v in self.verification.values())


def _pair(model: ContextualModel, a_label: str | None, b_label: str | None):
    if a_label is None or b_label is None:
        if len(model.observables) < 2:
            raise ModelError("a binary representation needs two observables")
        a_label = a_label or model.observables[0].label
        b_label = b_label or model.observables[1].label
    return model.observable(a_label), model.observable(b_label)


def represent(model: ContextualModel, gauge: Gauge = 0.0, a_label: str | None = None,
              b_label: str | None = None, tol: float = TOL) -> BinaryRepresentation:
    """Full binary pipeline for the pair (B, A), with a verification block.

    By default A is the first declared observable and B the second.
    """
    A, B = _pair(model, a_label, b_label)
    t = model.transition(B.label, A.label)
    reverse = model.reverse_of(t)
    p_a, p_b = model.distribution(A.label), model.distribution(B.label)
    _symmetric_p(t, reverse, tol)

    angles = angle_set(p_b, t, p_a, tol)
    omega = resolve_gauge(gauge, angles.theta1)
    psi = build_wavefunction(t, p_a, angles)
    b_basis = build_b_basis(B.label)
    a_basis = build_a_basis(t, angles, omega, reverse)
    u = change_of_basis(t, angles, omega, reverse)
    a_op = build_a_operator(A, t, reverse)
    b_op = build_b_operator(B)
    psi_a = express_state_in_a_basis(psi, a_basis, A.label)

    def check(residual: float, limit: float) -> dict:
        return {"residual": float(residual), "tolerance": limit, "passed": residual <= limit}

    ev_a = float(np.dot(A.outcomes, p_a.probs))
    ev_b = float(np.dot(B.outcomes, p_b.probs))
    expected_a = np.array([math.sqrt(p_a.probs[0]), cmath.exp(1j * omega) * math.sqrt(p_a.probs[1])])
    verification = {
        "born_b": check(np.max(np.abs(psi.probabilities - p_b.probs)), tol),
        "born_a": check(np.max(np.abs(psi_a.probabilities - p_a.probs)), tol),
        "a_components": check(np.max(np.abs(psi_a.amplitudes - expected_a)), 1e-10),
        "norm": check(psi.norm_residual(), 1e-10),
        "a_basis_orthonormal": check(a_basis.orthonormality_residual(), 1e-10),
        "unitary": check(u.unitarity_residual(), 1e-10),
        "a_hermitian": check(a_op.hermitian_residual(), 1e-10),
        "a_eigenvalues": check(a_op.eigenvalue_residual(A.outcomes), 1e-10),
        "expectation_a": check(abs(expectation(a_op, psi) - ev_a), tol),
        "expectation_b": check(abs(expectation(b_op, psi) - ev_b), tol),
    }
    return BinaryRepresentation(angles, omega, psi, psi_a, b_basis, a_basis, u,
                                a_op, b_op, verification)
