"""Hilbert representation of three pairwise symmetric binary observables.

Roles are fixed by declaration order: observables ``[A, B, C]`` with the
pair keys ``"B|A"``, ``"C|A"`` and ``"B|C"``.  All three transition matrices
must have every entry equal to 1/2.

Angles: ``theta`` belongs to the pair (B, A) at ``b1``, ``phi`` to (C, A) at
``c1`` and ``chi`` to (B, C) at ``b1``.  The C basis is obtained from the B
basis through

    W = [[w1, w2], [w2, w1]],   w1 = (1 + e^{i(theta-phi)}) / 2,
                                w2 = (1 - e^{i(theta-phi)}) / 2,

whose columns are the C kets in B components, so ``psi_B = W @ psi_C``.
``W`` is unitary for every angle difference; ``|<b|c>|^2 = 1/2`` (which the
uniform transition matrices demand) holds only when
``theta - phi = +-pi/2 (mod 2 pi)``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .binary import (
    Basis2,
    BinaryRepresentation,
    Gauge,
    Operator2,
    StateVector,
    represent,
)
from .contextual import (
    TOL,
    BinaryObservable,
    ContextualDistribution,
    ContextualModel,
    TransitionMatrix,
    angle_set,
    lambda_coefficients,
    supplementarity,
)
from .errors import (
    ConstraintViolated,
    DegenerateContext,
    ModelError,
    SymmetricConditioningRequired,
)

__all__ = [
    "CONSTRAINT_TOL",
    "ZETA",
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "TripleAngles",
    "WMatrix",
    "ConstraintCheck",
    "ConsistencyReport",
    "TripleRepresentation",
    "SpinReport",
    "triple_roles",
    "build_w_matrix",
    "check_angle_constraint",
    "gamma_basis",
    "state_in_gamma_basis",
    "state_from_gamma",
    "triple_angles",
    "check_consistency",
    "generate_consistent_triple",
    "random_consistent_triple",
    "build_c_operator",
    "represent_triple",
    "spin_report",
    "spin_from_model",
    "spin_representation",
]

CONSTRAINT_TOL = 1e-10
ZETA = cmath.exp(-1j * math.pi / 4)

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

PAIR_KEYS = ("B|A", "C|A", "B|C")


@dataclass(frozen=True)
class TripleAngles:
    theta: float
    phi: float
    chi: float | None = None


@dataclass(frozen=True)
class WMatrix:
    w1: complex
    w2: complex

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.w1, self.w2], [self.w2, self.w1]], dtype=complex)

    def unitarity_residual(self) -> float:
        m = self.matrix
        return float(np.max(np.abs(m.conj().T @ m - np.eye(2))))


@dataclass(frozen=True)
class ConstraintCheck:
    residual: float
    w1_excess: float
    branch: str
    ok: bool


@dataclass(frozen=True)
class ConsistencyReport:
    cos_chi: float
    expected: float
    residual: float
    residual_b2: float
    trigonometric: bool
    tolerance: float

    @property
    def consistent(self) -> bool:
        return self.residual <= self.tolerance


def triple_roles(model: ContextualModel, tol: float = TOL):
    """Return ``(A, B, C)`` and the three uniform transition matrices."""
    if len(model.observables) != 3:
        raise ModelError("a triple model declares exactly three observables")
    A, B, C = model.observables
    expected = {
        "B|A": (B, A), "C|A": (C, A), "B|C": (B, C),
    }
    mats = {}
    for role, (target, given) in expected.items():
        key = f"{target.label}|{given.label}"
        if key not in model.transitions:
            flipped = f"{given.label}|{target.label}"
            hint = f" (found {flipped!r}; pair orientation is fixed)" if flipped in model.transitions else ""
            raise ModelError(f"missing transition {key!r} for role {role!r}{hint}")
        t = model.transitions[key]
        if not (t.is_stochastic(tol) and t.is_uniform(tol)):
            raise SymmetricConditioningRequired(
                f"transition {key!r} must have all entries 1/2, got {t.matrix.tolist()}"
            )
        mats[role] = t
    return (A, B, C), mats


def build_w_matrix(theta: float, phi: float) -> WMatrix:
    e = cmath.exp(1j * (theta - phi))
    return WMatrix((1 + e) / 2, (1 - e) / 2)


def _branch_residual(diff: float) -> tuple[float, str]:
    # distance of diff - pi/2 to the nearest multiple of pi
    x = (diff - math.pi / 2) / math.pi
    k = round(x)
    residual = abs(x - k) * math.pi
    return residual, ("+" if k % 2 == 0 else "-")


def check_angle_constraint(theta: float, phi: float,
                           tol: float = CONSTRAINT_TOL) -> ConstraintCheck:
    """``theta - phi = +-pi/2``: the condition for ``|w1|^2 = |w2|^2 = 1/2``.

    ``branch`` is ``"+"`` for ``+pi/2`` and ``"-"`` for ``-pi/2`` (mod 2 pi).
    """
    w = build_w_matrix(theta, phi)
    residual, branch = _branch_residual(theta - phi)
    return ConstraintCheck(residual, abs(w.w1) ** 2 - 0.5, branch, residual < tol)


def gamma_basis(w: WMatrix, tol: float = CONSTRAINT_TOL, label: str = "C") -> Basis2:
    """C kets in B components: ``|c1> = (w1, w2)``, ``|c2> = (w2, w1)``."""
    excess = abs(abs(w.w1) ** 2 - 0.5)
    if excess > tol:
        raise ConstraintViolated(
            f"|w1|^2 = {abs(w.w1) ** 2:.12f}; the C basis is unbiased to B only at 1/2"
        )
    return Basis2(w.matrix.T, (f"{label}1", f"{label}2"))


def state_in_gamma_basis(p_a: ContextualDistribution, phi: float,
                         label: str = "C") -> StateVector:
    """``psi(c1,2) = (sqrt P(a1) +- e^{i phi} sqrt P(a2)) / sqrt 2``."""
    if not p_a.is_nondegenerate():
        raise DegenerateContext(f"P_A = {p_a.probs.tolist()} has a zero entry")
    s1, s2 = np.sqrt(p_a.probs)
    e = cmath.exp(1j * phi)
    return StateVector(np.array([s1 + e * s2, s1 - e * s2]) / math.sqrt(2), label)


def state_from_gamma(psi_c: StateVector, w: WMatrix, label: str = "B") -> StateVector:
    """Expand a C-basis state in B components: ``psi_B = W psi_C``."""
    return StateVector(w.matrix @ psi_c.amplitudes, label)


def triple_angles(model: ContextualModel, tol: float = TOL) -> TripleAngles:
    (A, B, C), mats = triple_roles(model, tol)
    pa, pb, pc = (model.distribution(o.label) for o in (A, B, C))
    theta = angle_set(pb, mats["B|A"], pa, tol).theta1
    phi = angle_set(pc, mats["C|A"], pa, tol).theta1
    try:
        chi = angle_set(pb, mats["B|C"], pc, tol).theta1
    except (ValueError, ZeroDivisionError):
        chi = None
    return TripleAngles(theta, phi, chi)


def check_consistency(model: ContextualModel, angles: TripleAngles | None = None,
                      tol: float = CONSTRAINT_TOL) -> ConsistencyReport:
    """Compare ``cos chi`` from the (B, C) data with
    ``sqrt(P(a1)P(a2) / (P(c1)P(c2))) cos theta``.

    With uniform transitions this condition is an identity when ``theta`` is
    read from the same (B, A) data, so ``theta`` is instead predicted from the
    (C, A) data through the angle constraint: ``theta = phi + s pi/2`` with
    the branch ``s`` closest to the (B, A) data.  ``cos chi`` is the raw
    lambda coefficient so a perturbed model still yields a residual when it
    is no longer trigonometric.
    """
    (A, B, C), mats = triple_roles(model)
    pa, pb, pc = (model.distribution(o.label) for o in (A, B, C))
    if angles is None:
        phi = angle_set(pc, mats["C|A"], pa).theta1
        lam_ba = float(lambda_coefficients(
            supplementarity(pb, mats["B|A"], pa), mats["B|A"], pa)[0])
        s = min((1, -1), key=lambda k: abs(lam_ba - math.cos(phi + k * math.pi / 2)))
    else:
        phi = angles.phi
        s = 1 if check_angle_constraint(angles.theta, angles.phi).branch == "+" else -1
    cos_theta = math.cos(phi + s * math.pi / 2)
    lam_bc = lambda_coefficients(supplementarity(pb, mats["B|C"], pc), mats["B|C"], pc)
    ratio = math.sqrt(float(np.prod(pa.probs)) / float(np.prod(pc.probs)))
    expected = ratio * cos_theta
    return ConsistencyReport(
        cos_chi=float(lam_bc[0]),
        expected=expected,
        residual=abs(float(lam_bc[0]) - expected),
        residual_b2=abs(float(lam_bc[1]) + expected),
        trigonometric=bool(np.all(np.abs(lam_bc) <= 1 + TOL)),
        tolerance=tol,
    )


_HALF = [[0.5, 0.5], [0.5, 0.5]]


def generate_consistent_triple(p_a, theta: float, sign: int = 1,
                               outcomes=((1.0, -1.0),) * 3, labels=("A", "B", "C"),
                               context: str = "c") -> ContextualModel:
    """Build data that a triple representation reproduces exactly.

    ``phi = theta - sign * pi/2`` must lie in ``[0, pi]`` so that the angle
    recovered from the C data by ``arccos`` equals ``phi``.  ``P_B`` and
    ``P_C`` are the squared amplitudes of the B and C expansions.
    """
    if sign not in (1, -1):
        raise ModelError("sign must be +1 or -1")
    pa = np.asarray(p_a, dtype=float)
    if pa.shape != (2,) or np.any(pa <= 0) or abs(pa.sum() - 1) > TOL:
        raise DegenerateContext(f"P_A = {pa.tolist()} must be a strictly positive distribution")
    if not 0.0 <= theta <= math.pi:
        raise ModelError(f"theta = {theta} outside [0, pi]")
    phi = theta - sign * math.pi / 2
    if not -TOL <= phi <= math.pi + TOL:
        raise ModelError(
            f"phi = theta - sign*pi/2 = {phi:.6f} is outside [0, pi]; "
            f"use sign {-sign} for this theta"
        )
    s1s2 = math.sqrt(pa[0] * pa[1])
    pb1 = 0.5 + s1s2 * math.cos(theta)
    pc1 = 0.5 + s1s2 * math.cos(phi)
    if min(pc1, 1 - pc1) <= 0:
        raise DegenerateContext(f"derived P_C = ({pc1}, {1 - pc1}) has a zero entry")

    obs = tuple(BinaryObservable(l, tuple(o)) for l, o in zip(labels, outcomes))
    A, B, C = obs
    dists = {
        A.label: ContextualDistribution(A, pa),
        B.label: ContextualDistribution(B, [pb1, 1 - pb1]),
        C.label: ContextualDistribution(C, [pc1, 1 - pc1]),
    }
    trans = {}
    for target, given in ((B, A), (C, A), (B, C)):
        t = TransitionMatrix(target, given, _HALF)
        trans[t.key] = t
    return ContextualModel(context, obs, dists, trans)


def random_consistent_triple(rng: np.random.Generator, margin: float = 0.05,
                             max_pb: float = 0.95) -> tuple[ContextualModel, float, int]:
    """Draw ``(P_A, theta, sign)`` and return a generated triple.

    ``theta`` stays ``margin`` away from the ends of its branch range and
    ``P_B(b1) <= max_pb``.
    """
    while True:
        pa1 = float(rng.uniform(0.05, 0.95))
        sign = int(rng.choice([-1, 1]))
        lo, hi = (math.pi / 2, math.pi) if sign == 1 else (0.0, math.pi / 2)
        theta = float(rng.uniform(lo + margin, hi - margin))
        pb1 = 0.5 + math.sqrt(pa1 * (1 - pa1)) * math.cos(theta)
        if pb1 <= max_pb:
            return generate_consistent_triple([pa1, 1 - pa1], theta, sign), theta, sign


def build_c_operator(obs: BinaryObservable, w: WMatrix,
                     tol: float = CONSTRAINT_TOL) -> Operator2:
    """``C = W diag(c1, c2) W^dagger`` in B components, in closed form.

    With ``d = theta - phi``: diagonal ``c1 |w1|^2 + c2 |w2|^2`` and its swap,
    upper off-diagonal ``(c1 - c2) w1 conj(w2) = (c1 - c2) i sin(d) / 2``.
    """
    excess = abs(abs(w.w1) ** 2 - 0.5)
    if excess > tol:
        raise ConstraintViolated(f"|w1|^2 - 1/2 = {excess:.3e}")
    g1, g2 = obs.outcomes
    n1, n2 = abs(w.w1) ** 2, abs(w.w2) ** 2
    off = (g1 - g2) * w.w1 * w.w2.conjugate()
    m = np.array([[g1 * n1 + g2 * n2, off], [off.conjugate(), g1 * n2 + g2 * n1]])
    return Operator2(m, "B")


@dataclass
class TripleRepresentation:
    angles: TripleAngles
    constraint: ConstraintCheck
    consistency: ConsistencyReport
    pair: BinaryRepresentation
    w: WMatrix
    c_basis: Basis2
    state_c: StateVector
    c_operator: Operator2
    verification: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.pair.ok and all(v["passed"] for v in self.verification.values())


def represent_triple(model: ContextualModel, gauge: Gauge = 0.0,
                     tol: float = TOL) -> TripleRepresentation:
    (A, B, C), mats = triple_roles(model, tol)
    pa, pb, pc = (model.distribution(o.label) for o in (A, B, C))
    angles = triple_angles(model, tol)
    constraint = check_angle_constraint(angles.theta, angles.phi)
    if not constraint.ok:
        raise ConstraintViolated(
            f"theta - phi = {angles.theta - angles.phi:.12f} is not +-pi/2 "
            f"(residual {constraint.residual:.3e})"
        )
    pair = represent(model, gauge, A.label, B.label, tol)
    w = build_w_matrix(angles.theta, angles.phi)
    c_basis = gamma_basis(w, label=C.label)
    psi_c = state_in_gamma_basis(pa, angles.phi, C.label)
    psi_b = state_from_gamma(psi_c, w, B.label)
    c_op = build_c_operator(C, w)
    c_op = Operator2(c_op.matrix, B.label)
    consistency = check_consistency(model, angles)

    overlaps = np.abs(c_basis.vectors.conj() @ np.eye(2)) ** 2
    sign = 1 if constraint.branch == "+" else -1
    s1s2 = math.sqrt(float(np.prod(pa.probs)))
    decomposition = (mats["B|C"].matrix[0] @ pc.probs) - sign * s1s2 * math.sin(angles.phi)

    def check(residual: float, limit: float) -> dict:
        return {"residual": float(residual), "tolerance": limit, "passed": residual <= limit}

    verification = {
        "w_unitary": check(w.unitarity_residual(), 1e-10),
        "constraint": check(constraint.residual, CONSTRAINT_TOL),
        "consistency": check(consistency.residual, CONSTRAINT_TOL),
        "round_trip": check(np.max(np.abs(psi_b.amplitudes - pair.state.amplitudes)), 1e-12),
        "born_c": check(np.max(np.abs(psi_c.probabilities - pc.probs)), tol),
        "c_basis_orthonormal": check(c_basis.orthonormality_residual(), 1e-10),
        "b_c_doubly_stochastic": check(np.max(np.abs(overlaps - 0.5)), 1e-10),
        "c_hermitian": check(c_op.hermitian_residual(), 1e-10),
        "c_eigenvalues": check(c_op.eigenvalue_residual(C.outcomes), 1e-10),
        "b_decomposition": check(abs(decomposition - pb.probs[0]), 1e-12),
    }
    return TripleRepresentation(angles, constraint, consistency, pair, w, c_basis,
                                psi_c, c_op, verification)


@dataclass
class SpinReport:
    representation: TripleRepresentation
    pauli_residuals: dict
    gamma_residuals: dict
    g: float
    f: float

    @property
    def exact(self) -> bool:
        return all(v <= 1e-15 for v in self.pauli_residuals.values())


def spin_report(rep: TripleRepresentation) -> SpinReport:
    """Compare a triple representation with the Pauli matrices and the
    ``zeta``-rotated ``sigma_y`` eigenvectors."""
    y_plus = np.array([1, 1j]) / math.sqrt(2)
    y_minus = np.array([1, -1j]) / math.sqrt(2)
    pauli = {
        "sigma_z": float(np.max(np.abs(rep.pair.b_operator.matrix - SIGMA_Z))),
        "sigma_x": float(np.max(np.abs(rep.pair.a_operator.matrix - SIGMA_X))),
        "sigma_y": float(np.max(np.abs(rep.c_operator.matrix - SIGMA_Y))),
    }
    gamma = {
        "c1": float(np.max(np.abs(rep.c_basis.ket(0) - ZETA * y_plus))),
        "c2": float(np.max(np.abs(rep.c_basis.ket(1) - ZETA.conjugate() * y_minus))),
    }
    amp = rep.pair.state.amplitudes
    g = float(abs(amp[0]))
    f = float(cmath.phase(amp[1]) - cmath.phase(amp[0]))
    return SpinReport(rep, pauli, gamma, g, f)


def spin_from_model(model: ContextualModel) -> SpinReport:
    """Spin report for a triple model with +-1 outcomes on the ``-pi/2`` branch."""
    for o in model.observables:
        if o.outcomes != (1.0, -1.0):
            raise ModelError(f"spin models need outcomes (1, -1); {o.label!r} has {o.outcomes}")
    rep = represent_triple(model, gauge="context-independent")
    if rep.constraint.branch != "-":
        raise ConstraintViolated("spin models need theta - phi = -pi/2")
    return spin_report(rep)


def spin_representation(p_a, theta: float) -> SpinReport:
    """Spin-1/2 case: outcomes all +-1, ``theta - phi = -pi/2``, gauge
    ``omega = theta`` on both pairs.

    The operators come out as ``sigma_z`` (B), ``sigma_x`` (A) and
    ``sigma_y`` (C); the C kets are ``zeta |y+>`` and ``conj(zeta) |y->`` with
    ``zeta = exp(-i pi/4)``.  The state is reported as
    ``G |b1> + sqrt(1 - G^2) e^{iF} |b2>`` up to a global phase.
    """
    return spin_from_model(generate_consistent_triple(p_a, theta, sign=-1))
