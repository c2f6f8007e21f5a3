"""Contextual probabilistic data for binary observables.

A contextual model collects, for a single context ``c``, the distribution of
every observable and the transition matrices ``P(b|a)`` obtained from the
a-selection contexts.  This module holds the shared domain types and the
quantities every representation algorithm starts from: the supplementarity
coefficient ``delta``, its normalized form ``lambda`` and the probabilistic
angle ``theta``.

Outcome ordering is always the declaration order of the observable.  Arrays
returned here are indexed in that order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import DegenerateContext, ModelError, NonTrigonometricContext

__all__ = [
    "TOL",
    "BinaryObservable",
    "ContextualDistribution",
    "TransitionMatrix",
    "AngleSet",
    "ContextualModel",
    "Check",
    "ValidationReport",
    "supplementarity",
    "lambda_coefficient",
    "lambda_coefficients",
    "probabilistic_angles",
    "angle_set",
    "validate_model",
]

#: Absolute tolerance for normalization and identity checks on discrete data.
TOL = 1e-12


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class BinaryObservable:
    label: str
    outcomes: tuple[float, float]

    def __post_init__(self):
        if len(self.outcomes) != 2:
            raise ModelError(f"observable {self.label!r} needs exactly two outcomes")
        a1, a2 = (float(v) for v in self.outcomes)
        if not (math.isfinite(a1) and math.isfinite(a2)):
            raise ModelError(f"observable {self.label!r} has non-finite outcomes")
        if a1 == a2:
            raise ModelError(f"observable {self.label!r} has coincident outcomes {a1}")
        object.__setattr__(self, "outcomes", (a1, a2))

    def index(self, outcome: float) -> int:
        try:
            return self.outcomes.index(float(outcome))
        except ValueError:
            raise ModelError(f"{outcome} is not an outcome of {self.label!r}") from None


@dataclass(frozen=True)
class ContextualDistribution:
    """Probabilities of the two outcomes of one observable in the context.

    Construction only checks the shape; normalization is reported by
    :func:`validate_model` so that broken data can still be inspected.
    """

    observable: BinaryObservable
    probs: np.ndarray

    def __post_init__(self):
        p = np.array(self.probs, dtype=float).reshape(-1)
        if p.shape != (2,) or not np.all(np.isfinite(p)):
            raise ModelError(
                f"distribution of {self.observable.label!r} needs two finite numbers"
            )
        object.__setattr__(self, "probs", _readonly(p))

    def __getitem__(self, outcome: float) -> float:
        return float(self.probs[self.observable.index(outcome)])

    def normalization_residual(self) -> float:
        return abs(float(self.probs.sum()) - 1.0)

    def is_valid(self, tol: float = TOL) -> bool:
        in_range = bool(np.all(self.probs >= -tol) and np.all(self.probs <= 1 + tol))
        return in_range and self.normalization_residual() <= tol

    def is_nondegenerate(self) -> bool:
        return bool(np.all(self.probs > 0))


@dataclass(frozen=True)
class TransitionMatrix:
    """Transition probabilities ``P(target=b | given=a)``.

    ``matrix[i, j]`` is ``P(b_i | a_j)``: rows follow the target outcomes,
    columns the conditioning outcomes.
    """

    target: BinaryObservable
    given: BinaryObservable
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.shape != (2, 2) or not np.all(np.isfinite(m)):
            raise ModelError(
                f"transition {self.key!r} must be a finite 2x2 matrix, got shape {m.shape}"
            )
        object.__setattr__(self, "matrix", _readonly(m))

    @property
    def key(self) -> str:
        return f"{self.target.label}|{self.given.label}"

    def prob(self, b: float, a: float) -> float:
        return float(self.matrix[self.target.index(b), self.given.index(a)])

    def stochastic_residual(self) -> float:
        return float(np.max(np.abs(self.matrix.sum(axis=0) - 1.0)))

    def is_stochastic(self, tol: float = TOL) -> bool:
        m = self.matrix
        return bool(np.all(m >= -tol) and np.all(m <= 1 + tol)) and (
            self.stochastic_residual() <= tol
        )

    def is_doubly_stochastic(self, tol: float = TOL) -> bool:
        return self.is_stochastic(tol) and bool(
            np.max(np.abs(self.matrix.sum(axis=1) - 1.0)) <= tol
        )

    def symmetry_residual(self, reverse: TransitionMatrix | None = None) -> float:
        """Largest violation of ``P(b|a) = P(a|b)``.

        With ``reverse`` (the ``a|b`` matrix) the comparison is entrywise
        against its transpose.  Without it the reverse is taken to be
        ``matrix.T``, which is only a valid conditional matrix when the rows
        of ``matrix`` also sum to one, so the row-sum defect is returned.
        """
        if reverse is None:
            return float(np.max(np.abs(self.matrix.sum(axis=1) - 1.0)))
        if (reverse.target.label != self.given.label
                or reverse.given.label != self.target.label):
            raise ModelError(f"{reverse.key!r} is not the reverse of {self.key!r}")
        return float(np.max(np.abs(self.matrix - reverse.matrix.T)))

    def is_symmetric(self, reverse: TransitionMatrix | None = None, tol: float = TOL) -> bool:
        return self.is_stochastic(tol) and self.symmetry_residual(reverse) <= tol

    def is_uniform(self, tol: float = TOL) -> bool:
        """All entries equal 1/2."""
        return bool(np.max(np.abs(self.matrix - 0.5)) <= tol)


@dataclass(frozen=True)
class AngleSet:
    """Supplementarity data for one ordered pair, indexed by target outcome."""

    outcomes: tuple[float, float]
    delta: np.ndarray
    lam: np.ndarray
    theta: np.ndarray

    @property
    def trigonometric(self) -> bool:
        return bool(np.all(np.abs(self.lam) <= 1 + TOL))

    @property
    def theta1(self) -> float:
        return float(self.theta[0])


@dataclass(frozen=True, eq=False)
class ContextualModel:
    context: str
    observables: tuple[BinaryObservable, ...]
    distributions: Mapping[str, ContextualDistribution]
    transitions: Mapping[str, TransitionMatrix] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "observables", tuple(self.observables))
        labels = [o.label for o in self.observables]
        if len(set(labels)) != len(labels):
            raise ModelError(f"duplicate observable labels in {labels}")
        for key, t in self.transitions.items():
            if key != t.key:
                raise ModelError(f"transition stored under {key!r} but describes {t.key!r}")
            for obs in (t.target, t.given):
                if obs.label not in labels:
                    raise ModelError(f"transition {key!r} references unknown {obs.label!r}")

    def observable(self, label: str) -> BinaryObservable:
        for o in self.observables:
            if o.label == label:
                return o
        raise ModelError(f"no observable labelled {label!r}")

    def distribution(self, label: str) -> ContextualDistribution:
        try:
            return self.distributions[label]
        except KeyError:
            raise ModelError(f"no distribution for observable {label!r}") from None

    def transition(self, target: str, given: str) -> TransitionMatrix:
        key = f"{target}|{given}"
        try:
            return self.transitions[key]
        except KeyError:
            raise ModelError(f"no transition matrix {key!r}") from None

    def reverse_of(self, t: TransitionMatrix) -> TransitionMatrix | None:
        return self.transitions.get(f"{t.given.label}|{t.target.label}")


def _check_pair(p_b: ContextualDistribution, t: TransitionMatrix, p_a: ContextualDistribution):
    if t.target.label != p_b.observable.label or t.given.label != p_a.observable.label:
        raise ModelError(
            f"transition {t.key!r} does not match distributions "
            f"{p_b.observable.label!r}, {p_a.observable.label!r}"
        )


def supplementarity(
    p_b: ContextualDistribution, t: TransitionMatrix, p_a: ContextualDistribution
) -> np.ndarray:
    """Deviation of ``P_c^B`` from the classical law of total probability.

    Returns ``delta[i] = P_c^B(b_i) - sum_j P(b_i|a_j) P_c^A(a_j)``.
    """
    _check_pair(p_b, t, p_a)
    return p_b.probs - t.matrix @ p_a.probs


def lambda_coefficient(
    delta: float, t: TransitionMatrix, p_a: ContextualDistribution, index: int
) -> float:
    """``delta / (2 sqrt(prod_a P(b|a) P_c^A(a)))`` for target outcome ``index``."""
    factors = t.matrix[index] * p_a.probs
    if np.any(factors <= 0):
        raise DegenerateContext(
            f"zero factor in the denominator of lambda for {t.key!r} "
            f"(P(b|a) P_c(a) = {factors.tolist()})"
        )
    return float(delta / (2.0 * math.sqrt(float(np.prod(factors)))))


def lambda_coefficients(
    delta: np.ndarray, t: TransitionMatrix, p_a: ContextualDistribution
) -> np.ndarray:
    return np.array([lambda_coefficient(delta[i], t, p_a, i) for i in range(2)])


def probabilistic_angles(lambdas: Sequence[float], tol: float = TOL) -> np.ndarray:
    """Angles ``theta`` with ``cos(theta) = lambda``.

    ``theta[0]`` is the principal ``arccos`` in ``[0, pi]``.  When
    ``lambda[1] = -lambda[0]`` (every symmetrically conditioned pair)
    ``theta[1] = theta[0] - pi`` so that ``exp(i theta[0]) = -exp(i theta[1])``
    holds exactly; otherwise ``theta[1] = -arccos(lambda[1])``, which lies on
    the same lower branch.
    """
    lam = np.asarray(lambdas, dtype=float)
    bad = np.abs(lam) > 1 + tol
    if np.any(bad):
        raise NonTrigonometricContext(
            f"|lambda| > 1 for outcome index {int(np.argmax(bad))}: lambda = {lam.tolist()}"
        )
    lam = np.clip(lam, -1.0, 1.0)
    theta1 = math.acos(lam[0])
    if abs(lam[0] + lam[1]) <= tol:
        theta2 = theta1 - math.pi
    else:
        theta2 = -math.acos(lam[1])
    return np.array([theta1, theta2])


def angle_set(
    p_b: ContextualDistribution, t: TransitionMatrix, p_a: ContextualDistribution,
    tol: float = TOL,
) -> AngleSet:
    """delta, lambda and theta for the ordered pair (B, A) in one go."""
    delta = supplementarity(p_b, t, p_a)
    lam = lambda_coefficients(delta, t, p_a)
    theta = probabilistic_angles(lam, tol)
    return AngleSet(p_b.observable.outcomes, _readonly(delta), _readonly(lam), _readonly(theta))


@dataclass(frozen=True)
class Check:
    name: str
    subject: str
    passed: bool
    detail: dict = field(default_factory=dict)


@dataclass
class ValidationReport:
    checks: list[Check] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    @property
    def flags(self) -> list[str]:
        out = []
        for c in self.failures:
            flag = "non_trigonometric" if c.name == "trigonometric" else c.name + "_failed"
            if flag not in out:
                out.append(flag)
        return out

    def get(self, name: str, subject: str) -> Check:
        for c in self.checks:
            if c.name == name and c.subject == subject:
                return c
        raise KeyError((name, subject))

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "flags": self.flags,
            "checks": [
                {"name": c.name, "subject": c.subject, "passed": c.passed, **c.detail}
                for c in self.checks
            ],
        }


def validate_model(m: ContextualModel, tol: float = TOL) -> ValidationReport:
    """Run every data-level invariant and collect pass/fail results."""
    report = ValidationReport()
    add = report.checks.append

    for obs in m.observables:
        if obs.label not in m.distributions:
            add(Check("has_distribution", obs.label, False))
            continue
        d = m.distributions[obs.label]
        add(Check("normalized", obs.label, d.is_valid(tol),
                  {"sum": float(d.probs.sum()), "residual": d.normalization_residual()}))
        add(Check("non_degenerate", obs.label, d.is_nondegenerate(),
                  {"probs": d.probs.tolist()}))

    for key, t in m.transitions.items():
        add(Check("stochastic", key, t.is_stochastic(tol),
                  {"residual": t.stochastic_residual()}))
        reverse = m.reverse_of(t)
        add(Check("symmetric_conditioning", key, t.is_symmetric(reverse, tol),
                  {"residual": t.symmetry_residual(reverse),
                   "reverse_given": reverse is not None}))
        add(Check("doubly_stochastic", key, t.is_doubly_stochastic(tol)))

        p_b = m.distributions.get(t.target.label)
        p_a = m.distributions.get(t.given.label)
        if p_b is None or p_a is None:
            continue
        try:
            delta = supplementarity(p_b, t, p_a)
            lam = lambda_coefficients(delta, t, p_a)
        except DegenerateContext as exc:
            add(Check("trigonometric", key, False, {"error": str(exc)}))
            continue
        add(Check("trigonometric", key, bool(np.all(np.abs(lam) <= 1 + tol)),
                  {"delta": delta.tolist(), "lambda": lam.tolist()}))
    return report
