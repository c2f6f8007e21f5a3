"""Finite classical probability spaces used as a generator and exact oracle.

Events are boolean masks over the elementary outcomes (the event algebra is
the full power set).  A context is an event of positive probability;
conditioning on it yields contextual distributions, while transition
probabilities ``P(b|a)`` come from the selection events ``{A = a}`` over the
whole space.  Data derived this way generally violates the classical law of
total probability inside the context.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .contextual import (
    BinaryObservable,
    ContextualDistribution,
    ContextualModel,
    TransitionMatrix,
)
from .continuous import ContinuousModel, Grid
from .errors import ModelError, ZeroConditioning

__all__ = [
    "FiniteSpace",
    "conditional_probability",
    "verify_total_probability",
    "derive_contextual_model",
    "contextual_transition_density",
    "total_probability_residual",
    "random_space",
    "uniform_pair_space",
    "LiftedEmbedding",
    "lift_to_grid",
]

Event = np.ndarray


@dataclass(frozen=True, eq=False)
class FiniteSpace:
    weights: np.ndarray
    variables: Mapping[str, np.ndarray]
    events: Mapping[str, np.ndarray] = field(default_factory=dict)
    outcomes: tuple = ()

    def __post_init__(self):
        w = np.array(self.weights, dtype=float).reshape(-1)
        n = len(w)
        if n == 0 or np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ModelError("weights must be nonnegative and sum to 1")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        if not self.outcomes:
            object.__setattr__(self, "outcomes", tuple(range(n)))
        elif len(self.outcomes) != n:
            raise ModelError("one outcome label per weight")
        variables = {}
        for name, values in self.variables.items():
            v = np.array(values, dtype=float).reshape(-1)
            if v.shape != (n,):
                raise ModelError(f"variable {name!r} must assign a value to every outcome")
            v.setflags(write=False)
            variables[name] = v
        object.__setattr__(self, "variables", variables)
        events = {name: self.as_event(e) for name, e in self.events.items()}
        object.__setattr__(self, "events", events)

    @property
    def size(self) -> int:
        return len(self.weights)

    def as_event(self, e) -> Event:
        """Accept a mask, an iterable of outcome indices or an event name."""
        if isinstance(e, str):
            if e not in self.events:
                raise ModelError(f"unknown event {e!r}")
            return self.events[e]
        arr = np.asarray(e)
        if arr.dtype == bool:
            if arr.shape != (self.size,):
                raise ModelError("event mask has the wrong length")
            out = arr.copy()
        else:
            out = np.zeros(self.size, dtype=bool)
            out[np.asarray(list(e), dtype=int)] = True
        out.setflags(write=False)
        return out

    @property
    def omega(self) -> Event:
        return np.ones(self.size, dtype=bool)

    def prob(self, e) -> float:
        return float(self.weights[self.as_event(e)].sum())

    def values(self, var: str) -> tuple[float, ...]:
        """Distinct values of ``var`` in descending order."""
        if var not in self.variables:
            raise ModelError(f"unknown variable {var!r}")
        return tuple(sorted(set(self.variables[var].tolist()), reverse=True))

    def level(self, var: str, value: float) -> Event:
        return self.variables[var] == value


def conditional_probability(space: FiniteSpace, f, g) -> float:
    """``P(F | G) = P(F and G) / P(G)``."""
    g = space.as_event(g)
    pg = space.prob(g)
    if pg <= 0:
        raise ZeroConditioning("conditioning event has probability zero")
    return space.prob(space.as_event(f) & g) / pg


def verify_total_probability(space: FiniteSpace, partition: Iterable, g) -> float:
    """``|P(G) - sum_n P(G | F_n) P(F_n)|`` over a partition of the space.

    Cells of probability zero are skipped with a warning.
    """
    cells = [space.as_event(c) for c in partition]
    cover = np.sum(np.array(cells, dtype=int), axis=0) if cells else np.zeros(space.size)
    if np.any(cover != 1):
        raise ModelError("cells must be disjoint and cover every outcome")
    total = 0.0
    for n, cell in enumerate(cells):
        pf = space.prob(cell)
        if pf <= 0:
            warnings.warn(f"partition cell {n} has probability zero and is skipped",
                          stacklevel=2)
            continue
        total += conditional_probability(space, g, cell) * pf
    return abs(space.prob(g) - total)


def _binary_observable(space: FiniteSpace, var: str) -> BinaryObservable:
    vals = space.values(var)
    if len(vals) != 2:
        raise ModelError(f"variable {var!r} takes {len(vals)} values, need exactly two")
    return BinaryObservable(var, vals)


def derive_contextual_model(space: FiniteSpace, variables: Sequence[str], context="c",
                            label: str | None = None) -> ContextualModel:
    """Contextual model for ``variables`` (``[A, B]`` or ``[A, B, C]``).

    Distributions are conditioned on the context event; ``P(b|a)`` is
    ``P({B=b} | {A=a})`` over the whole space.
    """
    if len(variables) not in (2, 3):
        raise ModelError("derive_contextual_model takes two or three variables")
    c = space.as_event(context)
    if space.prob(c) <= 0:
        raise ZeroConditioning("context has probability zero")
    obs = [_binary_observable(space, v) for v in variables]
    dists = {
        o.label: ContextualDistribution(
            o, [conditional_probability(space, space.level(o.label, x), c) for x in o.outcomes])
        for o in obs
    }
    roles = [(obs[1], obs[0])]
    if len(obs) == 3:
        roles += [(obs[2], obs[0]), (obs[1], obs[2])]
    trans = {}
    for target, given in roles:
        m = np.empty((2, 2))
        for j, a in enumerate(given.outcomes):
            sel = space.level(given.label, a)
            if space.prob(sel) <= 0:
                raise ZeroConditioning(f"selection event {{{given.label}={a}}} has probability zero")
            for i, b in enumerate(target.outcomes):
                m[i, j] = conditional_probability(space, space.level(target.label, b), sel)
        t = TransitionMatrix(target, given, m)
        trans[t.key] = t
    if label is None:
        label = context if isinstance(context, str) else "c"
    return ContextualModel(label, tuple(obs), dists, trans)


def contextual_transition_density(space: FiniteSpace, target: str, given: str,
                                  context="c") -> np.ndarray:
    """``M[b, x] = P({B=b} | {X=x} and c)``, outcomes in descending order."""
    c = space.as_event(context)
    tv, gv = space.values(target), space.values(given)
    m = np.empty((len(tv), len(gv)))
    for j, x in enumerate(gv):
        cond = space.level(given, x) & c
        if space.prob(cond) <= 0:
            raise ZeroConditioning(f"event {{{given}={x}}} and context has probability zero")
        for i, b in enumerate(tv):
            m[i, j] = conditional_probability(space, space.level(target, b), cond)
    return m


def total_probability_residual(space: FiniteSpace, target: str, given: str,
                               context="c") -> float:
    """``max_b |P_c(B=b) - sum_x P(b | x, c) P_c(X=x)|``."""
    c = space.as_event(context)
    m = contextual_transition_density(space, target, given, c)
    pb = np.array([conditional_probability(space, space.level(target, b), c)
                   for b in space.values(target)])
    px = np.array([conditional_probability(space, space.level(given, x), c)
                   for x in space.values(given)])
    return float(np.max(np.abs(pb - m @ px)))


def _dyadic_weights(rng: np.random.Generator, n: int, bits: int) -> np.ndarray:
    counts = rng.multinomial(2 ** bits - n, np.full(n, 1.0 / n)) + 1
    return counts / 2.0 ** bits


def random_space(rng: np.random.Generator, n: int = 8, bits: int = 6,
                 names: Sequence[str] = ("A", "B", "C")) -> FiniteSpace:
    """Random space with dyadic weights, binary +-1 variables and a context.

    Every outcome has positive weight, every variable takes both values and
    the context ``"c"`` is a proper subset with at least two outcomes.
    """
    if n < 3:
        raise ModelError("need at least three outcomes")
    weights = _dyadic_weights(rng, n, bits)
    variables = {}
    for name in names:
        while True:
            v = rng.choice([1.0, -1.0], size=n)
            if len(set(v.tolist())) == 2:
                break
        variables[name] = v
    size = int(rng.integers(2, n))
    ctx = np.zeros(n, dtype=bool)
    ctx[rng.choice(n, size=size, replace=False)] = True
    return FiniteSpace(weights, variables, {"c": ctx})


def uniform_pair_space(rng: np.random.Generator, copies: int = 2) -> FiniteSpace:
    """Symmetric family: A, B are the coordinates of ``{+-1}^2``.

    Each of the four cells is repeated ``copies`` times and all outcomes have
    equal weight, so ``P(b|a) = 1/2`` over the whole space.  The context is a
    random subset on which both A and B still take both values, which
    correlates them inside the context.
    """
    cells = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] * copies
    n = len(cells)
    a = np.array([c[0] for c in cells])
    b = np.array([c[1] for c in cells])
    while True:
        ctx = rng.random(n) < 0.5
        if len(set(a[ctx].tolist())) == 2 and len(set(b[ctx].tolist())) == 2:
            break
    return FiniteSpace(np.full(n, 1.0 / n), {"A": a, "B": b}, {"c": ctx}, tuple(range(n)))


@dataclass(frozen=True, eq=False)
class LiftedEmbedding:
    model: ContinuousModel
    grid_x: Grid
    p_x_given_a: np.ndarray
    p_b_given_x: np.ndarray


def _grid_for(space: FiniteSpace, var: str) -> tuple[Grid, tuple[float, ...]]:
    vals = tuple(sorted(space.values(var)))
    if len(vals) < 2:
        raise ModelError(f"variable {var!r} is constant")
    step = vals[1] - vals[0]
    if not np.allclose(np.diff(vals), step):
        raise ModelError(f"values of {var!r} are not uniformly spaced")
    return Grid(vals[0], vals[-1], len(vals)), vals


def lift_to_grid(space: FiniteSpace, a: str, b: str, x: str, context="c") -> LiftedEmbedding:
    """Piecewise-constant lift of a finite space to grids at the variable values.

    Densities are probabilities divided by the quadrature weight of their
    cell; transition densities are divided by the weight of the target cell.
    Grid order is ascending.
    """
    c = space.as_event(context)
    ga, va = _grid_for(space, a)
    gb, vb = _grid_for(space, b)
    gx, vx = _grid_for(space, x)

    def marg(var, vals, grid):
        return np.array([conditional_probability(space, space.level(var, v), c)
                         for v in vals]) / grid.weights

    def trans(tvar, tvals, tgrid, gvar, gvals, within):
        m = np.empty((len(tvals), len(gvals)))
        for j, g in enumerate(gvals):
            cond = space.level(gvar, g) & within
            for i, t in enumerate(tvals):
                m[i, j] = conditional_probability(space, space.level(tvar, t), cond)
        return m / tgrid.weights[:, None]

    rho_a, rho_b = marg(a, va, ga), marg(b, vb, gb)
    kernel = trans(a, va, ga, b, vb, space.omega)  # p(a|b): (Na, Nb)
    model = ContinuousModel(ga, gb, rho_a, rho_b, kernel)
    p_x_given_a = trans(x, vx, gx, a, va, c)
    p_b_given_x = trans(b, vb, gb, x, vx, c)
    return LiftedEmbedding(model, gx, p_x_given_a, p_b_given_x)
