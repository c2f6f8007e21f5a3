"""Grid-discretized continuous QLRA.

Conventions
-----------
* Both observables live on uniform grids with trapezoidal weights ``w`` (A)
  and ``v`` (B).  Integrals are ``sum(weights * values)``.
* ``kernel[i, j] = p(a_i | b_j)``, shape ``(Na, Nb)``.  Symmetric conditioning
  means the same array also gives ``p(b_j | a_i)``.
* The model overlap is ``<b|a> = sqrt(nu p(a|b)) exp(-i eta(a, b))`` where
  ``nu`` (``overlap_scale``) converts the transition density into a squared
  overlap on a finite grid.  The state is real in the A basis
  (``psi(a) = sqrt(rho_A(a))``), hence

      psi(b_j) = sqrt(nu) sum_i w_i sqrt(p_ij) exp(-i eta_ij) s_i,
      rho_B(b_j) = |psi(b_j)|^2,      s_i = sqrt(rho_A(a_i)).

* A functional derivative ``delta F / delta s(a_i)`` is
  ``(1 / w_i) dF/ds_i``.  The mixed second derivative of ``rho_B`` is then
  ``2 nu sqrt(p_ij p_kj) cos(eta_ij - eta_kj)`` for ``i != k``.
* The phase field ``theta[j, i, k]`` stands for ``theta_{b_j}(a_i, a_k)``.
  Only ``cos`` is identifiable from data, so the recovered field stores
  ``+arccos`` for ``i < k`` and ``-arccos`` for ``i > k``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    DegenerateContext,
    EmbeddingError,
    ModelError,
    NonTrigonometricContext,
    OracleFailure,
)

__all__ = [
    "DENSITY_TOL",
    "CLAMP_TOL",
    "DEFAULT_FD_STEP",
    "Grid",
    "ContinuousModel",
    "SyntheticOracle",
    "Synthesis",
    "PhaseField",
    "KernelOperator",
    "EmbeddingResult",
    "continuous_supplementarity",
    "supplementarity_from_phase",
    "synthesize_model",
    "mixed_difference",
    "theta_from_oracle",
    "recover_phase_field",
    "phase_field_from_eta",
    "fold_angle",
    "b_matrix_elements",
    "verify_mixed_derivative_identity",
    "theta_from_embedding",
    "embedding_closed_form",
    "gaussian_test_model",
    "two_point_model",
    "resolve_two_point_signs",
    "b_amplitudes_from_phase",
]

DENSITY_TOL = 1e-8
CLAMP_TOL = 1e-9
DEFAULT_FD_STEP = 1e-2

Oracle = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Grid:
    lower: float
    upper: float
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ModelError(f"grid needs n >= 2 points, got {self.n}")
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)) or self.upper <= self.lower:
            raise ModelError(f"grid bounds [{self.lower}, {self.upper}] are not increasing")
        object.__setattr__(self, "n", int(self.n))

    @property
    def spacing(self) -> float:
        return (self.upper - self.lower) / (self.n - 1)

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.lower, self.upper, self.n)

    @property
    def weights(self) -> np.ndarray:
        w = np.full(self.n, self.spacing)
        w[0] = w[-1] = self.spacing / 2
        return w

    def integrate(self, values: np.ndarray, axis: int = 0) -> np.ndarray:
        values = np.asarray(values)
        shape = [1] * values.ndim
        shape[axis] = self.n
        return np.sum(values * self.weights.reshape(shape), axis=axis)

    def to_dict(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "n": self.n}


def _frozen(arr, dtype=float) -> np.ndarray:
    a = np.array(arr, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ContinuousModel:
    grid_a: Grid
    grid_b: Grid
    rho_a: np.ndarray
    rho_b: np.ndarray
    kernel: np.ndarray
    eta: np.ndarray | None = None
    overlap_scale: float = 1.0

    def __post_init__(self):
        na, nb = self.grid_a.n, self.grid_b.n
        object.__setattr__(self, "rho_a", _frozen(self.rho_a).reshape(-1))
        object.__setattr__(self, "rho_b", _frozen(self.rho_b).reshape(-1))
        object.__setattr__(self, "kernel", _frozen(self.kernel))
        if self.eta is not None:
            object.__setattr__(self, "eta", _frozen(self.eta))
        if self.rho_a.shape != (na,) or self.rho_b.shape != (nb,):
            raise ModelError(
                f"densities must match the grids ({na}, {nb}); got "
                f"{self.rho_a.shape}, {self.rho_b.shape}"
            )
        if self.kernel.shape != (na, nb):
            raise ModelError(f"kernel must have shape ({na}, {nb}), got {self.kernel.shape}")
        if self.eta is not None and self.eta.shape != (na, nb):
            raise ModelError(f"eta must have shape ({na}, {nb}), got {self.eta.shape}")
        if not self.overlap_scale > 0:
            raise ModelError("overlap_scale must be positive")

    @property
    def amplitudes(self) -> np.ndarray:
        return np.sqrt(np.clip(self.rho_a, 0.0, None))

    def check(self, tol: float = DENSITY_TOL) -> dict:
        """Per-invariant results: nonnegativity, normalization, kernel
        normalization in both directions and symmetric conditioning."""
        ga, gb = self.grid_a, self.grid_b
        out = {}

        def add(name, residual, passed=None):
            residual = float(residual)
            out[name] = {"residual": residual,
                         "passed": bool(residual <= tol if passed is None else passed)}

        add("rho_a_nonnegative", max(0.0, -float(self.rho_a.min())))
        add("rho_b_nonnegative", max(0.0, -float(self.rho_b.min())))
        add("kernel_nonnegative", max(0.0, -float(self.kernel.min())))
        add("rho_a_normalized", abs(float(ga.integrate(self.rho_a)) - 1))
        add("rho_b_normalized", abs(float(gb.integrate(self.rho_b)) - 1))
        add("kernel_a_normalized", np.max(np.abs(ga.integrate(self.kernel, axis=0) - 1)))
        add("kernel_b_normalized", np.max(np.abs(gb.integrate(self.kernel, axis=1) - 1)))
        if ga == gb:
            add("symmetric_conditioning", np.max(np.abs(self.kernel - self.kernel.T)))
        return out

    def is_valid(self, tol: float = DENSITY_TOL) -> bool:
        return all(c["passed"] for c in self.check(tol).values())


def continuous_supplementarity(m: ContinuousModel) -> np.ndarray:
    """``omega(b) = rho_B(b) - int p(b|a) rho_A(a) da`` on the B grid."""
    return m.rho_b - m.grid_a.integrate(m.kernel * m.rho_a[:, None], axis=0)


def supplementarity_from_phase(m: ContinuousModel, theta: np.ndarray) -> np.ndarray:
    """Brute-force double sum for omega given a phase field.

    The off-diagonal part is
    ``sum_{i != k} w_i w_k nu sqrt(p_ij p_kj rho_i rho_k) cos(theta[j, i, k])``.
    On a grid the diagonal ``i = k`` terms of ``|psi(b)|^2`` do not cancel the
    classical term exactly, so the defect ``sum_i (nu w_i - 1) w_i p_ij rho_i``
    is added.  It is the grid image of the excluded diagonal ``a = a'``.
    """
    w, nu = m.grid_a.weights, m.overlap_scale
    a = np.sqrt(m.kernel * m.rho_a[:, None]) * w[:, None]  # (Na, Nb)
    cross = np.einsum("ij,kj,jik->j", a, a, np.cos(theta))
    diag = np.einsum("ij,ij->j", a, a)
    off = nu * (cross - diag)
    defect = np.sum(((nu * w - 1.0) * w * m.rho_a)[:, None] * m.kernel, axis=0)
    return off + defect


class SyntheticOracle:
    """Ground-truth map ``s -> rho_B`` for a known phase kernel ``eta``.

    Accepts amplitudes of shape ``(Na,)`` or ``(Na, m)`` and returns
    ``(Nb,)`` or ``(Nb, m)``.
    """

    def __init__(self, grid_a: Grid, kernel: np.ndarray, eta: np.ndarray,
                 overlap_scale: float = 1.0):
        kernel = np.asarray(kernel, dtype=float)
        eta = np.asarray(eta, dtype=float)
        if kernel.shape != eta.shape or kernel.shape[0] != grid_a.n:
            raise ModelError("kernel and eta must both have shape (Na, Nb)")
        self.grid_a = grid_a
        self.overlap_scale = float(overlap_scale)
        amp = np.sqrt(overlap_scale) * np.sqrt(kernel) * np.exp(-1j * eta)
        self.matrix = (grid_a.weights[:, None] * amp).T  # (Nb, Na)

    def amplitudes(self, s: np.ndarray) -> np.ndarray:
        return self.matrix @ s

    def __call__(self, s: np.ndarray) -> np.ndarray:
        return np.abs(self.matrix @ s) ** 2


@dataclass(frozen=True)
class Synthesis:
    model: ContinuousModel
    oracle: SyntheticOracle
    normalization_residual: float

    @property
    def normalizable(self) -> bool:
        return self.normalization_residual <= 1e-6


def synthesize_model(rho_a, grid_a: Grid, grid_b: Grid, kernel, eta,
                     overlap_scale: float = 1.0, renormalize: bool = True) -> Synthesis:
    """Build ``rho_B`` from ``rho_A`` and the phase kernel.

    The raw quadrature of ``rho_B`` deviates from one when the discretized
    kernel is not exactly unitary; that deviation is reported, and with
    ``renormalize`` the stored ``rho_B`` is divided by its quadrature.  The
    returned oracle always gives the raw values.
    """
    rho_a = np.asarray(rho_a, dtype=float)
    oracle = SyntheticOracle(grid_a, kernel, eta, overlap_scale)
    rho_b = oracle(np.sqrt(rho_a))
    total = float(grid_b.integrate(rho_b))
    residual = abs(total - 1.0)
    if renormalize and total > 0:
        rho_b = rho_b / total
    model = ContinuousModel(grid_a, grid_b, rho_a, rho_b, kernel, eta, overlap_scale)
    return Synthesis(model, oracle, residual)


def _evaluate(oracle: Oracle, batch: np.ndarray, nb: int) -> np.ndarray:
    try:
        out = np.asarray(oracle(batch), dtype=float)
    except Exception as exc:  # user code: wrap anything it raises
        raise OracleFailure(f"oracle raised {type(exc).__name__}: {exc}") from exc
    if out.shape != (nb, batch.shape[1]):
        raise OracleFailure(f"oracle returned shape {out.shape}, expected {(nb, batch.shape[1])}")
    if not np.all(np.isfinite(out)):
        raise OracleFailure("oracle returned non-finite values")
    return out


def mixed_difference(oracle: Oracle, s: np.ndarray, pairs: np.ndarray, weights: np.ndarray,
                     h: float, nb: int) -> tuple[np.ndarray, float]:
    """Central mixed differences ``(1/(w_i w_k)) d^2 F / ds_i ds_k``.

    ``pairs`` has shape ``(m, 2)``.  Returns an ``(Nb, m)`` array and the
    largest normalization residual ``|int s'^2 - 1|`` among perturbed inputs;
    the perturbed inputs are not renormalized.
    """
    pairs = np.asarray(pairs, dtype=int).reshape(-1, 2)
    m = len(pairs)
    cols = np.arange(m)
    batch = np.repeat(s[:, None], 4 * m, axis=1)
    for q, (di, dk) in enumerate(((h, h), (h, -h), (-h, h), (-h, -h))):
        batch[pairs[:, 0], q * m + cols] += di
        batch[pairs[:, 1], q * m + cols] += dk
    norm_residual = float(np.max(np.abs(weights @ batch ** 2 - 1.0)))
    f = _evaluate(oracle, batch, nb)
    d = (f[:, :m] - f[:, m:2 * m] - f[:, 2 * m:3 * m] + f[:, 3 * m:]) / (4 * h * h)
    d /= weights[pairs[:, 0]] * weights[pairs[:, 1]]
    return d, norm_residual


def _normalized_cos(mixed: np.ndarray, m: ContinuousModel, pairs: np.ndarray) -> np.ndarray:
    pi = m.kernel[pairs[:, 0]].T
    pk = m.kernel[pairs[:, 1]].T
    denom = 2.0 * m.overlap_scale * np.sqrt(pi * pk)
    if np.any(denom <= 0):
        raise DegenerateContext("p(a|b) vanishes at a recovered point")
    return mixed / denom


def _arccos_checked(x: np.ndarray, tol: float = CLAMP_TOL) -> np.ndarray:
    excess = float(np.max(np.abs(x))) - 1.0 if x.size else -1.0
    if excess > tol:
        raise NonTrigonometricContext(
            f"normalized mixed derivative reaches {1 + excess:.12f}, outside [-1, 1]"
        )
    return np.arccos(np.clip(x, -1.0, 1.0))


@dataclass
class PhaseField:
    theta: np.ndarray
    cos: np.ndarray
    grid_a: Grid
    grid_b: Grid
    fd_step: float | None = None
    input_norm_residual: float = 0.0
    degenerate: bool = False

    def antisymmetry_residual(self) -> float:
        return float(np.max(np.abs(self.theta + np.transpose(self.theta, (0, 2, 1)))))


def fold_angle(x) -> np.ndarray:
    """Map angles to ``[0, pi]`` modulo sign and ``2 pi``."""
    return np.abs((np.asarray(x) + np.pi) % (2 * np.pi) - np.pi)


def phase_field_from_eta(eta: np.ndarray) -> np.ndarray:
    """``theta[j, i, k] = eta[i, j] - eta[k, j]``."""
    e = np.asarray(eta, dtype=float).T
    return e[:, :, None] - e[:, None, :]


def recover_phase_field(oracle: Oracle, m: ContinuousModel, h: float = DEFAULT_FD_STEP,
                        chunk: int = 2048) -> PhaseField:
    """Recover ``cos theta_b(a, a')`` for every grid triple from oracle calls."""
    if not np.all(m.rho_a > 0):
        raise DegenerateContext("rho_A must be strictly positive on the grid")
    na, nb = m.grid_a.n, m.grid_b.n
    s, w = m.amplitudes, m.grid_a.weights
    iu = np.array(np.triu_indices(na, k=1)).T
    cos = np.ones((nb, na, na))
    theta = np.zeros((nb, na, na))
    worst = 0.0
    for start in range(0, len(iu), chunk):
        pairs = iu[start:start + chunk]
        mixed, res = mixed_difference(oracle, s, pairs, w, h, nb)
        worst = max(worst, res)
        x = _normalized_cos(mixed, m, pairs)
        th = _arccos_checked(x)
        i, k = pairs[:, 0], pairs[:, 1]
        cos[:, i, k] = cos[:, k, i] = x
        theta[:, i, k] = th
        theta[:, k, i] = -th
    return PhaseField(theta, cos, m.grid_a, m.grid_b, h, worst)


def theta_from_oracle(oracle: Oracle, m: ContinuousModel, b: int, a: int, a_prime: int,
                      h: float = DEFAULT_FD_STEP) -> float:
    """One entry ``theta_{b}(a, a')`` by grid index; zero on the diagonal.

    The sign follows the field convention: nonnegative for ``a < a'``.
    """
    if a == a_prime:
        return 0.0
    if not np.all(m.rho_a > 0):
        raise DegenerateContext("rho_A must be strictly positive on the grid")
    i, k = sorted((a, a_prime))
    pairs = np.array([[i, k]])
    mixed, _ = mixed_difference(oracle, m.amplitudes, pairs, m.grid_a.weights, h, m.grid_b.n)
    x = _normalized_cos(mixed, m, pairs)[b]
    th = float(_arccos_checked(x)[0])
    return th if a < a_prime else -th


@dataclass(frozen=True)
class KernelOperator:
    """``beta(a_i, a_k)``; a quadratic form is ``sum w_i w_k f_i beta_ik g_k``."""

    matrix: np.ndarray
    weights: np.ndarray

    def hermitian_residual(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def expectation(self, s: np.ndarray) -> float:
        ws = self.weights * s
        return float(np.real(ws.conj() @ self.matrix @ ws))


def b_matrix_elements(m: ContinuousModel, theta: np.ndarray) -> KernelOperator:
    """``beta(a, a') = nu int b sqrt(p(a|b) p(a'|b)) exp(i theta_b(a, a')) db``."""
    b, v = m.grid_b.points, m.grid_b.weights
    sq = np.sqrt(m.kernel)  # (Na, Nb)
    weight = m.overlap_scale * v * b
    mat = np.einsum("j,ij,kj,jik->ik", weight, sq, sq, np.exp(1j * theta))
    return KernelOperator(mat, m.grid_a.weights)


def verify_mixed_derivative_identity(oracle: Oracle, m: ContinuousModel, theta: np.ndarray,
                             a: int, a_prime: int, b: int,
                             h: float = DEFAULT_FD_STEP) -> float:
    """``|d^2 omega / ds(a) ds(a') - 2 nu sqrt(p p') cos theta_b(a, a')|``.

    ``omega`` is evaluated through the oracle minus the classical term, and
    ``theta`` is the reference field.  Off-diagonal points only.
    """
    if a == a_prime:
        raise ModelError("the identity holds only for a != a'")
    w = m.grid_a.weights
    classical = (w[:, None] * m.kernel).T  # (Nb, Na)

    def omega(batch):
        return oracle(batch) - classical @ (batch ** 2)

    pairs = np.array([[a, a_prime]])
    mixed, _ = mixed_difference(omega, m.amplitudes, pairs, w, h, m.grid_b.n)
    expected = 2 * m.overlap_scale * math.sqrt(m.kernel[a, b] * m.kernel[a_prime, b]) * math.cos(
        theta[b, a, a_prime])
    return abs(float(mixed[b, 0]) - expected)


@dataclass
class EmbeddingResult:
    cos: np.ndarray
    mixed: np.ndarray
    residual_x: float
    residual_y: float
    degenerate: bool


def _embedding_check(grid_x: Grid, p_x_given_a, p_b_given_x, m: ContinuousModel, tol):
    rho_x = m.grid_a.integrate(np.asarray(p_x_given_a).T * m.rho_a[:, None], axis=0)
    pushed = grid_x.integrate(np.asarray(p_b_given_x) * rho_x[None, :], axis=1)
    residual = float(np.max(np.abs(pushed - m.rho_b)))
    if residual > tol:
        raise EmbeddingError(
            f"transition densities do not reproduce rho_B (residual {residual:.3e})"
        )
    return rho_x, residual


def theta_from_embedding(m: ContinuousModel, grid_x: Grid, p_x_given_a, p_b_given_x,
                         grid_y: Grid | None = None, p_y_given_a=None, p_b_given_y=None,
                         tol: float = DENSITY_TOL) -> EmbeddingResult:
    """Embedding estimator for ``cos theta_b(a, a')``.

    Inputs are contextual transition densities on auxiliary grids:
    ``p_x_given_a[x, a]`` and ``p_b_given_x[b, x]`` (and the same for Y,
    which defaults to X).  With ``rho_X = int p(x|a) rho_A da`` the chain-rule
    factors are

        d s_X(x) / d s_A(a)    = p(x|a) s_A(a) / (2 s_X(x))
        d^2 rho_B / ds_X ds_Y  = p(b|x) p(b|y) s_X(x) s_Y(y) / (4 rho_B(b))

    and the mixed derivative is their quadrature over ``x`` and ``y``,
    normalized by ``2 nu sqrt(p(a|b) p(a'|b))``.
    """
    if grid_y is None:
        grid_y, p_y_given_a, p_b_given_y = grid_x, p_x_given_a, p_b_given_x
    if np.any(m.rho_b <= 0):
        raise DegenerateContext("rho_B vanishes on the grid")
    rho_x, rx = _embedding_check(grid_x, p_x_given_a, p_b_given_x, m, tol)
    rho_y, ry = _embedding_check(grid_y, p_y_given_a, p_b_given_y, m, tol)
    s_a = m.amplitudes
    sx, sy = np.sqrt(rho_x), np.sqrt(rho_y)
    with np.errstate(divide="ignore", invalid="ignore"):
        dx = np.where(sx[:, None] > 0, np.asarray(p_x_given_a) * s_a[None, :] / (2 * sx[:, None]), 0.0)
        dy = np.where(sy[:, None] > 0, np.asarray(p_y_given_a) * s_a[None, :] / (2 * sy[:, None]), 0.0)
    gx = np.asarray(p_b_given_x) * sx[None, :] * grid_x.weights[None, :]  # (Nb, Nx)
    gy = np.asarray(p_b_given_y) * sy[None, :] * grid_y.weights[None, :]
    mixed = np.einsum("bx,xa,by,yc->bac", gx, dx, gy, dy) / (4 * m.rho_b[:, None, None])
    denom = 2 * m.overlap_scale * np.sqrt(m.kernel.T[:, :, None] * m.kernel.T[:, None, :])
    with np.errstate(divide="ignore", invalid="ignore"):
        cos = np.where(denom > 0, mixed / denom, np.nan)
    degenerate = bool(np.max(np.abs(continuous_supplementarity(m))) <= tol)
    return EmbeddingResult(cos, mixed, rx, ry, degenerate)


def embedding_closed_form(m: ContinuousModel, k_x: np.ndarray, k_y: np.ndarray | None = None) -> np.ndarray:
    """Collapsed embedding result in terms of ``K(b|a) = int p(b|x) p(x|a) dx``:

        mixed[b, a, a'] = s(a) s(a') K_X(b|a) K_Y(b|a') / (16 rho_B(b)).
    """
    k_y = k_x if k_y is None else k_y
    s = m.amplitudes
    return (k_x[:, :, None] * k_y[:, None, :] * (s[:, None] * s[None, :])[None]
            / (16 * m.rho_b[:, None, None]))


def gaussian_test_model(n: int = 64, lower: float = -5.0, upper: float = 5.0,
                        sigma: float = 0.892, k: float = 2 * math.pi / 10,
                        b0: float = 0.5, overlap_scale: float = 1.0) -> Synthesis:
    """Synthetic family: Gaussian ``rho_A``, constant ``p = 1/(upper - lower)``
    and ``eta(a, b) = k a (b - b0)`` on a shared grid."""
    grid = Grid(lower, upper, n)
    a = grid.points
    rho_a = np.exp(-a ** 2 / (2 * sigma ** 2))
    rho_a /= grid.integrate(rho_a)
    kernel = np.full((n, n), 1.0 / (upper - lower))
    eta = k * np.outer(a, a - b0)
    return synthesize_model(rho_a, grid, grid, kernel, eta, overlap_scale)


def two_point_model(p_a, theta_b) -> Synthesis:
    """Two-point grids on ``[-1, 1]`` with ``p = 1/2``.

    ``eta(a_1, b_j) = 0`` and ``eta(a_2, b_j) = -theta_b[j]`` make
    ``psi(b_j) = sqrt(P(a1)/2) + exp(i theta_b[j]) sqrt(P(a2)/2)``, the binary
    amplitude with the grid points as outcomes.
    """
    grid = Grid(-1.0, 1.0, 2)
    theta_b = np.asarray(theta_b, dtype=float)
    eta = np.vstack([np.zeros(2), -theta_b])
    kernel = np.full((2, 2), 0.5)
    return synthesize_model(np.asarray(p_a, dtype=float), grid, grid, kernel, eta,
                            renormalize=False)


def resolve_two_point_signs(field: PhaseField, m: ContinuousModel) -> np.ndarray:
    """Fix the per-``b`` sign of ``theta_b(a_1, a_2)`` on a two-point A grid.

    The sign at the first ``b`` is taken positive; the others are chosen so
    the two A kets are orthogonal under B quadrature, which generalizes the
    binary rule ``exp(i theta_1) = -exp(i theta_2)``.
    """
    if m.grid_a.n != 2:
        raise ModelError("sign resolution is implemented for two-point A grids only")
    nb = m.grid_b.n
    if nb > 16:
        raise ModelError("sign search is exhaustive and limited to 16 B points")
    base = np.abs(field.theta[:, 0, 1])
    v = m.grid_b.weights
    w = m.overlap_scale * v * np.sqrt(m.kernel[0] * m.kernel[1])
    best, best_val = None, math.inf
    for tail in itertools.product((1.0, -1.0), repeat=nb - 1):
        signs = np.array((1.0,) + tail)
        val = abs(np.sum(w * np.exp(1j * signs * base)))
        if val < best_val - 1e-15:
            best, best_val = signs, val
    theta = np.zeros_like(field.theta)
    theta[:, 0, 1] = best * base
    theta[:, 1, 0] = -best * base
    return theta


def b_amplitudes_from_phase(m: ContinuousModel, theta: np.ndarray, ref: int = 0) -> np.ndarray:
    """``psi(b_j) = sqrt(nu) sum_i w_i sqrt(p_ij) exp(i theta[j, ref, i]) s_i``.

    Fixes ``eta(a_ref, b) = 0``; any other choice changes ``psi(b)`` by a
    b-dependent phase only.
    """
    w, s = m.grid_a.weights, m.amplitudes
    phase = np.exp(1j * theta[:, ref, :])  # (Nb, Na)
    return math.sqrt(m.overlap_scale) * np.sum(
        w[None, :] * np.sqrt(m.kernel.T) * phase * s[None, :], axis=1)
