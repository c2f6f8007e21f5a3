"""Command-line entry point.

Exit codes: 0 success, 1 the model is rejected by a theory-level check,
2 input or parse failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from . import __version__
from .binary import CONTEXT_INDEPENDENT, BinaryRepresentation, random_symmetric_model, represent
from .contextual import TOL, ContextualModel, supplementarity, validate_model
from .continuous import (
    DEFAULT_FD_STEP,
    SyntheticOracle,
    b_matrix_elements,
    continuous_supplementarity,
    fold_angle,
    gaussian_test_model,
    phase_field_from_eta,
    recover_phase_field,
)
from .errors import EmbeddingError, ModelError, QLRAError
from .io import (
    continuous_from_dict,
    continuous_to_dict,
    is_continuous,
    model_from_dict,
    model_to_dict,
    read_json,
    space_to_dict,
    write_json,
)
from .kolmogorov import derive_contextual_model, uniform_pair_space
from .triple import random_consistent_triple, represent_triple, spin_from_model

EXIT_OK, EXIT_REJECTED, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    """Bad command-line configuration or unreadable input."""


@dataclass(frozen=True)
class RunConfig:
    command: str
    input: str | None
    output: str | None
    gauge: str
    grid_n: int
    fd_step: float
    seed: int | None
    kind: str | None
    tolerance: float
    quadrature: str

    def __post_init__(self):
        if not self.tolerance > 0:
            raise InputError("tolerance must be positive")
        if self.grid_n < 2:
            raise InputError("--grid-n must be at least 2")
        if not self.fd_step > 0:
            raise InputError("--fd-step must be positive")


def _tolerance() -> float:
    raw = os.environ.get("QLRA_TOL")
    if raw is None:
        return TOL
    try:
        return float(raw)
    except ValueError:
        raise InputError(f"QLRA_TOL={raw!r} is not a number") from None


def _gauge(value: str) -> str:
    if value == CONTEXT_INDEPENDENT:
        return value
    try:
        float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"gauge must be a number or {CONTEXT_INDEPENDENT!r}") from None
    return value


def _resolved_gauge(cfg: RunConfig):
    return cfg.gauge if cfg.gauge == CONTEXT_INDEPENDENT else float(cfg.gauge)


def _header(cfg: RunConfig) -> dict:
    return {"tool": "qlra", "version": __version__, "config": asdict(cfg)}


def _load(cfg: RunConfig) -> dict:
    if cfg.input is None:
        raise InputError(f"{cfg.command} needs --in")
    try:
        return read_json(cfg.input)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {cfg.input}: {exc}") from exc


def _discrete(cfg: RunConfig) -> ContextualModel:
    d = _load(cfg)
    if is_continuous(d):
        raise InputError(f"{cfg.command} expects a discrete model file")
    return model_from_dict(d)


def _binary_block(rep: BinaryRepresentation) -> dict:
    return {
        "angles": {
            "delta": rep.angles.delta, "lambda": rep.angles.lam, "theta": rep.angles.theta,
        },
        "gauge": rep.gauge,
        "state": {"basis": rep.state.basis, "amplitudes": rep.state.amplitudes},
        "state_in_a_basis": {"basis": rep.state_a.basis, "amplitudes": rep.state_a.amplitudes},
        "bases": {
            "b": {"labels": rep.b_basis.labels, "vectors": rep.b_basis.vectors},
            "a": {"labels": rep.a_basis.labels, "vectors": rep.a_basis.vectors,
                  "context_dependent": rep.a_basis.context_dependent},
        },
        "change_of_basis": rep.change.matrix,
        "operators": {"a": rep.a_operator.matrix, "b": rep.b_operator.matrix},
    }


def cmd_validate(cfg: RunConfig) -> tuple[dict, int]:
    d = _load(cfg)
    if is_continuous(d):
        m = continuous_from_dict(d)
        checks = m.check()
        omega = continuous_supplementarity(m)
        ok = all(c["passed"] for c in checks.values())
        report = {"kind": "continuous", "ok": ok, "checks": checks,
                  "omega_integral": float(m.grid_b.integrate(omega))}
    else:
        report = {"kind": "discrete", **validate_model(model_from_dict(d), cfg.tolerance).to_dict()}
        ok = report["ok"]
    return report, EXIT_OK if ok else EXIT_REJECTED


def cmd_represent2(cfg: RunConfig) -> tuple[dict, int]:
    rep = represent(_discrete(cfg), _resolved_gauge(cfg), tol=cfg.tolerance)
    report = {**_binary_block(rep), "verification": rep.verification, "ok": rep.ok}
    return report, EXIT_OK if rep.ok else EXIT_REJECTED


def _triple_block(rep) -> dict:
    return {
        **_binary_block(rep.pair),
        "triple_angles": asdict(rep.angles),
        "branch": rep.constraint.branch,
        "constraint_residual": rep.constraint.residual,
        "consistency_residual": rep.consistency.residual,
        "w": rep.w.matrix,
        "c_basis": {"labels": rep.c_basis.labels, "vectors": rep.c_basis.vectors},
        "state_in_c_basis": rep.state_c.amplitudes,
        "operators": {"a": rep.pair.a_operator.matrix, "b": rep.pair.b_operator.matrix,
                      "c": rep.c_operator.matrix},
        "verification": {**rep.pair.verification, **rep.verification},
        "ok": rep.ok,
    }


def cmd_represent3(cfg: RunConfig) -> tuple[dict, int]:
    rep = represent_triple(_discrete(cfg), _resolved_gauge(cfg), tol=cfg.tolerance)
    return _triple_block(rep), EXIT_OK if rep.ok else EXIT_REJECTED


def cmd_spin(cfg: RunConfig) -> tuple[dict, int]:
    spin = spin_from_model(_discrete(cfg))
    report = {
        **_triple_block(spin.representation),
        "pauli_residuals": spin.pauli_residuals,
        "gamma_residuals": spin.gamma_residuals,
        "state_form": {"G": spin.g, "F": spin.f},
        "exact": spin.exact,
    }
    ok = spin.exact and spin.representation.ok
    return report, EXIT_OK if ok else EXIT_REJECTED


def cmd_continuous(cfg: RunConfig) -> tuple[dict, int]:
    if cfg.input is None:
        syn = gaussian_test_model(cfg.grid_n)
        m, oracle, norm_res = syn.model, syn.oracle, syn.normalization_residual
        source = "synthetic-gaussian"
    else:
        m = continuous_from_dict(_load(cfg))
        oracle = None if m.eta is None else SyntheticOracle(m.grid_a, m.kernel, m.eta, m.overlap_scale)
        norm_res = None
        source = cfg.input
    omega = continuous_supplementarity(m)
    report = {
        "source": source,
        "grid_a": m.grid_a.to_dict(),
        "grid_b": m.grid_b.to_dict(),
        "checks": m.check(),
        "synthesis_normalization_residual": norm_res,
        "omega": omega,
        "omega_integral": float(m.grid_b.integrate(omega)),
    }
    if oracle is None:
        report["recovery"] = None
        report["note"] = "no phase kernel in the input; phase recovery skipped"
        return report, EXIT_OK
    field = recover_phase_field(oracle, m, cfg.fd_step)
    n = m.grid_a.n
    iu = np.triu_indices(n, k=1)
    truth = fold_angle(phase_field_from_eta(m.eta)[:, iu[0], iu[1]])
    err = float(np.max(np.abs(field.theta[:, iu[0], iu[1]] - truth))) if n > 1 else 0.0
    beta = b_matrix_elements(m, field.theta)
    eb_beta = beta.expectation(m.amplitudes)
    eb_direct = float(m.grid_b.integrate(m.grid_b.points * m.rho_b))
    report["recovery"] = {
        "fd_step": cfg.fd_step,
        "theta_max_error": err,
        "input_norm_residual": field.input_norm_residual,
        "antisymmetry_residual": field.antisymmetry_residual(),
        "expectation_b_from_beta": eb_beta,
        "expectation_b_direct": eb_direct,
        "expectation_b_residual": abs(eb_beta - eb_direct),
        "beta_hermitian_residual": beta.hermitian_residual(),
        "cos_theta_shape": list(field.cos.shape),
        "cos_theta": field.cos.reshape(-1),
        "beta_shape": list(beta.matrix.shape),
        "beta": beta.matrix.reshape(-1),
    }
    return report, EXIT_OK


def cmd_generate(cfg: RunConfig) -> tuple[dict, int]:
    if cfg.seed is None:
        raise InputError("generate needs --seed")
    rng = np.random.default_rng(cfg.seed)
    kind = cfg.kind
    if kind == "binary":
        out = model_to_dict(random_symmetric_model(rng))
    elif kind == "triple":
        model, theta, sign = random_consistent_triple(rng)
        out = {**model_to_dict(model), "generator": {"theta": theta, "sign": sign}}
    elif kind == "kolmogorov":
        # search the symmetric family until the derived context is trigonometric
        for attempt in range(1000):
            space = uniform_pair_space(rng)
            model = derive_contextual_model(space, ["A", "B"])
            if validate_model(model, cfg.tolerance).ok:
                break
        else:
            raise QLRAError("no trigonometric context found in 1000 draws")
        t = model.transitions["B|A"]
        delta = supplementarity(model.distribution("B"), t, model.distribution("A"))
        out = {**model_to_dict(model), "space": space_to_dict(space),
               "delta": {"B|A": delta}, "attempts": attempt + 1}
    elif kind == "continuous":
        out = continuous_to_dict(gaussian_test_model(cfg.grid_n).model)
    else:
        raise InputError(f"unknown --kind {kind!r}")
    return out, EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "represent2": cmd_represent2,
    "represent3": cmd_represent3,
    "spin": cmd_spin,
    "continuous": cmd_continuous,
    "generate": cmd_generate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qlra", description="Reconstruct Hilbert-space representations from contextual data.")
    parser.add_argument("--version", action="version", version=f"qlra {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--in", dest="input", metavar="PATH")
        p.add_argument("--out", dest="output", metavar="PATH", help="default: stdout")
        p.add_argument("--gauge", type=_gauge, default="0",
                       help=f"gauge omega in radians or {CONTEXT_INDEPENDENT!r}")
        p.add_argument("--grid-n", type=int, default=64)
        p.add_argument("--fd-step", type=float, default=DEFAULT_FD_STEP)
        p.add_argument("--seed", type=int)
        p.add_argument("--quadrature", choices=["trapezoid"], default="trapezoid")
        if name == "generate":
            p.add_argument("--kind", choices=["binary", "triple", "kolmogorov", "continuous"],
                           required=True)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        cfg = RunConfig(
            command=args.command, input=args.input, output=args.output, gauge=args.gauge,
            grid_n=args.grid_n, fd_step=args.fd_step, seed=args.seed,
            kind=getattr(args, "kind", None), tolerance=_tolerance(),
            quadrature=args.quadrature,
        )
    except InputError as exc:
        print(f"qlra: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        body, code = COMMANDS[cfg.command](cfg)
    except InputError as exc:
        print(f"qlra: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except EmbeddingError as exc:
        body, code = {"ok": False, "error": type(exc).__name__, "message": str(exc)}, EXIT_REJECTED
    except ModelError as exc:
        print(f"qlra: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except QLRAError as exc:
        body, code = {"ok": False, "error": type(exc).__name__, "message": str(exc)}, EXIT_REJECTED
    except (ValueError, TypeError, KeyError) as exc:
        print(f"qlra: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if code == EXIT_REJECTED and "error" in body:
        print(f"qlra: rejected: {body['error']}: {body['message']}", file=sys.stderr)
    try:
        if cfg.command == "generate" and code == EXIT_OK:
            write_json(body, cfg.output)
        else:
            write_json({**_header(cfg), **body}, cfg.output)
    except OSError as exc:
        print(f"qlra: cannot write {cfg.output}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return code


if __name__ == "__main__":
    sys.exit(main())
