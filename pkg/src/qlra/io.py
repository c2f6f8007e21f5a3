"""JSON encoding of models, spaces and reports.

Complex numbers are written as ``[re, im]`` pairs and matrices as row-major
nested lists.  Floats are written with full ``repr`` precision by the
standard ``json`` module, so files round-trip exactly.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .contextual import (
    BinaryObservable,
    ContextualDistribution,
    ContextualModel,
    TransitionMatrix,
)
from .continuous import ContinuousModel, Grid
from .errors import ModelError
from .kolmogorov import FiniteSpace

__all__ = [
    "encode",
    "dumps",
    "read_json",
    "write_json",
    "model_from_dict",
    "model_to_dict",
    "continuous_from_dict",
    "continuous_to_dict",
    "space_from_dict",
    "space_to_dict",
    "is_continuous",
]


def encode(obj: Any) -> Any:
    """Convert numpy values and complex numbers into JSON-ready objects."""
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return encode(np.stack([obj.real, obj.imag], axis=-1).tolist())
        return obj.tolist()
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(encode(obj), indent=2, sort_keys=False) + "\n"


def read_json(path: str | Path) -> dict:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ModelError("top-level JSON value must be an object")
    return data


def write_json(obj: Any, path: str | Path | None) -> str:
    text = dumps(obj)
    if path is None or str(path) == "-":
        print(text, end="")
    else:
        Path(path).write_text(text, encoding="utf-8")
    return text


def _require(d: dict, key: str):
    try:
        return d[key]
    except KeyError:
        raise ModelError(f"missing field {key!r}") from None


def model_from_dict(d: dict) -> ContextualModel:
    obs = []
    for o in _require(d, "observables"):
        obs.append(BinaryObservable(str(_require(o, "label")), tuple(_require(o, "outcomes"))))
    by_label = {o.label: o for o in obs}
    if len(by_label) != len(obs):
        raise ModelError("duplicate observable labels")
    dists = {}
    for label, probs in _require(d, "distributions").items():
        if label not in by_label:
            raise ModelError(f"distribution for unknown observable {label!r}")
        dists[label] = ContextualDistribution(by_label[label], probs)
    trans = {}
    for key, mat in d.get("transitions", {}).items():
        parts = key.split("|")
        if len(parts) != 2 or any(p not in by_label for p in parts):
            raise ModelError(f"transition key {key!r} must be 'target|given' of known labels")
        trans[key] = TransitionMatrix(by_label[parts[0]], by_label[parts[1]], mat)
    return ContextualModel(str(d.get("context", "c")), tuple(obs), dists, trans)


def model_to_dict(m: ContextualModel) -> dict:
    return {
        "context": m.context,
        "observables": [{"label": o.label, "outcomes": list(o.outcomes)} for o in m.observables],
        "distributions": {k: v.probs.tolist() for k, v in m.distributions.items()},
        "transitions": {k: t.matrix.tolist() for k, t in m.transitions.items()},
    }


def is_continuous(d: dict) -> bool:
    return "grid_a" in d


def _grid(d: dict) -> Grid:
    return Grid(float(_require(d, "lower")), float(_require(d, "upper")), int(_require(d, "n")))


def continuous_from_dict(d: dict) -> ContinuousModel:
    ga = _grid(_require(d, "grid_a"))
    gb = _grid(d.get("grid_b", d["grid_a"]))
    eta = d.get("eta")
    return ContinuousModel(
        ga, gb,
        np.asarray(_require(d, "rho_a"), dtype=float),
        np.asarray(_require(d, "rho_b"), dtype=float),
        np.asarray(_require(d, "kernel"), dtype=float),
        None if eta is None else np.asarray(eta, dtype=float),
        float(d.get("overlap_scale", 1.0)),
    )


def continuous_to_dict(m: ContinuousModel) -> dict:
    out = {
        "grid_a": m.grid_a.to_dict(),
        "grid_b": m.grid_b.to_dict(),
        "overlap_scale": m.overlap_scale,
        "rho_a": m.rho_a.tolist(),
        "rho_b": m.rho_b.tolist(),
        "kernel": m.kernel.tolist(),
    }
    if m.eta is not None:
        out["eta"] = m.eta.tolist()
    return out


def space_from_dict(d: dict) -> FiniteSpace:
    events = {}
    for name, members in d.get("events", {}).items():
        events[name] = list(members)
    return FiniteSpace(
        np.asarray(_require(d, "weights"), dtype=float),
        {k: np.asarray(v, dtype=float) for k, v in _require(d, "variables").items()},
        events,
        tuple(d.get("outcomes", ())),
    )


def space_to_dict(s: FiniteSpace) -> dict:
    return {
        "outcomes": encode(list(s.outcomes)),
        "weights": s.weights.tolist(),
        "variables": {k: v.tolist() for k, v in s.variables.items()},
        "events": {k: np.flatnonzero(e).tolist() for k, e in s.events.items()},
    }
