import json

import numpy as np
import pytest

from qlra.binary import binary_model
from qlra.cli import main
from qlra.continuous import gaussian_test_model
from qlra.io import (
    continuous_from_dict,
    continuous_to_dict,
    dumps,
    model_from_dict,
    model_to_dict,
    space_from_dict,
    space_to_dict,
)
from qlra.kolmogorov import random_space
from qlra.triple import generate_consistent_triple

HALF = [[0.5, 0.5], [0.5, 0.5]]


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(dumps(obj) if not isinstance(obj, str) else obj)
    return str(path)


def run(argv, tmp_path):
    out = tmp_path / "report.json"
    code = main([*argv, "--out", str(out)])
    report = json.loads(out.read_text()) if out.exists() else None
    return code, report


def test_model_round_trip():
    m = generate_consistent_triple([0.3, 0.7], 2.0)
    again = model_from_dict(json.loads(dumps(model_to_dict(m))))
    assert model_to_dict(again) == model_to_dict(m)


def test_continuous_round_trip():
    m = gaussian_test_model(8).model
    again = continuous_from_dict(json.loads(dumps(continuous_to_dict(m))))
    assert np.array_equal(again.rho_b, m.rho_b)
    assert np.array_equal(again.eta, m.eta)
    assert again.grid_a == m.grid_a


def test_space_round_trip(rng):
    s = random_space(rng)
    again = space_from_dict(json.loads(dumps(space_to_dict(s))))
    assert np.array_equal(again.weights, s.weights)
    assert np.array_equal(again.events["c"], s.events["c"])


def test_complex_values_encode_as_pairs():
    assert json.loads(dumps({"z": np.array([1 + 2j])})) == {"z": [[1.0, 2.0]]}


def test_validate_exit_codes(tmp_path):
    good = write(tmp_path, "good.json", model_to_dict(binary_model([0.5, 0.5], [0.5, 0.5], HALF)))
    code, report = run(["validate", "--in", good], tmp_path)
    assert code == 0 and report["ok"]
    assert report["tool"] == "qlra" and "config" in report

    bad = write(tmp_path, "bad.json", model_to_dict(binary_model([0.01, 0.99], [0.9, 0.1], HALF)))
    code, report = run(["validate", "--in", bad], tmp_path)
    assert code == 1
    assert "non_trigonometric" in report["flags"]

    broken = write(tmp_path, "broken.json", "{not json")
    assert run(["validate", "--in", broken], tmp_path)[0] == 2
    assert run(["validate", "--in", str(tmp_path / "missing.json")], tmp_path)[0] == 2
    assert run(["validate"], tmp_path)[0] == 2


def test_bad_arguments_exit_two(tmp_path):
    assert main(["represent2", "--gauge", "sideways"]) == 2
    assert main(["nonsense"]) == 2
    assert main(["generate", "--kind", "binary"]) == 2


def test_tolerance_override(tmp_path, monkeypatch):
    path = write(tmp_path, "m.json", model_to_dict(binary_model([0.5, 0.5], [0.5, 0.5], HALF)))
    monkeypatch.setenv("QLRA_TOL", "not-a-number")
    assert run(["validate", "--in", path], tmp_path)[0] == 2
    monkeypatch.setenv("QLRA_TOL", "1e-6")
    code, report = run(["validate", "--in", path], tmp_path)
    assert code == 0 and report["config"]["tolerance"] == 1e-6


def test_represent2_report(tmp_path):
    path = write(tmp_path, "m.json", model_to_dict(binary_model([0.3, 0.7], [0.6, 0.4], HALF)))
    code, report = run(["represent2", "--in", path, "--gauge", "context-independent"], tmp_path)
    assert code == 0
    assert report["bases"]["a"]["context_dependent"] is False
    assert all(v["passed"] for v in report["verification"].values())


def test_represent2_rejects_asymmetric(tmp_path):
    model = binary_model([0.5, 0.5], [0.5, 0.5], [[0.7, 0.6], [0.3, 0.4]])
    path = write(tmp_path, "m.json", model_to_dict(model))
    code, report = run(["represent2", "--in", path], tmp_path)
    assert code == 1
    assert report["error"] == "SymmetricConditioningRequired"


def test_generated_triple_round_trip(tmp_path):
    model_path = tmp_path / "triple.json"
    assert main(["generate", "--kind", "triple", "--seed", "42", "--out", str(model_path)]) == 0
    code, report = run(["represent3", "--in", str(model_path)], tmp_path)
    assert code == 0
    assert report["consistency_residual"] < 1e-10
    assert report["constraint_residual"] < 1e-10


def test_spin_report(tmp_path):
    model = generate_consistent_triple([0.4, 0.6], 1.0, sign=-1)
    path = write(tmp_path, "spin.json", model_to_dict(model))
    code, report = run(["spin", "--in", path], tmp_path)
    assert code == 0 and report["exact"]
    c = np.array(report["operators"]["c"])
    assert c[0, 1] == pytest.approx([0.0, -1.0])


@pytest.mark.parametrize("kind", ["binary", "triple", "kolmogorov", "continuous"])
def test_generate_is_deterministic_and_valid(kind, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["generate", "--kind", kind, "--seed", "42", "--grid-n", "16"]
    assert main([*args, "--out", str(a)]) == 0
    assert main([*args, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    code, report = run(["validate", "--in", str(a)], tmp_path)
    assert code == 0, report


def test_kolmogorov_generate_reports_delta(tmp_path):
    path = tmp_path / "k.json"
    main(["generate", "--kind", "kolmogorov", "--seed", "7", "--out", str(path)])
    data = json.loads(path.read_text())
    assert len(data["delta"]["B|A"]) == 2
    assert "space" in data


def test_continuous_command(tmp_path):
    code, report = run(["continuous", "--grid-n", "24"], tmp_path)
    assert code == 0
    assert report["recovery"]["theta_max_error"] < 1e-4
    assert report["recovery"]["antisymmetry_residual"] == 0.0


def test_continuous_without_phase_skips_recovery(tmp_path):
    d = continuous_to_dict(gaussian_test_model(8).model)
    d.pop("eta")
    path = write(tmp_path, "c.json", d)
    code, report = run(["continuous", "--in", path], tmp_path)
    assert code == 0 and report["recovery"] is None
