import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from ctclab.cli import dumps, run
from ctclab.correlations import instance_to_json, random_instance
from ctclab.linalg import CNOT, make_rng, matrix_from_json, matrix_to_json, random_density, swap
from ctclab.politzer import BumpProfile, PolitzerGeometry, left_mover, right_mover

GEOM = PolitzerGeometry(1.0, 5.0, -10.0)


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(path)


def call(argv, capsys):
    code = run(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


@pytest.fixture
def swap_channel(tmp_path):
    rhoA = random_density(make_rng(1), 2)
    spec = {"dimA": 2, "dimB": 2, "U": matrix_to_json(swap(2)), "rhoA": matrix_to_json(rhoA)}
    return write(tmp_path, "channel.json", spec), rhoA


class TestDctc:
    def test_solve_swap(self, tmp_path, swap_channel, capsys):
        path, rhoA = swap_channel
        out = tmp_path / "fp.json"
        code, _, _ = call(["dctc", "solve", "--in", path, "--out", str(out)], capsys)
        assert code == 0
        obj = json.loads(out.read_text())
        assert obj["residual"] <= 1e-10
        np.testing.assert_allclose(matrix_from_json(obj["canonical"]), rhoA, atol=1e-12)

    def test_iterate(self, tmp_path, capsys):
        spec = {"dimA": 2, "dimB": 2, "U": matrix_to_json(CNOT),
                "rhoA": matrix_to_json(np.diag([0.0, 1.0])), "N": 4,
                "rhoB0": matrix_to_json(np.diag([1.0, 0.0]))}
        code, out, _ = call(["dctc", "iterate", "--in", write(tmp_path, "c.json", spec)], capsys)
        obj = json.loads(out)
        assert code == 0 and obj["N"] == 4
        np.testing.assert_allclose(matrix_from_json(obj["average"]), np.eye(2) / 2, atol=1e-15)
        code, out, _ = call(["dctc", "iterate", "--in", write(tmp_path, "c.json", spec),
                             "--steps", "3"], capsys)
        assert json.loads(out)["N"] == 3


class TestExtend:
    def test_rows_respect_bound(self, tmp_path, capsys):
        spec = {"U": matrix_to_json(CNOT), "rhoA": matrix_to_json(np.eye(2) / 2), "N": 100,
                "epsilon": 0.05, "R": 1.0, "samplesB": 10}
        out = tmp_path / "deltas.csv"
        code, _, _ = call(["extend", "run", "--in", write(tmp_path, "r.json", spec),
                           "--out", str(out), "--seed", "3"], capsys)
        assert code == 0
        data = rows(out.read_text())
        assert data[0] == ["N", "maxDelta", "bound", "marginalResidual"]
        for N, delta, bound, resid in data[1:]:
            assert float(delta) <= float(bound) == pytest.approx(2 / int(N))
            assert float(resid) <= 1e-12
        assert "41" in [r[0] for r in data[1:]]
        assert b"\r" not in out.read_bytes()


class TestCorr:
    def test_instance_file(self, tmp_path, capsys):
        inst = random_instance(make_rng(4), n_random=5)
        obj = instance_to_json(inst, include_samples=True)
        code, out, _ = call(["corr", "verify", "--in", write(tmp_path, "i.json", obj)], capsys)
        rep = json.loads(out)
        assert code == 0 and rep["allPassed"]
        assert rep["reports"][0]["minQIsLowerBound"] is True

    def test_random_batch_independent_of_jobs(self, capsys):
        argv = ["corr", "verify", "--count", "3", "--seed", "8", "--phase-grid", "64"]
        _, one, _ = call(argv + ["--jobs", "1"], capsys)
        _, two, _ = call(argv + ["--jobs", "2"], capsys)
        assert one == two
        assert json.loads(one)["allPassed"]


class TestPolitzer:
    def field_json(self, **extra):
        f = right_mover(GEOM, BumpProfile("R", -1.0, 2.0)) + left_mover(GEOM, BumpProfile("L", -1.0, 2.0))
        return {**f.to_json(), **extra}

    def test_trace(self, tmp_path, capsys):
        spec = {"tau": 1, "L": 5, "t0": -10, "point": [0.9, 0.0], "chirality": "R"}
        code, out, _ = call(["politzer", "trace", "--in", write(tmp_path, "t.json", spec)], capsys)
        data = rows(out)
        assert code == 0 and data[0] == ["t", "x", "segmentId"]
        assert len(data) == 1 + 2 * 3
        assert float(data[-1][1]) == pytest.approx(-14.9)

    def test_eval_points(self, tmp_path, capsys):
        spec = self.field_json(points=[[2.0, 1.5], [-2.0, 0.0], [1.0, 0.5, 1]])
        code, out, _ = call(["politzer", "eval", "--in", write(tmp_path, "f.json", spec)], capsys)
        data = rows(out)
        assert code == 0 and data[0] == ["t", "x", "value", "minkowski", "displaced"]
        assert data[1][4] == "1" and data[2][4] == "0"

    def test_eval_rim(self, tmp_path, capsys):
        spec = self.field_json(rimSamples=200)
        code, out, _ = call(["politzer", "eval", "--in", write(tmp_path, "f.json", spec),
                             "--seed", "2"], capsys)
        rep = json.loads(out)
        assert code == 0 and rep["samples"] == 200 and rep["maxLimitGap"] <= 1e-9

    def test_region(self, tmp_path, capsys):
        spec = {"tau": 1, "L": 5, "t0": -10, "regions": [
            {"intervals": [[0, 0.75, 1.25]]}, {"intervals": [[0, 2.75, 3.25]]},
            {"intervals": [[0, 1.25, 1.75]]}]}
        code, out, _ = call(["politzer", "region", "--in", write(tmp_path, "r.json", spec)], capsys)
        obj = json.loads(out)
        assert code == 0
        assert obj["equal"] == [[True, True, False], [True, True, False], [False, False, True]]

    def test_symplectic_movers(self, tmp_path, capsys):
        R = right_mover(GEOM, BumpProfile("R", -1.0, 2.0)).to_json()
        L = left_mover(GEOM, BumpProfile("L", -1.0, 2.0, 0.7)).to_json()
        code, out, _ = call(["politzer", "symplectic", "--in",
                             write(tmp_path, "s.json", {"fields": [R, L]})], capsys)
        assert code == 0 and abs(json.loads(out)["sigma"]) <= 1e-8


class TestGibbs:
    def test_scan(self, capsys):
        code, out, _ = call(["gibbs", "scan", "--betas", "1,0.1,0.01", "--k", "2"], capsys)
        data = rows(out)
        assert code == 0 and data[0] == ["beta", "omega", "bound"]
        for beta, omega, bound in data[1:]:
            assert float(omega) <= float(bound)
            assert float(omega) == pytest.approx(-np.expm1(-2 * float(beta)), rel=1e-12)

    def test_defaults(self, capsys):
        code, out, _ = call(["gibbs", "scan"], capsys)
        assert code == 0 and len(rows(out)) == 6

    def test_truncation_error_exit(self, capsys):
        code, _, err = call(["gibbs", "scan", "--truncation", "5"], capsys)
        assert code == 1 and json.loads(err)["error"] == "truncation"


class TestErrors:
    @pytest.mark.parametrize("argv", [[], ["dctc"], ["dctc", "explode"], ["gibbs", "scan", "--k", "x"],
                                      ["dctc", "solve"], ["corr", "verify", "--jobs", "0"]])
    def test_usage(self, argv, capsys):
        code, _, err = call(argv, capsys)
        assert code == 2 and json.loads(err)["error"] == "usage"

    def test_missing_file(self, tmp_path, capsys):
        code, _, err = call(["dctc", "solve", "--in", str(tmp_path / "nope.json")], capsys)
        assert code == 2 and json.loads(err)["error"] == "io"

    def test_malformed_json(self, tmp_path, capsys):
        code, _, err = call(["dctc", "solve", "--in", write(tmp_path, "bad.json", "{oops")], capsys)
        assert code == 2 and json.loads(err)["error"] == "io"

    def test_contract(self, tmp_path, capsys):
        spec = {"dimA": 2, "dimB": 2, "U": matrix_to_json(2 * np.eye(4)),
                "rhoA": matrix_to_json(np.eye(2) / 2)}
        code, _, err = call(["dctc", "solve", "--in", write(tmp_path, "c.json", spec)], capsys)
        assert code == 1 and json.loads(err)["error"] == "contract"

    def test_dimension_cap(self, tmp_path, capsys):
        spec = {"dimA": 2, "dimB": 2, "U": {"rows": 4, "cols": 4, "data": [[1, 0]]},
                "rhoA": matrix_to_json(np.eye(2) / 2)}
        code, _, err = call(["dctc", "solve", "--in", write(tmp_path, "c.json", spec)], capsys)
        assert code == 1 and json.loads(err)["error"] == "dimension"

    def test_critical_ray(self, tmp_path, capsys):
        spec = {"tau": 1, "L": 5, "t0": -10, "point": [0.0, -4.0]}
        code, _, err = call(["politzer", "trace", "--in", write(tmp_path, "t.json", spec)], capsys)
        assert code == 1 and json.loads(err)["error"] == "critical_ray"


def test_non_finite_values_are_strings():
    assert json.loads(dumps({"a": float("inf"), "b": [float("nan")]})) == {"a": "inf", "b": ["nan"]}


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "ctclab", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("ctclab ")
