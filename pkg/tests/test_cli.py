import json
import math

import numpy as np
import pytest

from polarfront import sample_directions
from polarfront.cli import main
from polarfront.ensembles import FrontEnsemble
from polarfront.serialization import ensemble_to_dict
from polarfront.cli import EXIT_DATA, EXIT_OK, EXIT_VALIDATION


def run(tmp_path, *argv):
    return main(list(argv))


@pytest.fixture
def points_csv(tmp_path):
    path = tmp_path / "points.csv"
    path.write_text("f1,f2\n1.0,2.0\n2.0,1.0\n")
    return str(path)


@pytest.fixture
def sphere_ensemble_json(tmp_path):
    grid = sample_directions(3, 128, seed=7)
    e = FrontEnsemble(np.zeros(3), grid, np.ones((5, 128)))
    path = tmp_path / "sphere.json"
    path.write_text(json.dumps(ensemble_to_dict(e)))
    return str(path)


@pytest.fixture
def table_json(tmp_path):
    pts = np.array([[1.0, 2.0], [2.0, 1.0]])
    doc = {
        "inputs": ["x1", "x2"],
        "samples": np.tile(pts, (4, 1, 1)).tolist(),
        "eta": [0.0, 0.0],
    }
    path = tmp_path / "table.json"
    path.write_text(json.dumps(doc))
    return str(path)


class TestFrontCommand:
    def test_reproduces_fixture_lengths(self, tmp_path, points_csv):
        out = tmp_path / "front.json"
        code = run(
            tmp_path,
            "front",
            "--points",
            points_csv,
            "--eta",
            "0,0",
            "--grid-scheme",
            "equi2d",
            "--grid-k",
            "1",
            "--out",
            str(out),
        )
        assert code == EXIT_OK
        doc = json.loads(out.read_text())
        assert doc["lengths"][0] == pytest.approx(math.sqrt(2), abs=1e-12)

    def test_deterministic_output(self, tmp_path, points_csv):
        outs = []
        for name in ("a.json", "b.json"):
            out = tmp_path / name
            code = run(
                tmp_path,
                "front", "--points", points_csv, "--eta", "0,0",
                "--grid-k", "64", "--grid-seed", "5", "--out", str(out),
            )
            assert code == EXIT_OK
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_missing_file_is_data_error(self, tmp_path):
        code = run(tmp_path, "front", "--points", str(tmp_path / "nope.csv"), "--eta", "0,0")
        assert code == EXIT_DATA

    def test_empty_file_is_data_error(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text("")
        code = run(tmp_path, "front", "--points", str(empty), "--eta", "0,0")
        assert code == EXIT_DATA

    def test_bad_eta_is_validation_error(self, tmp_path, points_csv):
        code = run(tmp_path, "front", "--points", points_csv, "--eta", "0,0,0")
        assert code == EXIT_VALIDATION

    def test_boundary_csv(self, tmp_path, points_csv):
        out = tmp_path / "front.json"
        boundary = tmp_path / "boundary.csv"
        code = run(
            tmp_path,
            "front", "--points", points_csv, "--eta", "0,0",
            "--grid-scheme", "equi2d", "--grid-k", "32",
            "--out", str(out), "--boundary-csv", str(boundary),
        )
        assert code == EXIT_OK
        lines = boundary.read_text().strip().splitlines()
        assert lines[0] == "f1,f2"
        assert len(lines) == 33


class TestStatsCommand:
    def test_stats_from_ensemble(self, tmp_path, sphere_ensemble_json):
        out = tmp_path / "stats.json"
        code = run(
            tmp_path,
            "stats", "--ensemble", sphere_ensemble_json,
            "--stats", "mean,q:0.05,q:0.95,vorobev-mean,deviation:1.0,bootstrap:3",
            "--seed", "1", "--out", str(out),
        )
        assert code == EXIT_OK
        doc = json.loads(out.read_text())
        assert np.allclose(doc["stats"]["mean"], 1.0)
        assert np.allclose(doc["stats"]["q0.05"], 1.0)
        assert doc["stats"]["vorobev-mean"]["converged"] is True
        assert len(doc["stats"]["bootstrap3"]) == 3

    def test_stats_from_table(self, tmp_path, table_json):
        out = tmp_path / "stats.json"
        code = run(
            tmp_path,
            "stats", "--table", table_json, "--grid-scheme", "equi2d", "--grid-k", "8",
            "--stats", "mean", "--out", str(out),
        )
        assert code == EXIT_OK
        doc = json.loads(out.read_text())
        assert doc["n_samples"] == 4

    def test_unknown_stat_token(self, tmp_path, sphere_ensemble_json):
        code = run(tmp_path, "stats", "--ensemble", sphere_ensemble_json, "--stats", "mode")
        assert code == EXIT_VALIDATION


class TestSlicesCommand:
    def test_sphere_slice_fixture(self, tmp_path, sphere_ensemble_json):
        out = tmp_path / "slice.json"
        code = run(
            tmp_path,
            "slices", "--ensemble", sphere_ensemble_json,
            "--kept", "0,1", "--v", "0.6", "--sub-k", "45", "--out", str(out),
        )
        assert code == EXIT_OK
        doc = json.loads(out.read_text())
        assert doc["scale"] == pytest.approx(0.8)
        assert np.allclose(doc["stats"]["mean"], 0.8, atol=1e-12)
        assert np.allclose(doc["stats"]["q0.05"], 0.8, atol=1e-12)

    def test_invalid_v_norm(self, tmp_path, sphere_ensemble_json):
        code = run(
            tmp_path,
            "slices", "--ensemble", sphere_ensemble_json, "--kept", "0,1", "--v", "1.5",
        )
        assert code == EXIT_VALIDATION


class TestEvtCommand:
    def test_exponential_fixture(self, tmp_path):
        out = tmp_path / "evt.json"
        code = run(
            tmp_path,
            "evt", "--shape", "1.0", "--rates", "1,1",
            "--direction", "0.70710678,0.70710678", "--n", "256",
            "--samples", "100000", "--levels", "0.25,0.5,1.0,2.0",
            "--seed", "11", "--out", str(out),
        )
        assert code == EXIT_OK
        doc = json.loads(out.read_text())
        assert doc["norm_constants"]["k"] == pytest.approx(math.sqrt(2), rel=1e-6)
        emp = np.asarray(doc["excess"]["empirical"])
        closed = np.asarray(doc["excess"]["exponential_closed_form"])
        assert np.all(np.abs(emp - closed) < 0.02)

    def test_invalid_shape(self, tmp_path):
        code = run(
            tmp_path,
            "evt", "--shape", "-1", "--rates", "1,1", "--direction", "0.7,0.7", "--n", "16",
        )
        assert code == EXIT_VALIDATION


def synthetic_pollution_csv(tmp_path, delta=0.6, n_days=120, seed=5):
    """Two synthetic years; the second is the first shifted down by delta."""
    rng = np.random.default_rng(seed)
    base = rng.uniform(2.0, 5.0, size=(n_days, 3))
    rows = []
    for year, shift in (("2020", 0.0), ("2021", delta)):
        for d in range(n_days):
            month = 1 + (d // 28) % 12
            day = 1 + d % 28
            ts = f"{year}-{month:02d}-{day:02d}T12:00:00Z"
            vals = base[d] - shift
            rows.append(f"{ts},{vals[0]:.6f},{vals[1]:.6f},{vals[2]:.6f}")
    path = tmp_path / "pollution.csv"
    path.write_text("timestamp,no2,o3,so2\n" + "\n".join(rows) + "\n")
    return str(path)


class TestPollutionCommand:
    def test_downward_shift_detected(self, tmp_path):
        csv_path = synthetic_pollution_csv(tmp_path)
        out = tmp_path / "pollution.json"
        code = run(
            tmp_path,
            "pollution", "--csv", csv_path, "--eta", "0,0,0",
            "--grid2d-k", "32", "--levels-n", "8", "--bootstrap", "48",
            "--seed", "2", "--out", str(out),
        )
        assert code == EXIT_OK
        doc = json.loads(out.read_text())
        assert doc["periods"] == ["2020", "2021"]
        assert len(doc["pairs"]) == 3
        for pair in doc["pairs"]:
            change = pair["changes"][0]
            assert change["mean_negative"] < 0.0
            assert change["mean_positive"] < 0.01
            for label, values in pair["maps"].items():
                arr = np.asarray(values)
                assert np.all((arr >= 0) & (arr <= 1))
                assert np.all(np.diff(arr, axis=0) <= 1e-12)

    def test_bad_csv_is_data_error(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("time,a\n2020-01-01,1\n")
        code = run(tmp_path, "pollution", "--csv", str(bad))
        assert code == EXIT_DATA


class TestDecideCommand:
    def test_exact_generator(self, tmp_path, table_json):
        out = tmp_path / "decide.json"
        code = run(
            tmp_path,
            "decide", "--table", table_json, "--target", "2.0,1.0", "--out", str(out),
        )
        assert code == EXIT_OK
        doc = json.loads(out.read_text())
        assert doc["input_id"] == "x2"

    def test_two_value_example(self, tmp_path):
        lam = np.array([0.6, 0.8])
        pts = np.stack([2.0 * lam, 3.0 * lam])
        doc = {"inputs": ["a", "b"], "samples": np.tile(pts, (3, 1, 1)).tolist(), "eta": [0, 0]}
        table = tmp_path / "t.json"
        table.write_text(json.dumps(doc))
        out = tmp_path / "d.json"
        target = 2.9 * lam
        code = run(
            tmp_path,
            "decide", "--table", str(table),
            "--target", f"{target[0]},{target[1]}", "--out", str(out),
        )
        assert code == EXIT_OK
        assert json.loads(out.read_text())["input_id"] == "b"

    def test_invalid_target(self, tmp_path, table_json):
        code = run(tmp_path, "decide", "--table", table_json, "--target=-1,-1")
        assert code == EXIT_VALIDATION


class TestParser:
    def test_unknown_flag_exits_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["front", "--points", "x", "--eta", "0,0", "--bogus"])
        assert exc.value.code == 2

    def test_help_lists_subcommands(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--help"])
        assert exc.value.code == 0
        text = capsys.readouterr().out
        for name in ("front", "stats", "slices", "evt", "pollution", "decide", "serve"):
            assert name in text
