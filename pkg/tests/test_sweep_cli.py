import json

import numpy as np
import pytest

from predinfo.cli import main
from predinfo.gaussian_info import InfoContext
from predinfo.lattice import decompose
from predinfo.sweep import (
    SweepSpec,
    SweptParam,
    rows_to_csv,
    run_sweep,
    sweep_columns,
    three_unit_model,
    three_unit_spec,
)
from predinfo.var_model import VarModel, read_csv, save_model, simulate_var, write_csv


class TestSweep:
    def test_row_major_order(self):
        spec = three_unit_spec(steps=3)
        rows = run_sweep(spec, q=6)
        got = [(r["c21"], r["c31"]) for r in rows]
        assert got == [(a, b) for a in (0.0, 0.25, 0.5) for b in (0.0, 0.25, 0.5)]
        assert all(r["status"] == "ok" for r in rows)

    def test_matches_direct_decomposition(self):
        rows = run_sweep(three_unit_spec(steps=2), q=20)
        ref = decompose(InfoContext.from_model(three_unit_model(0.5, 0.0)))
        r = next(r for r in rows if r["c21"] == 0.5 and r["c31"] == 0.0)
        assert r["delta_pid"] == pytest.approx(ref.delta_pid, abs=1e-12)

    def test_decoupled_grid_is_zero(self):
        base = VarModel(np.zeros((1, 2, 2)), np.eye(2))
        spec = SweepSpec(base, (SweptParam("a12", 1, 0, 1, 0.0, 0.0, 4),))
        for r in run_sweep(spec, q=4):
            assert r["pi"] == 0 and r["synergy"] == 0 and r["redundancy"] == 0

    def test_unstable_points_are_flagged(self):
        base = VarModel(np.zeros((1, 2, 2)), np.eye(2))
        spec = SweepSpec(base, (SweptParam("a11", 1, 0, 0, 0.5, 1.5, 3),))
        rows = run_sweep(spec, q=4)
        assert [r["status"] for r in rows] == ["ok", "unstable", "unstable"]
        assert rows[1]["radius"] == pytest.approx(1.0)
        text = rows_to_csv(spec, rows)
        assert text.splitlines()[0].split(",")[:3] == ["a11", "status", "radius"]

    def test_parallel_matches_serial(self):
        spec = three_unit_spec(steps=3)
        assert run_sweep(spec, q=6, jobs=2) == run_sweep(spec, q=6)

    def test_estimate_mode(self):
        rows = run_sweep(three_unit_spec(steps=1), estimate=20000, seed=1, max_order=3)
        ref = decompose(InfoContext.from_model(three_unit_model()))
        assert rows[0]["pi"] == pytest.approx(ref.pi, rel=0.1)

    def test_outputs_filter_and_spec_json(self):
        d = {
            "base": three_unit_model().to_dict(),
            "params": [{"name": "c21", "lag": 1, "row": 1, "col": 0, "min": 0, "max": 0.5, "steps": 2}],
            "outputs": ["pi", "delta_pid"],
        }
        spec = SweepSpec.from_dict(d)
        assert sweep_columns(spec) == ["c21", "status", "radius", "pi", "delta_pid"]

    def test_spec_validation(self):
        from predinfo.errors import InputError

        with pytest.raises(InputError):
            SweepSpec(three_unit_model(), (SweptParam("x", 3, 0, 0, 0, 1, 2),))
        with pytest.raises(InputError):
            SweepSpec.from_dict({"base": three_unit_model().to_dict(), "params": [{"name": "x"}]})


@pytest.fixture
def model_file(tmp_path):
    path = tmp_path / "model.json"
    save_model(three_unit_model(0.3, 0.0), path)
    return path


def run_cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


class TestCli:
    def test_simulate_is_reproducible(self, tmp_path, model_file, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run_cli(capsys, "simulate", model_file, "-T", 500, "--seed", 3, "--out", a)[0] == 0
        assert run_cli(capsys, "simulate", model_file, "-T", 500, "--seed", 3, "--out", b)[0] == 0
        assert a.read_bytes() == b.read_bytes()
        assert read_csv(a).data.shape == (500, 3)

    def test_analyze_recovers_order_and_values(self, tmp_path, model_file, capsys):
        csv = tmp_path / "x.csv"
        main(["simulate", str(model_file), "-T", "20000", "--seed", "1", "--out", str(csv)])
        code, out, _ = run_cli(capsys, "analyze", csv, "--max-order", 6)
        assert code == 0
        doc = json.loads(out)
        assert doc["schema"] == "predinfo.analysis/1" and doc["order"] == 2
        assert len(doc["bic"]) == 6
        ref = decompose(InfoContext.from_model(three_unit_model(0.3, 0.0)))
        assert doc["result"]["pi"] == pytest.approx(ref.pi, rel=0.1)
        assert doc["result"]["synergy"] == pytest.approx(ref.synergy, rel=0.1, abs=0.01)

    def test_bits_and_two_columns(self, tmp_path, capsys, rng):
        coeffs = np.array([[[0.5, 0.2], [0.3, 0.4]]])
        x = simulate_var(VarModel(coeffs, np.eye(2)), 2000, seed=2)
        csv = tmp_path / "x.csv"
        write_csv(x, csv)
        nats = json.loads(run_cli(capsys, "analyze", csv, "--order", 1)[1])["result"]
        bits = json.loads(run_cli(capsys, "analyze", csv, "--order", 1, "--units", "bits")[1])["result"]
        assert bits["units"] == "bits"
        assert bits["pi"] == pytest.approx(nats["pi"] / np.log(2))
        assert nats["delta_wms"] == pytest.approx(nats["delta_pid"], abs=1e-12)

    def test_surrogate_test_on_white_noise(self, tmp_path, capsys, rng):
        csv = tmp_path / "w.csv"
        write_csv(simulate_var(VarModel(np.zeros((1, 3, 3)), np.eye(3)), 500, seed=7), csv)
        code, out, _ = run_cli(
            capsys, "surrogate-test", csv, "--order", 1, "--q", 4, "--surrogates", 40, "--keep-surrogates"
        )
        assert code == 0
        sig = json.loads(out)["significance"]
        assert sig["n_surrogates"] == 40
        assert len(sig["measures"]["pi"]["surrogates"]) == 40

    def test_unstable_model_rejected(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        save_model(VarModel(np.array([[[1.2]]]), np.eye(1)), path)
        code, _, err = run_cli(capsys, "simulate", path, "-T", 10, "--out", tmp_path / "o.csv")
        assert code == 2
        e = json.loads(err)
        assert e["error"] == "NonStationaryError" and "1.2" in e["message"]

    def test_missing_file_and_bad_csv(self, tmp_path, capsys):
        code, _, err = run_cli(capsys, "analyze", tmp_path / "nope.csv")
        assert code == 2 and json.loads(err)["exit_code"] == 2
        bad = tmp_path / "bad.csv"
        bad.write_text("1,2\n3,x\n")
        code, _, err = run_cli(capsys, "analyze", bad)
        assert code == 2 and "row 2" in json.loads(err)["message"]

    def test_too_short(self, tmp_path, capsys, rng):
        csv = tmp_path / "s.csv"
        write_csv(simulate_var(three_unit_model(), 10, seed=0), csv)
        code, _, err = run_cli(capsys, "analyze", csv)
        assert code == 2 and "too short" in json.loads(err)["message"]

    def test_collinear_columns_exit_numerical(self, tmp_path, capsys):
        x = np.array(simulate_var(three_unit_model(), 500, seed=0).data)
        x[:, 2] = x[:, 0] + x[:, 1]
        csv = tmp_path / "c.csv"
        np.savetxt(csv, x, delimiter=",")
        code, _, err = run_cli(capsys, "analyze", csv, "--order", 1)
        assert code in (2, 3) and json.loads(err)["error"]

    def test_sweep_preset_csv(self, tmp_path, capsys):
        out = tmp_path / "s.csv"
        assert run_cli(capsys, "sweep", "--steps", 2, "--q", 6, "--out", out)[0] == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("c21,c31,status,radius,pi")
        assert len(lines) == 5 and all(",ok," in l for l in lines[1:])
