import csv
import io
import json

import numpy as np
import pytest

from dephase_lab.cli import main
from dephase_lab.experiments import (
    RunConfig,
    boundary_curve,
    build_series,
    config_from_manifest,
    fig1_curves,
    registry,
    run_experiment,
)


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestCommands:
    def test_sample_separable_row(self, capsys):
        code, out, _ = run_cli(capsys, "sample", "--qubits", "2", "--ensemble", "separable",
                               "--interaction", "z,2z", "--samples", "1", "--workers", "1")
        assert code == 0
        data = rows(out)
        assert len(data) == 1
        assert float(data[0]["q"]) < 1e-9
        assert data[0]["interaction"] == "z,2z"

    def test_list(self, capsys):
        code, out, _ = run_cli(capsys, "list")
        assert code == 0
        names = [line.split()[0] for line in out.strip().splitlines()]
        assert len(names) >= 9
        for name in ("fig1", "fig2", "table600", "fig3", "table602", "fig4", "fig5", "fig6", "appC",
                     "fig7", "dicke-table", "fig8", "appE"):
            assert name in names
        assert set(registry()) == set(names)

    def test_float_format(self, capsys):
        _, out, _ = run_cli(capsys, "sample", "--qubits", "2", "--samples", "3", "--workers", "1", "--seed", "4")
        q = rows(out)[0]["q"]
        assert float(q) == float(format(float(q), ".17g"))
        assert "e" in q.lower() or len(q.replace("-", "").replace(".", "").lstrip("0")) >= 15

    def test_files_and_summary(self, capsys, tmp_path):
        out, summ = tmp_path / "a.csv", tmp_path / "a.json"
        code, stdout, _ = run_cli(capsys, "sample", "--qubits", "3", "--samples", "500", "--seed", "1",
                                  "--workers", "1", "--out", str(out), "--summary", str(summ))
        assert code == 0 and stdout == ""
        assert len(rows(out.read_text())) == 500
        data = json.loads(summ.read_text())
        entry = data["results"][0]
        for key in ("count", "mean_q", "mean_s", "var_q", "var_s", "pearson", "line", "binned_curve"):
            assert key in entry["summary"]
        man = data["manifest"]
        assert man["seed"] == 1
        assert man["per_stream_sample_counts"]
        assert "wall_time_s" in man and "version" in man

    def test_seed_env_fallback(self, capsys, monkeypatch):
        monkeypatch.setenv("DEPHASE_LAB_SEED", "11")
        _, a, _ = run_cli(capsys, "sample", "--qubits", "2", "--samples", "5", "--workers", "1")
        _, b, _ = run_cli(capsys, "sample", "--qubits", "2", "--samples", "5", "--workers", "1", "--seed", "11")
        _, c, _ = run_cli(capsys, "sample", "--qubits", "2", "--samples", "5", "--workers", "1", "--seed", "12")
        assert a == b != c


class TestExitCodes:
    @pytest.mark.parametrize(
        "argv",
        [
            ["sample", "--qubits", "2", "--interaction", "zz"],
            ["sample", "--qubits", "2", "--ensemble", "gauss"],
            ["sample", "--qubits", "2", "--interaction", "z,z,z"],
            ["sample", "--qubits", "2,3"],
            ["experiment", "nope"],
            ["sample", "--qubits", "2", "--samples", "0"],
            ["bogus"],
        ],
    )
    def test_usage(self, capsys, argv):
        with pytest.raises(SystemExit) as info:
            main(argv)
        assert info.value.code == 2

    def test_infeasible_is_runtime(self, capsys):
        code, _, err = run_cli(capsys, "sample", "--qubits", "3", "--ensemble", "energy=0:1e-9", "--samples", "1",
                               "--workers", "1")
        assert code == 1
        assert "rate" in err

    def test_verify_zero_tolerance(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "--properties-only", "--tol-scale", "0")
        assert code == 1
        assert "first failure: C" in out


class TestReproducibility:
    def test_worker_count_does_not_matter(self):
        base = RunConfig("sample", qubits=[3], samples=40_000, seed=3, workers=1)
        a, _ = run_experiment(base)
        b, _ = run_experiment(RunConfig("sample", qubits=[3], samples=40_000, seed=3, workers=2))
        assert a == b

    def test_rejection_worker_count_does_not_matter(self):
        kw = dict(qubits=[2], samples=300, seed=5, ensemble="energy=0.5:0.01")
        a, sa = run_experiment(RunConfig("sample", workers=1, **kw))
        b, sb = run_experiment(RunConfig("sample", workers=3, **kw))
        assert a == b
        assert len(rows(a)) == 300
        assert sa["results"][0]["attempts"] == sb["results"][0]["attempts"] > 300

    def test_manifest_rerun(self):
        csv_a, summary = run_experiment(RunConfig("fig4", samples=300, seed=9, workers=1))
        csv_b, _ = run_experiment(config_from_manifest(json.loads(json.dumps(summary["manifest"]))))
        assert csv_a == csv_b


class TestExperiments:
    def test_fig2_three_qubits(self):
        _, summary = run_experiment(RunConfig("fig2", qubits=[3], samples=100_000, seed=7, workers=1))
        entry = next(e for e in summary["results"] if e["series"] == "haar-3q")
        assert entry["summary"]["mean_q"] == pytest.approx(1.00, abs=0.01)
        assert entry["summary"]["mean_s"] == pytest.approx(2.48, abs=0.01)

    def test_fig3_two_interacting(self):
        _, summary = run_experiment(RunConfig("fig3", qubits=[4], interacting=[2], samples=100_000, seed=7,
                                              workers=1))
        entry = next(e for e in summary["results"] if e["series"] == "haar-4q")
        assert entry["summary"]["mean_s"] == pytest.approx(1.87, abs=0.01)

    def test_fig8_sparse_64(self):
        _, summary = run_experiment(RunConfig("fig8", qubits=[64], samples=50_000, seed=7, workers=1))
        line = summary["results"][0]["summary"]["line"]
        assert line["kind"] == "least-squares"
        assert line["angle_degrees"] == pytest.approx(85.0, abs=1.0)

    def test_fig1_diagonal(self):
        _, summary = run_experiment(RunConfig("fig1"))
        aligned = [e for e in summary["results"] if e["schmidt_aligned"]]
        assert aligned
        for e in aligned:
            assert e["max_abs_diagonal_deviation"] < 1e-9
        for e in summary["results"]:
            assert e["min_gap_above_diagonal"] > -1e-9

    def test_fig1_curves_shape(self):
        curves = fig1_curves(points=11)
        assert all(len(c["s_e"]) == len(c["s_n"]) == 11 for c in curves)

    def test_boundary_curve_peak(self):
        xs, q, s = boundary_curve(0.2, points=2001)
        assert xs[np.argmax(s)] == pytest.approx(0.16, abs=1e-4)
        assert q[np.argmax(s)] < 1e-9

    def test_every_registered_builder(self):
        for name in registry():
            series = build_series(RunConfig(name, samples=10))
            if name != "fig1":
                assert series, name

    def test_energy_experiment_tags(self):
        _, summary = run_experiment(RunConfig("fig5", qubits=[2], samples=50, seed=1, workers=1))
        es = sorted({e["E"] for e in summary["results"]})
        assert es == [0.05, 0.1, 0.2, 0.5]
        assert {e["interaction"] for e in summary["results"]} == {"z", "x"}
