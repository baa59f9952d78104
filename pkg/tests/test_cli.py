import json
import math

import numpy as np
import pytest

from schroflow import flow
from schroflow.cli import main
from schroflow.oscillator import ModeIndex, build_table, make_mode
from schroflow.angular import constant_a_spectrum


def write_config(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def read_csv(path):
    header = []
    rows = []
    cols = None
    for line in open(path):
        line = line.rstrip("\n")
        if line.startswith("#"):
            header.append(line)
        elif cols is None:
            cols = line.split(",")
        else:
            rows.append(line.split(","))
    return header, cols, rows


class TestSpectrum:
    def test_loss_of_decay_run(self, tmp_path):
        cfg = write_config(tmp_path, "c.json",
                           {"problem": {"N": 3, "a": -0.1875},
                            "experiment": {"K": 4}})
        out = tmp_path / "out"
        code = main(["spectrum", "--config", cfg, "--out", str(out)])
        assert code == 0
        header, cols, rows = read_csv(out / "spectrum.csv")
        assert cols == ["k", "mu", "alpha", "beta"]
        assert any("classification: loss_of_decay" in h for h in header)
        assert any(h.startswith("# config_sha256: ") for h in header)
        assert rows[0] == ["1", repr(-0.1875), repr(0.25), repr(0.25)]

    def test_hardy_violation_exit_code(self, tmp_path):
        cfg = write_config(tmp_path, "c.json",
                           {"problem": {"N": 3, "a": -0.25},
                            "experiment": {"K": 2}})
        out = tmp_path / "out"
        assert main(["spectrum", "--config", cfg, "--out", str(out)]) == 3
        header, _, _ = read_csv(out / "spectrum.csv")
        assert any("classification: invalid" in h for h in header)

    def test_unknown_key_exit_code(self, tmp_path):
        cfg = write_config(tmp_path, "c.json",
                           {"problem": {"N": 3, "a": 0.0}, "bogus": 1})
        assert main(["spectrum", "--config", cfg, "--out", str(tmp_path)]) == 2

    def test_missing_config_exit_code(self, tmp_path):
        assert main(["spectrum", "--config", str(tmp_path / "nope.json")]) == 2

    def test_expectation_miss_exit_code(self, tmp_path):
        cfg = write_config(tmp_path, "c.json",
                           {"problem": {"N": 3, "a": -0.1875},
                            "experiment": {"K": 1}})
        code = main(["spectrum", "--config", cfg, "--out", str(tmp_path),
                     "--expect", '{"alpha_1": 0.5, "alpha_1_tol": 0.01}'])
        assert code == 4

    def test_magnetic_circle_spectrum(self, tmp_path):
        cfg = write_config(tmp_path, "c.json",
                           {"problem": {"N": 2, "magnetic": {"0": 0.3},
                                        "truncation": 16},
                            "experiment": {"K": 3}})
        out = tmp_path / "out"
        assert main(["spectrum", "--config", cfg, "--out", str(out)]) == 0
        _, _, rows = read_csv(out / "spectrum.csv")
        assert float(rows[0][1]) == pytest.approx(0.09, abs=1e-10)

    def test_byte_identical_reruns(self, tmp_path):
        cfg = write_config(tmp_path, "c.json",
                           {"problem": {"N": 3, "a": -0.1875},
                            "experiment": {"K": 6}})
        o1, o2 = tmp_path / "r1", tmp_path / "r2"
        main(["spectrum", "--config", cfg, "--out", str(o1)])
        main(["spectrum", "--config", cfg, "--out", str(o2)])
        assert (o1 / "spectrum.csv").read_bytes() == (o2 / "spectrum.csv").read_bytes()


class TestEvolve:
    def test_closed_route_matches_library(self, tmp_path):
        cfg = write_config(tmp_path, "c.json",
                           {"problem": {"N": 3, "a": -0.1875},
                            "experiment": {"mode": [0, 1], "t": 1.0,
                                           "route": "closed"}})
        out = tmp_path / "out"
        assert main(["evolve", "--config", cfg, "--out", str(out)]) == 0
        _, cols, rows = read_csv(out / "profiles.csv")
        assert cols == ["t", "r", "re_u", "im_u"]
        table = build_table(constant_a_spectrum(3, -0.1875, 1), 3, 1)
        mode = make_mode(ModeIndex(0, 1), table)
        r = np.array([float(row[1]) for row in rows])
        u = np.array([complex(float(row[2]), float(row[3])) for row in rows])
        ref = flow.evolve_mode_closed_form(mode, r, 1.0)
        assert np.max(np.abs(u - ref)) == 0.0

    def test_kernel_route_summary(self, tmp_path):
        cfg = write_config(tmp_path, "c.json",
                           {"problem": {"N": 3, "a": -0.1875},
                            "experiment": {"mode": [0, 1], "t": 1.0,
                                           "route": "kernel"}})
        out = tmp_path / "out"
        code = main(["evolve", "--config", cfg, "--out", str(out),
                     "--expect", '{"rel_l2_max": 1e-3}'])
        assert code == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["schema_version"] == 1
        assert summary["rel_l2_vs_closed"] < 1e-6
        assert "config_sha256" in summary["provenance"]

    def test_bad_route(self, tmp_path):
        cfg = write_config(tmp_path, "c.json",
                           {"problem": {"N": 3, "a": 0.0},
                            "experiment": {"mode": [0, 1], "t": 1.0,
                                           "route": "teleport"}})
        assert main(["evolve", "--config", cfg, "--out", str(tmp_path)]) == 2

    def test_bad_mode_spec(self, tmp_path):
        cfg = write_config(tmp_path, "c.json",
                           {"problem": {"N": 3, "a": 0.0},
                            "experiment": {"mode": [0], "t": 1.0}})
        assert main(["evolve", "--config", cfg, "--out", str(tmp_path)]) == 2


class TestDecay:
    def test_asymptotic_slope(self, tmp_path):
        cfg = write_config(tmp_path, "c.json",
                           {"problem": {"N": 3, "a": -0.1875},
                            "experiment": {"mode": [0, 1], "weight": 0.25,
                                           "times": {"lo_exp": 4, "hi_exp": 14},
                                           "window": [1e-4, 2.0],
                                           "samples": 400}})
        out = tmp_path / "out"
        code = main(["decay", "--config", cfg, "--out", str(out),
                     "--expect", '{"slope": -1.25, "slope_tol": 0.02}'])
        assert code == 0
        report = json.loads((out / "decay.json").read_text())
        assert abs(report["decay"]["fitted_slope"] + 1.25) < 0.02
        assert (out / "samples.csv").exists()

    def test_preasymptotic_window_misses(self, tmp_path):
        # early dyadic times are biased by the (1+t^2) scale: slope -1.2125
        cfg = write_config(tmp_path, "c.json",
                           {"problem": {"N": 3, "a": -0.1875},
                            "experiment": {"mode": [0, 1], "weight": 0.25,
                                           "times": {"lo_exp": 0, "hi_exp": 10},
                                           "window": [1e-4, 2.0],
                                           "samples": 400}})
        code = main(["decay", "--config", cfg, "--out", str(tmp_path),
                     "--expect", '{"slope": -1.25, "slope_tol": 0.02}'])
        assert code == 4


class TestKernel:
    def test_free_constancy_column(self, tmp_path):
        cfg = write_config(tmp_path, "c.json",
                           {"problem": {"N": 3, "a": 0.0},
                            "experiment": {"K": 169, "path": "legendre_collapsed",
                                           "rho": {"lo": 0.1, "hi": 2.0, "n": 8},
                                           "x_dir": [0.4, 0.3],
                                           "y_dir": [1.2, 2.1]}})
        out = tmp_path / "out"
        assert main(["kernel", "--config", cfg, "--out", str(out)]) == 0
        _, cols, rows = read_csv(out / "kernel.csv")
        i = cols.index("scaled_modulus")
        for row in rows:
            assert abs(float(row[i]) - 1.0) < 1e-5
            assert row[cols.index("truncation_warning")] == "0"

    def test_empty_grid_exit_code(self, tmp_path):
        cfg = write_config(tmp_path, "c.json",
                           {"problem": {"N": 3, "a": 0.0},
                            "experiment": {"K": 9, "rho": [],
                                           "x_dir": [0.4, 0.3],
                                           "y_dir": [1.2, 2.1]}})
        assert main(["kernel", "--config", cfg, "--out", str(tmp_path)]) == 2


class TestHeat:
    def test_free_heat_run(self, tmp_path):
        cfg = write_config(tmp_path, "c.json",
                           {"problem": {"N": 3, "a": 0.0},
                            "experiment": {"k": 1, "fd_points": 3000,
                                           "dt": 2e-3}})
        out = tmp_path / "out"
        code = main(["heat", "--config", cfg, "--out", str(out),
                     "--expect", '{"residual_max": 1e-4}'])
        assert code == 0
        report = json.loads((out / "residual.json").read_text())
        assert report["free_profile_dev"] <= 1e-10
        assert abs(report["fitted_exponent"] + 1.5) < 1e-10

    def test_hardy_violation(self, tmp_path):
        cfg = write_config(tmp_path, "c.json",
                           {"problem": {"N": 3, "a": -0.5},
                            "experiment": {"k": 1}})
        assert main(["heat", "--config", cfg, "--out", str(tmp_path)]) == 3


class TestCompare:
    def test_free_quick(self, tmp_path):
        cfg = write_config(tmp_path, "c.json",
                           {"problem": {"N": 3, "a": 0.0},
                            "experiment": {"mode": [0, 1], "fd_points": 3000,
                                           "dt": 2e-3, "quad_panels": 250,
                                           "quad_nodes": 16}})
        out = tmp_path / "out"
        code = main(["compare", "--config", cfg, "--out", str(out),
                     "--expect", '{"l2_worst_max": 1e-3}'])
        assert code == 0
        report = json.loads((out / "compare.json").read_text())
        assert not report["comparison"]["failures"]


class TestThreads:
    def test_invalid_env_value(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SCHROFLOW_THREADS", "many")
        cfg = write_config(tmp_path, "c.json",
                           {"problem": {"N": 3, "a": 0.0}})
        assert main(["spectrum", "--config", cfg, "--out", str(tmp_path)]) == 2

    def test_threads_recorded(self, tmp_path):
        cfg = write_config(tmp_path, "c.json",
                           {"problem": {"N": 3, "a": 0.0},
                            "experiment": {"K": 2}})
        out = tmp_path / "out"
        assert main(["spectrum", "--config", cfg, "--out", str(out),
                     "--threads", "2"]) == 0
        header, _, _ = read_csv(out / "spectrum.csv")
        assert "# threads: 2" in header
