import json

import numpy as np
import pytest

from pointer_tof import io
from pointer_tof.cli import EXIT_CONTRACT, EXIT_OK, EXIT_ORACLE, EXIT_VALIDATION, main
from pointer_tof.config import RunConfig

REF_SETUP = {"kappa": 1.0, "t1": 0.5, "t2": 1.5, "T": 3.0, "mass_ratio": 0.1, "P0": 100.0, "dP0": 150.0, "dp": 30.0}
DESK_SETUP = {"kappa": 1.0, "t1": 0.25, "t2": 0.75, "T": 1.0, "mass_ratio": 0.1, "P0": 2.0, "dP0": 1.0, "dp": 0.5}


@pytest.fixture
def run(tmp_path, capsys):
    """Write ``config`` to disk, run a subcommand, return (exit code, stdout, stderr)."""

    def invoke(command, config, *extra, raw=None):
        path = tmp_path / "config.json"
        path.write_text(raw if raw is not None else json.dumps(config))
        code = main([command, str(path), *extra])
        out, err = capsys.readouterr()
        return code, out, err

    return invoke


class TestSimulate:
    def test_reference_report(self, run):
        code, out, _ = run("simulate", {"setup": REF_SETUP})
        assert code == EXIT_OK
        report = json.loads(out)
        assert report["tof_expectation"] == pytest.approx(100.0, abs=1e-10)
        assert report["var_pt"] == pytest.approx(24300.0, rel=1e-12)
        assert report["labels"] == ["X", "P", "x1", "p1", "x2", "p2"]
        assert np.asarray(report["cov"]).shape == (6, 6)

    def test_zero_coupling_warns(self, run):
        code, out, err = run("simulate", {"setup": {**REF_SETUP, "kappa": 0.0}})
        assert code == EXIT_OK
        assert "tof_expectation" not in json.loads(out)
        assert "warning" in err and "kappa = 0" in err

    def test_malformed_config(self, run):
        code, out, err = run("simulate", None, raw="{\"setup\": {\"kappa\": 1.0,,}")
        assert code == EXIT_VALIDATION
        assert out == ""
        assert len(err.strip().splitlines()) == 1 and "malformed config" in err

    def test_constraint_violation_names_parameter(self, run):
        code, _, err = run("simulate", {"setup": {**REF_SETUP, "t2": 0.2}})
        assert code == EXIT_VALIDATION
        assert "t2" in err

    def test_missing_file(self, tmp_path, capsys):
        assert main(["simulate", str(tmp_path / "nope.json")]) == EXIT_VALIDATION

    def test_override_flags(self, run):
        code, out, _ = run("simulate", {"setup": REF_SETUP}, "--setup.kappa", "2", "--setup.P0=5")
        assert code == EXIT_OK
        report = json.loads(out)
        assert report["tof_expectation"] == pytest.approx(10.0, abs=1e-10)
        assert report["config"]["setup"]["kappa"] == 2.0

    def test_byte_identical_reruns(self, run, tmp_path):
        target = tmp_path / "report.json"
        outputs = []
        for _ in range(2):
            assert run("simulate", {"setup": REF_SETUP}, "--out", str(target))[0] == EXIT_OK
            outputs.append(target.read_bytes())
            target.unlink()
        assert outputs[0] == outputs[1]


class TestCondition:
    def test_unbiased_readout(self, run):
        code, out, _ = run("condition", {"setup": REF_SETUP, "condition": {"p_out": 100.0}})
        assert code == EXIT_OK
        result = json.loads(out)["result"]
        assert result["p_c"] == 100.0
        assert result["width_ratio"] < 1.0

    def test_wing_readout_same_width(self, run):
        ratios = []
        for p_out in (100.0, 400.0):
            code, out, _ = run("condition", {"setup": REF_SETUP, "condition": {"p_out": p_out}})
            ratios.append(json.loads(out)["result"]["width_ratio"])
        assert ratios[0] == pytest.approx(ratios[1], rel=1e-12)

    def test_missing_readout(self, run):
        code, _, err = run("condition", {"setup": REF_SETUP})
        assert code == EXIT_VALIDATION and "p_out" in err
        code, _, err = run("condition", {"setup": REF_SETUP, "condition": {}})
        assert code == EXIT_VALIDATION and "p_out" in err

    def test_density_csv(self, run):
        config = {"setup": REF_SETUP, "condition": {"p_out": 130.0}}
        code, out, _ = run("condition", config, "--format", "csv")
        assert code == EXIT_OK
        meta, header, rows = io.read_csv(out)
        assert header == ["P", "initial", "traced", "conditioned"]
        assert rows.shape == (801, 4)
        assert meta["setup"]["dP0"] == 150.0

    def test_explicit_density_grid_in_json(self, run):
        config = {"setup": REF_SETUP, "condition": {"p_out": 130.0, "densities": {"start": 0, "stop": 200, "num": 5}}}
        code, out, _ = run("condition", config)
        assert code == EXIT_OK
        assert len(json.loads(out)["densities"]["conditioned"]) == 5


class TestSweep:
    def test_gradient_csv(self, run):
        config = {"setup": REF_SETUP, "sweep": {"axis1": {"name": "dp", "start": 1, "stop": 60, "num": 4},
                                                 "axis2": {"name": "dP0", "start": 1, "stop": 300, "num": 6}}}
        code, out, _ = run("sweep", config)
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[0].startswith("# ")
        assert lines[1] == "axis1,axis2,value"
        assert len(lines) == 2 + 24

    def test_width_ratio_narrows_for_broad_initial_width(self, run):
        config = {"setup": REF_SETUP, "sweep": {"axis1": {"name": "dp", "values": [10, 30, 60]},
                                                 "axis2": {"name": "dP0", "values": [1, 50, 150, 300]},
                                                 "quantity": "width_ratio"}}
        code, out, _ = run("sweep", config)
        _, _, rows = io.read_csv(out)
        below = rows[rows[:, 2] < 1.0]
        assert len(below) > 0
        assert below[:, 1].min() > 1.0
        assert np.all(rows[rows[:, 1] == 300.0][:, 2] < 1.0)

    def test_empty_axis(self, run):
        config = {"setup": REF_SETUP, "sweep": {"axis1": {"name": "dp", "values": []},
                                                 "axis2": {"name": "dP0", "values": [1.0]}}}
        assert run("sweep", config)[0] == EXIT_VALIDATION

    def test_missing_block(self, run):
        assert run("sweep", {"setup": REF_SETUP})[0] == EXIT_VALIDATION


class TestOracleCheck:
    def test_desk_scale_passes(self, run):
        code, out, _ = run("oracle-check", {"setup": DESK_SETUP, "oracle": {"n": 128}})
        assert code == EXIT_OK
        report = json.loads(out)
        assert report["passed"] and report["max_error"] < 0.01
        assert report["norm_drift"] < 1e-8

    def test_errors_shrink_under_refinement(self, run):
        errors = {}
        for n in (64, 128):
            code, out, _ = run("oracle-check", {"setup": DESK_SETUP, "oracle": {"n": n, "sigmas": 6.25}})
            assert code == EXIT_OK
            errors[n] = json.loads(out)["max_error"]
        assert errors[128] < errors[64]

    def test_grid_too_small(self, run):
        code, _, err = run("oracle-check", {"setup": DESK_SETUP, "oracle": {"half_width": [4.0, 7.0, 7.0]}})
        assert code == EXIT_VALIDATION
        assert "exceeds half_width" in err

    def test_aliasing_is_a_contract_violation(self, run):
        # 7-sigma extents at n=64 leave spectral mass at the momentum-grid edge
        code, _, err = run("oracle-check", {"setup": DESK_SETUP, "oracle": {"n": 64}})
        assert code == EXIT_CONTRACT
        assert "spectral mass" in err

    def test_mismatch_exit_code(self, run):
        code, out, _ = run("oracle-check", {"setup": DESK_SETUP, "oracle": {"n": 64, "sigmas": 6.25,
                                                                            "tolerance": 1e-9}})
        assert code == EXIT_ORACLE
        assert json.loads(out)["passed"] is False

    def test_density_dump(self, run, tmp_path):
        dump = tmp_path / "dens.csv"
        code, _, _ = run("oracle-check", {"setup": DESK_SETUP, "oracle": {"n": 64, "sigmas": 6.25, "dump": str(dump)}})
        assert code == EXIT_OK
        _, header, rows = io.read_csv(dump.read_text())
        assert header[0] == "P" and rows.shape[1] == 5


class TestOptimize:
    def test_coupling_search(self, run):
        config = {"setup": REF_SETUP, "optimize": {"free": {"kappa": [0.1, 5.0]}}}
        code, out, _ = run("optimize", config)
        assert code == EXIT_OK
        report = json.loads(out)
        assert report["best_ratio"] <= min(t["ratio"] for t in report["trace"])
        assert len(report["trace"]) == 8

    def test_infeasible(self, run):
        code, _, err = run("optimize", {"setup": REF_SETUP, "optimize": {"free": {"t2": [0.1, 0.4]}}})
        assert code == EXIT_VALIDATION
        assert "admissible" in err


@pytest.mark.parametrize("command, config", [
    ("simulate", {"setup": REF_SETUP}),
    ("condition", {"setup": REF_SETUP, "condition": {"p_out": 120.0, "densities": {"values": [90, 100]}}}),
    ("sweep", {"setup": REF_SETUP, "sweep": {"axis1": {"name": "dp", "values": [30]},
                                              "axis2": {"name": "kappa", "values": [1, 2]}, "workers": 2}}),
    ("optimize", {"setup": REF_SETUP, "optimize": {"free": {"T": [2.0, 5.0]}, "grid_points": 9}}),
])
def test_echoed_config_round_trips(run, command, config):
    code, out, _ = run(command, config, "--format", "json")
    assert code == EXIT_OK
    echoed = json.loads(out)["config"]
    # the echo is the effective configuration, flags included
    original = RunConfig.from_dict({**config, "output": {"format": "json"}}, command)
    assert RunConfig.from_dict(echoed, command) == original
    assert RunConfig.from_dict(original.to_dict(), command) == original


def test_oracle_config_round_trips():
    cfg = RunConfig.from_dict({"setup": DESK_SETUP, "oracle": {"n": 64, "p_out": 2.5, "half_width": [9, 7, 7]}},
                              "oracle-check")
    assert RunConfig.from_dict(cfg.to_dict(), "oracle-check") == cfg


def test_csv_float_format_is_17_digits():
    text = io.csv_text(["a"], [[0.1]])
    assert text.splitlines()[1] == "0.10000000000000001"
