"""
End-to-end tests for the hapq CLI.
"""

import json

import pytest
from typer.testing import CliRunner

from hapq import __version__
from hapq.cli.main import app

runner = CliRunner()


def invoke(*args: str):
    return runner.invoke(app, [str(a) for a in args])


class TestPlan:
    def test_nominal_plan_is_feasible(self, nominal_config_path, tmp_path):
        result = invoke("plan", "--config", nominal_config_path, "--out", tmp_path)
        assert result.exit_code == 0, result.output
        assert "addressable_planes = 153" in (tmp_path / "plan.txt").read_text()
        payload = json.loads((tmp_path / "plan.json").read_text())
        assert payload["feasible"] is True

    def test_unboosted_plan_is_infeasible(self, unboosted_config_path, tmp_path):
        result = invoke("plan", "--config", unboosted_config_path, "--out", tmp_path)
        assert result.exit_code == 3
        assert "feasible = false" in (tmp_path / "plan.txt").read_text()

    def test_missing_device_key(self, write_config, tmp_path):
        path = write_config("device.gradient = 2e6 G/cm\ndevice.strategy = nnn\n")
        result = invoke("plan", "--config", path, "--out", tmp_path)
        assert result.exit_code == 2
        assert not (tmp_path / "plan.txt").exists()

    def test_csv_only_skips_json(self, nominal_config_path, tmp_path):
        result = invoke("plan", "--config", nominal_config_path, "--out", tmp_path, "--format", "csv")
        assert result.exit_code == 0
        assert (tmp_path / "plan.txt").exists()
        assert not (tmp_path / "plan.json").exists()

    def test_reruns_are_byte_identical(self, nominal_config_path, tmp_path):
        first, second = tmp_path / "first", tmp_path / "second"
        for directory in (first, second):
            assert invoke("plan", "--config", nominal_config_path, "--out", directory).exit_code == 0
        for name in ("plan.txt", "plan.json"):
            assert (first / name).read_bytes() == (second / name).read_bytes()


class TestUsageErrors:
    def test_missing_config_file(self, tmp_path):
        result = invoke("plan", "--config", tmp_path / "absent.conf", "--out", tmp_path)
        assert result.exit_code == 2

    def test_unknown_key(self, write_config, tmp_path):
        result = invoke("couplings", "--config", write_config("lattice.colour = blue\n"), "--out", tmp_path)
        assert result.exit_code == 2

    def test_invalid_format(self, nominal_config_path, tmp_path):
        result = invoke("couplings", "--config", nominal_config_path, "--out", tmp_path, "--format", "xml")
        assert result.exit_code == 2

    def test_unknown_sequence(self, nominal_config_path, tmp_path):
        result = invoke("avgham", "wahuha", "--config", nominal_config_path, "--out", tmp_path)
        assert result.exit_code == 2

    def test_same_plane_gate(self, nominal_config_path, tmp_path):
        result = invoke("gate", "1", "1", "--config", nominal_config_path, "--out", tmp_path)
        assert result.exit_code == 2

    def test_empty_cluster(self, write_config, tmp_path):
        path = write_config("simulation.chains = 9\n")
        for command in (("couplings",), ("avgham", "lg")):
            result = invoke(*command, "--config", path, "--out", tmp_path)
            assert result.exit_code == 2
            assert "no sites" in result.output


class TestCouplings:
    def test_writes_tables(self, nominal_config_path, tmp_path):
        result = invoke("couplings", "--config", nominal_config_path, "--out", tmp_path)
        assert result.exit_code == 0, result.output
        for name in ("couplings.csv", "sites.csv", "reference_couplings.csv", "couplings.json"):
            assert (tmp_path / name).exists()
        header = (tmp_path / "couplings.csv").read_text().splitlines()[0]
        assert header.startswith("i,j")

    def test_single_plane_lattice(self, write_config, tmp_path):
        result = invoke("couplings", "--config", write_config("lattice.n_planes = 1\n"), "--out", tmp_path)
        assert result.exit_code == 0, result.output
        assert "1 sites, 0 couplings" in result.output

    def test_reruns_are_byte_identical(self, nominal_config_path, tmp_path):
        first, second = tmp_path / "first", tmp_path / "second"
        for directory in (first, second):
            assert invoke("couplings", "--config", nominal_config_path, "--out", directory).exit_code == 0
        for path in sorted(first.iterdir()):
            assert path.read_bytes() == (second / path.name).read_bytes()


class TestSimulationCommands:
    def test_avgham_mrev8(self, nominal_config_path, tmp_path):
        result = invoke("avgham", "mrev8", "--config", nominal_config_path, "--out", tmp_path)
        assert result.exit_code == 0, result.output
        assert (tmp_path / "avgham_mrev8.csv").exists()
        assert (tmp_path / "avgham_mrev8.json").exists()

    def test_avgham_lg(self, nominal_config_path, tmp_path):
        result = invoke("avgham", "lg", "--config", nominal_config_path, "--out", tmp_path)
        assert result.exit_code == 0, result.output
        summary = json.loads((tmp_path / "avgham_lg.json").read_text())["summary"]
        assert summary["dipolar_form"] == "full_secular"
        assert summary["two_spin_relative"] <= 1e-6
        assert summary["cross_check_fidelity"] >= 0.99
        sweep = (tmp_path / "avgham_lg_sweep.csv").read_text().splitlines()
        assert sweep[0] == "ratio,amplitude_hz,fidelity"
        assert len(sweep) == 1 + 4

    def test_avgham_recouple(self, nominal_config_path, tmp_path):
        result = invoke("avgham", "recouple", "--config", nominal_config_path, "--out", tmp_path)
        assert result.exit_code == 0, result.output
        summary = json.loads((tmp_path / "avgham_recouple.json").read_text())["summary"]
        assert summary["dipolar_form"] == "interplane_zz"
        assert summary["d_ab_sign"] == 1
        assert summary["d_ab_scaling"] == pytest.approx(2 / 3, rel=0.02)
        assert summary["d_ab_hz"] == pytest.approx(2 / 3 * summary["bare_d_ab_hz"], rel=0.02)
        assert summary["cross_check_fidelity"] >= 0.99
        assert "below" not in result.output

    def test_low_recoupling_amplitude_warns(self, write_config, tmp_path):
        text = "lattice.n_planes = 3\nsimulation.recouple_amplitude = 2 kHz\nsimulation.n_cycles = 10\n"
        result = invoke("avgham", "recouple", "--config", write_config(text), "--out", tmp_path)
        assert result.exit_code == 0, result.output
        summary = json.loads((tmp_path / "avgham_recouple.json").read_text())["summary"]
        assert summary["cross_check_fidelity"] < 0.99
        assert "Cross-check fidelity" in result.output

    @pytest.mark.parametrize(
        "command, files",
        [
            (("avgham", "lg"), ("avgham_lg.csv", "avgham_lg_summary.csv", "avgham_lg_sweep.csv", "avgham_lg.json")),
            (("simulate",), ("simulate_lg.csv", "simulate_lg_summary.csv", "simulate_lg.json")),
            (("gate", "0", "2"), ("gate_0_2.schedule", "gate_0_2.csv", "gate_0_2.json")),
        ],
    )
    def test_reruns_are_byte_identical(self, nominal_config_path, tmp_path, command, files):
        first, second = tmp_path / "first", tmp_path / "second"
        for directory in (first, second):
            result = invoke(*command, "--config", nominal_config_path, "--out", directory)
            assert result.exit_code == 0, result.output
        for name in files:
            assert (first / name).read_bytes() == (second / name).read_bytes()

    def test_avgham_quadrature_failure_is_numerical(self, write_config, tmp_path):
        path = write_config("lattice.n_planes = 2\nsimulation.tolerance = 1e-300\nsimulation.n_cycles = 1\n")
        result = invoke("avgham", "lg", "--config", path, "--out", tmp_path)
        assert result.exit_code == 4

    def test_simulate_lg(self, nominal_config_path, tmp_path):
        result = invoke("simulate", "--config", nominal_config_path, "--out", tmp_path, "--format", "csv")
        assert result.exit_code == 0, result.output
        rows = (tmp_path / "simulate_lg.csv").read_text().splitlines()
        assert rows[0] == "cycle,time_s,transverse_magnetization"
        assert len(rows) == 1 + 11

    def test_gate(self, nominal_config_path, tmp_path):
        result = invoke("gate", "0", "2", "--config", nominal_config_path, "--out", tmp_path)
        assert result.exit_code == 0, result.output
        schedule = (tmp_path / "gate_0_2.schedule").read_text()
        assert schedule.startswith("# schedule name=cnot(0->2)")
        summary = json.loads((tmp_path / "gate_0_2.json").read_text())
        assert summary["fidelity_ideal"] == pytest.approx(1.0, abs=1e-9)
        assert summary["fidelity_cluster"] < summary["fidelity_ideal"]
        assert summary["fidelity_cluster"] == pytest.approx(summary["fidelity_cluster_average"], abs=0.01)
        assert summary["d_ab_sign"] == 1
        assert summary["recouple_cycle_s"] == pytest.approx(2 / 100e3)
        assert summary["routed_cnot_count"] == 1


class TestInfo:
    def test_version(self):
        result = invoke("version")
        assert result.exit_code == 0
        assert __version__ in result.output

    def test_info(self):
        result = invoke("info")
        assert result.exit_code == 0
        assert "hapq" in result.output
