"""Command-line interface: exit codes, output selection, determinism."""

import json
import subprocess
import sys

import pytest

from coboson import cli


def run_cli(argv, capsys):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestExitCodes:
    def test_success(self, capsys):
        code, out, err = run_cli(["qdot", "--n-min", "2", "--n-max", "3",
                                  "--r", "0.05"], capsys)
        assert code == 0 and err == ""
        assert out.splitlines()[0] == "n,r,g2,delta"

    def test_usage_error(self, capsys):
        code, _, err = run_cli(["tunnel", "--no-such-flag"], capsys)
        assert code == 2
        assert "error_code:2" in err

    def test_domain_error_names_constraint(self, capsys):
        code, _, err = run_cli(["tunnel", "--gamma1", "-1"], capsys)
        assert code == 3
        assert "error_code:3" in err and "gamma1 >= 0" in err

    def test_scenario_parse_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{broken")
        code, _, err = run_cli(["network", str(bad)], capsys)
        assert code == 2 and "error_code:2" in err

    def test_accuracy_error(self, tmp_path, capsys):
        doc = {"version": 1, "kind": "network",
               "params": {"energies": [0.0, 0.0], "decays": [0.0, 0.0],
                          "couplings": [[0.0, 2.0], [2.0, 0.0]],
                          "horizon": 10.0, "dt": 0.5}}
        path = tmp_path / "coarse.json"
        path.write_text(json.dumps(doc))
        code, _, err = run_cli(["network", str(path)], capsys)
        assert code == 4 and "error_code:4" in err

    def test_network_rejects_other_kinds(self, tmp_path, capsys):
        path = tmp_path / "tunnel.json"
        path.write_text(json.dumps({"version": 1, "kind": "tunnel"}))
        code, _, err = run_cli(["network", str(path)], capsys)
        assert code == 3 and "network scenarios only" in err

    def test_validation_error_in_scenario_file(self, tmp_path, capsys):
        doc = {"version": 1, "kind": "network",
               "params": {"energies": [0.0], "decays": [-1.0],
                          "couplings": [[0.0]]}}
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc))
        code, _, err = run_cli(["network", str(path)], capsys)
        assert code == 3 and "error_code:3" in err


class TestSubcommands:
    def test_coboson_uniform(self, capsys):
        code, out, _ = run_cli(["coboson", "--uniform", "10",
                                "--n-min", "3", "--n-max", "3"], capsys)
        assert code == 0
        header, row = out.splitlines()
        assert header == "n,chi_ratio,lower,upper,fragment_norm"
        fields = row.split(",")
        assert fields[0] == "3"
        assert float(fields[1]) == pytest.approx(0.7, rel=1e-12)

    def test_coboson_weights(self, capsys):
        code, out, _ = run_cli(["coboson", "--weights", "0.5,0.3,0.2",
                                "--n-min", "2", "--n-max", "2"], capsys)
        assert code == 0
        assert float(out.splitlines()[1].split(",")[1]) == pytest.approx(
            0.18 / 0.62, rel=1e-12)

    def test_coboson_spectrum_file(self, tmp_path, capsys):
        path = tmp_path / "w.txt"
        path.write_text("0.25\n0.25\n0.25\n0.25\n")
        code, out, _ = run_cli(["coboson", "--spectrum-file", str(path),
                                "--n-min", "2", "--n-max", "2"], capsys)
        assert code == 0
        assert float(out.splitlines()[1].split(",")[1]) == pytest.approx(0.5)

    def test_tunnel_sweep(self, capsys):
        code, out, _ = run_cli(["tunnel", "--t-max", "1", "--dt", "0.5",
                                "--sweep", "v=0.5:1.0:2"], capsys)
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "v,t,p11,p12,delta_p,norm"
        assert len(lines) == 1 + 2 * 3

    def test_ep_scan(self, capsys):
        code, out, _ = run_cli(["ep-scan", "--v-grid", "0.05:0.45:3",
                                "--gamma-grid", "0.5:1.0:2"], capsys)
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "v,gamma_diff,abs_omega_sq,regime,coalescence"
        row = lines[1].split(",")
        assert row[3] in ("coherent", "incoherent", "exceptional")

    def test_branching_single_point(self, capsys):
        code, out, _ = run_cli(["branching", "--omega0", "0.5", "--v", "1",
                                "--delta1", "0.1", "--delta2", "0.1"], capsys)
        assert code == 0
        header, row = out.splitlines()
        assert header == "delta1,delta2,omega0,v,f2_closed,f2_time,f2_spectral"
        vals = [float(x) for x in row.split(",")]
        assert vals[4] == pytest.approx(0.469484, abs=1e-6)
        assert abs(vals[4] - vals[5]) < 1e-6

    def test_branching_sweep_limit(self, capsys):
        code, _, err = run_cli(["branching", "--sweep", "delta1=0.1:0.2:2",
                                "--sweep", "delta2=0.1:0.2:2",
                                "--sweep", "v=1:2:2"], capsys)
        assert code == 3 and "at most two" in err

    def test_preset_to_file(self, tmp_path, capsys):
        out_path = tmp_path / "fig1.csv"
        code, out, _ = run_cli(["preset", "fig1", "--out", str(out_path)],
                               capsys)
        assert code == 0 and out == ""
        assert out_path.read_text().splitlines()[0] == "n,r,g2,delta"

    def test_network_stdout_has_two_blocks(self, tmp_path, capsys):
        doc = {"version": 1, "kind": "network",
               "params": {"energies": [0.0, 0.0], "decays": [0.1, 0.3],
                          "couplings": [[0.0, 1.0], [1.0, 0.0]],
                          "horizon": 5.0, "dt": 0.01}}
        path = tmp_path / "net.json"
        path.write_text(json.dumps(doc))
        code, out, _ = run_cli(["network", str(path)], capsys)
        assert code == 0
        blocks = out.split("\n\n")
        assert len(blocks) == 2
        assert blocks[0].splitlines()[0] == "t,p_1,p_2,norm"
        assert blocks[1].splitlines()[0] == "site,fraction"

    def test_json_format(self, capsys):
        code, out, _ = run_cli(["qdot", "--n-min", "2", "--n-max", "2",
                                "--r", "0.05", "--format", "json"], capsys)
        assert code == 0
        doc = json.loads(out)
        assert doc["columns"] == ["n", "r", "g2", "delta"]
        assert doc["metadata"]["backend"] in ("python", "compiled")

    def test_selftest_passes(self, capsys):
        code, out, _ = run_cli(["selftest", "--seed", "7"], capsys)
        assert code == 0
        lines = out.splitlines()
        assert len(lines) == 6 and all(l.startswith("PASS") for l in lines)

    def test_version(self, capsys):
        assert run_cli(["--version"], capsys)[0] == 0


class TestDeterminism:
    def test_identical_argv_identical_bytes(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert cli.main(["preset", "fig2b", "--out", str(a)]) == 0
        assert cli.main(["preset", "fig2b", "--out", str(b)]) == 0
        capsys.readouterr()
        assert a.read_bytes() == b.read_bytes()

    def test_thread_count_does_not_change_bytes(self, tmp_path, capsys):
        a, b = tmp_path / "t1.csv", tmp_path / "t8.csv"
        assert cli.main(["preset", "fig1", "--out", str(a),
                         "--threads", "1"]) == 0
        assert cli.main(["preset", "fig1", "--out", str(b),
                         "--threads", "8"]) == 0
        capsys.readouterr()
        assert a.read_bytes() == b.read_bytes()

    def test_env_thread_override(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("COBOSON_THREADS", "4")
        out = tmp_path / "env.csv"
        assert cli.main(["preset", "fig1", "--out", str(out)]) == 0
        capsys.readouterr()
        ref = tmp_path / "ref.csv"
        monkeypatch.delenv("COBOSON_THREADS")
        assert cli.main(["preset", "fig1", "--out", str(ref)]) == 0
        capsys.readouterr()
        assert out.read_bytes() == ref.read_bytes()


def test_installed_entry_point_runs():
    proc = subprocess.run([sys.executable, "-m", "coboson.cli", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
