"""Verification suite behavior and the command-line contract."""

import json
import math
import os

import numpy as np
import pytest

import sphwave.wigner
from sphwave import cli
from sphwave.checks import run_verify
from sphwave.model import load_realization


class TestVerifySuite:
    def test_fast_level_passes(self):
        manifest = run_verify("fast")
        assert manifest.passed
        names = [c.name for c in manifest.checks]
        assert len(names) == len(set(names))
        for required in (
            "addition_formula",
            "duplication_formula",
            "orthonormality",
            "legendre_sq_integral",
            "cg_unitarity",
            "cg_diag_unitarity",
            "threej_cg_roundtrip",
        ):
            assert required in names

    def test_full_level_passes(self):
        manifest = run_verify("full")
        assert manifest.passed
        names = [c.name for c in manifest.checks]
        assert "high_degree_stability" in names
        assert "quartic_asymptotic_trend" in names

    def test_manifest_json_shape(self):
        manifest = run_verify("fast")
        d = manifest.to_json_dict()
        assert d["level"] == "fast"
        assert d["passed"] is True
        assert {"name", "passed", "measured", "tolerance", "detail"} <= set(d["checks"][0])

    def test_fault_injection_names_unitarity(self, monkeypatch):
        # flipping one coefficient's sign must trip the unitarity cross sums
        orig = sphwave.wigner.clebsch_gordan

        def corrupted(l1, m1, l2, m2, l3, m3):
            val = orig(l1, m1, l2, m2, l3, m3)
            if (l1, m1, l2, m2, l3, m3) == (2, 0, 3, 1, 5, 1):
                return -val
            return val

        monkeypatch.setattr(sphwave.wigner, "clebsch_gordan", corrupted)
        manifest = run_verify("fast")
        assert not manifest.passed
        failing = [c.name for c in manifest.checks if not c.passed]
        assert "cg_unitarity" in failing


class TestCliCoefficients:
    def test_wigner3j_value(self, capsys):
        assert cli.main(["wigner3j", "1", "1", "2", "0", "0", "0"]) == 0
        out = capsys.readouterr().out.strip()
        assert float(out) == pytest.approx(math.sqrt(2.0 / 15.0), rel=1e-12)

    def test_wigner3j_odd_zero(self, capsys):
        assert cli.main(["wigner3j", "1", "1", "1", "0", "0", "0"]) == 0
        assert float(capsys.readouterr().out.strip()) == 0.0

    def test_cg_value_and_exact_form(self, capsys):
        assert cli.main(["cg", "1", "0", "1", "0", "0", "0", "--exact"]) == 0
        lines = capsys.readouterr().out.strip().split("\n")
        assert float(lines[0]) == pytest.approx(-1.0 / math.sqrt(3.0), rel=1e-12)
        assert "sqrt" in lines[1]

    def test_legendre_value(self, capsys):
        assert cli.main(["legendre", "2", "0.5"]) == 0
        assert float(capsys.readouterr().out.strip()) == -0.125

    def test_usage_error_exit_code(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["wigner3j", "1", "1"])
        assert exc.value.code == 2

    def test_domain_error_exit_code(self, capsys):
        assert cli.main(["legendre", "3", "1.5"]) == 2


class TestCliBounds:
    def test_functional_value(self, capsys):
        assert cli.main(["bounds", "--theorem", "functional", "--rate", "12.566370614359172"]) == 0
        lines = capsys.readouterr().out.strip().split("\n")
        value = float(lines[1].split(",")[7])
        assert value == pytest.approx(0.25 + 4 * math.sqrt(math.pi), rel=1e-10)

    def test_json_payload(self, capsys):
        assert cli.main(["bounds", "--theorem", "one_dim_wasserstein", "--ell", "10", "--rate", "100"]) == 0
        lines = capsys.readouterr().out.strip().split("\n")
        obj = json.loads(lines[-1])
        assert obj["theorem"] == "one_dim_wasserstein"
        assert obj["value"] > 0


class TestCliCumulants:
    def test_analytic_row(self, capsys):
        assert cli.main(["cumulants", "--ell", "1", "--rate", "1"]) == 0
        lines = capsys.readouterr().out.strip().split("\n")
        header = lines[0].split(",")
        row = lines[1].split(",")
        analytic = float(row[header.index("analytic_cum4")])
        assert analytic == pytest.approx(9.0 / (20.0 * math.pi), rel=1e-12)

    def test_mc_row_with_files(self, tmp_path, capsys):
        code = cli.main(
            [
                "cumulants", "--ell", "3", "--rate", "5", "--replicates", "2000",
                "--seed", "7", "--out", str(tmp_path),
            ]
        )
        assert code == 0
        csv_path = tmp_path / "cumulants.csv"
        man_path = tmp_path / "cumulants.json"
        assert csv_path.exists() and man_path.exists()
        manifest = json.loads(man_path.read_text())
        assert "config_sha256" in manifest and "csv_sha256" in manifest
        import hashlib

        assert manifest["csv_sha256"] == hashlib.sha256(csv_path.read_bytes()).hexdigest()


class TestCliSimulateAndSweep:
    def test_simulate_roundtrip(self, tmp_path, capsys):
        out = tmp_path / "real.txt"
        assert cli.main(["simulate", "--rate", "2.0", "--seed", "11", "--out", str(out)]) == 0
        header = json.loads(capsys.readouterr().out.strip())
        r = load_realization(out)
        assert r.count == header["count"]

    def test_simulate_io_error(self, tmp_path):
        target = tmp_path / "not_a_dir" / "real.txt"
        assert cli.main(["simulate", "--rate", "2.0", "--seed", "11", "--out", str(target)]) == 3

    def test_sweep_end_to_end_and_rerun_identical(self, tmp_path, capsys):
        cfg = {"ell": [4], "rate": [3.0, 12.0], "replicates": 2000, "seed": 5}
        cfg_path = tmp_path / "sweep.json"
        cfg_path.write_text(json.dumps(cfg))
        assert cli.main(["sweep", "--config", str(cfg_path), "--out", str(tmp_path / "a")]) == 0
        capsys.readouterr()
        assert cli.main(["sweep", "--config", str(cfg_path), "--out", str(tmp_path / "b")]) == 0
        a = (tmp_path / "a" / "sweep.csv").read_bytes()
        b = (tmp_path / "b" / "sweep.csv").read_bytes()
        assert a == b

    def test_sweep_missing_config(self, capsys):
        assert cli.main(["sweep", "--config", "/nonexistent/sweep.json"]) == 2

    def test_sweep_malformed_config(self, tmp_path, capsys):
        p = tmp_path / "bad.json"
        p.write_text("{\"ell\": [4]}")
        assert cli.main(["sweep", "--config", str(p)]) == 2


class TestCliVerify:
    def test_fast_verify_exit_zero(self, tmp_path, capsys):
        assert cli.main(["verify", "--level", "fast", "--out", str(tmp_path)]) == 0
        out = capsys.readouterr().out
        assert "PASS overall" in out
        manifest = json.loads((tmp_path / "verify_fast.json").read_text())
        assert manifest["passed"] is True

    def test_corrupted_build_exits_one(self, monkeypatch, capsys):
        orig = sphwave.wigner.clebsch_gordan

        def corrupted(l1, m1, l2, m2, l3, m3):
            val = orig(l1, m1, l2, m2, l3, m3)
            if (l1, m1, l2, m2, l3, m3) == (2, 0, 3, 1, 5, 1):
                return -val
            return val

        monkeypatch.setattr(sphwave.wigner, "clebsch_gordan", corrupted)
        assert cli.main(["verify", "--level", "fast"]) == 1
        captured = capsys.readouterr()
        assert "cg_unitarity" in captured.err
