"""CLI behavior: subcommands, exit codes, report schema, determinism."""

import json
import subprocess
import sys

import numpy as np
import pytest

from l1rec.cli import REPORT_KEYS, run



def run_cli(args, capsys):
    code = run(args)
    out = capsys.readouterr().out
    return code, out


def run_json(args, capsys):
    code, out = run_cli(args, capsys)
    return code, json.loads(out)


class TestRip:
    def test_sufficient_case(self, capsys):
        code, report = run_json(
            ["rip", "--N", "11", "--n", "1", "--k", "1", "--no-timestamp"], capsys
        )
        assert code == 0
        assert report["delta"] == pytest.approx(4.0 / 13.0)
        assert report["sufficient"] is True

    def test_bruteforce(self, capsys):
        code, report = run_json(
            ["rip", "--N", "9", "--n", "1", "--k", "2", "--bruteforce", "--no-timestamp"],
            capsys,
        )
        assert code == 0
        assert report["delta_bruteforce"] <= report["delta"] + 1e-10

    def test_schema_keys(self, capsys):
        _, report = run_json(
            ["rip", "--N", "5", "--n", "1", "--k", "0", "--no-timestamp"], capsys
        )
        for key in REPORT_KEYS:
            assert key in report
        assert "input_hash" in report


class TestApprox:
    def test_absx_degree2(self, capsys):
        code, report = run_json(
            ["approx", "--fn", "abs(x)", "--degree", "2", "--no-timestamp"], capsys
        )
        assert code == 0
        # the 3-node interpolant sqrt(2)x^2 (error 0.2761) is not optimal: its
        # residual only touches zero at x=0; the optimum interpolates at the
        # four U_4 roots with error (sqrt(5)-2)/2
        assert report["l1_error"] == pytest.approx((np.sqrt(5.0) - 2.0) / 2.0, abs=1e-9)
        assert report["path"] == "interpolant_shortcut"

    def test_errdata(self, capsys, tmp_path):
        err = tmp_path / "resid.csv"
        code, _ = run_cli(
            [
                "approx", "--fn", "abs(x)", "--degree", "2",
                "--errdata", str(err), "--no-timestamp",
            ],
            capsys,
        )
        assert code == 0
        lines = err.read_text().splitlines()
        assert lines[0] == "x,residual"
        assert len(lines) == 2002
        first = lines[1].split(",")
        assert float(first[0]) == -1.0

    def test_parse_error_exit2(self, capsys):
        code = run(["approx", "--fn", "abs(x", "--degree", "2", "--no-timestamp"])
        assert code == 2

    def test_samples_file_rejected(self, capsys, tmp_path):
        path = tmp_path / "samples.csv"
        path.write_text("x,f\n0.0,1.0\n")
        code = run(["approx", "--fn", str(path), "--degree", "2", "--no-timestamp"])
        assert code == 2


class TestRecover:
    def test_corrupted_t5(self, capsys):
        code, report = run_json(
            ["recover", "--fn", "corrupted_t5", "--degree", "5", "--no-timestamp"],
            capsys,
        )
        assert code == 0
        assert report["exact"] is True
        assert report["k"] > 0
        t5 = np.zeros(6)
        t5[5] = 1.0
        from l1rec.chebyshev import first_to_second

        expect = first_to_second(t5)
        got = np.array(report["coefficients"])
        assert got == pytest.approx(expect, abs=1e-10)

    def test_samples_csv(self, capsys, tmp_path):
        from l1rec.chebyshev import build_grid

        g = build_grid(40)
        vals = g.points**3 - 0.2
        vals[11] -= 4.0
        rows = ["x,f"] + [f"{float(x)!r},{float(v)!r}" for x, v in zip(g.points, vals)]
        path = tmp_path / "s.csv"
        path.write_text("\n".join(rows) + "\n")
        code, report = run_json(
            ["recover", "--fn", str(path), "--degree", "3", "--no-timestamp"], capsys
        )
        assert code == 0
        assert report["exact"] is True
        assert report["corrupted_indices"] == [11]

    def test_bad_sample_grid_exit2(self, capsys, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("x,f\n-0.5,1.0\n0.0,1.0\n0.5,1.0\n")
        code = run(["recover", "--fn", str(path), "--degree", "1", "--no-timestamp"])
        assert code == 2

    def test_sweep(self, capsys):
        code, report = run_json(
            [
                "recover", "--fn", "corrupted_t5", "--degree", "0",
                "--sweep", "6", "--samples", "2000", "--no-timestamp",
            ],
            capsys,
        )
        assert code == 0
        assert report["sweep_found"] == 5
        assert [r["degree"] for r in report["runs"]] == [0, 1, 2, 3, 4, 5]


class TestDeterminism:
    def test_byte_identical_reports(self, tmp_path):
        args = [
            "recover", "--fn", "corrupted_t5", "--degree", "5",
            "--samples", "1200", "--no-timestamp",
        ]
        outs = []
        for name in ("a.json", "b.json"):
            path = tmp_path / name
            code = run(args + ["--out", str(path)])
            assert code == 0
            outs.append(path.read_bytes())
        assert outs[0] == outs[1]

    def test_all_numbers_finite(self, capsys):
        _, report = run_json(
            ["approx", "--fn", "expsin10", "--degree", "4", "--no-timestamp"], capsys
        )

        def walk(v):
            if isinstance(v, dict):
                for x in v.values():
                    walk(x)
            elif isinstance(v, list):
                for x in v:
                    walk(x)
            elif isinstance(v, float):
                assert np.isfinite(v)

        walk(report)


class TestEntryPoint:
    def test_module_invocation(self):
        proc = subprocess.run(
            [sys.executable, "-m", "l1rec.cli", "rip", "--N", "10", "--n", "1",
             "--k", "1", "--no-timestamp"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        report = json.loads(proc.stdout)
        assert report["sufficient"] is False  # boundary case delta = 1/3
