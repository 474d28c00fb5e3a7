"""Tests for the command-line interface.

Golden outputs are asserted byte-for-byte: the CSV/JSON emitters promise
shortest round-trip float formatting and fixed key order, so any textual
drift is a reproducibility regression, not cosmetics.  Frozen numeric
cells come from the oracle-validated kernels (see the module tests).
"""

from __future__ import annotations

import io
import json
import contextlib
import math
import subprocess
import sys

import pytest

from gammatail import CertificationError, WitnessSearchError
from gammatail.cli import build_parser, main


def run_cli(argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(argv)
    return code, buf.getvalue()


# ----------------------------------------------------------------------
# eval
# ----------------------------------------------------------------------


def test_eval_plateau_golden_csv():
    code, out = run_cli(["eval", "--a", "0.3", "--c", "-0.5"])
    assert code == 0
    assert out == "a,c,p,method,err_bound\n0.3,-0.5,1.0,plateau,0.0\n"


def test_eval_golden_json():
    code, out = run_cli(["eval", "--a", "2", "--c", "-0.5", "--json"])
    assert code == 0
    assert out == (
        "{\n"
        '  "a": 2.0,\n'
        '  "c": -0.5,\n'
        '  "p": 0.5578254003710748,\n'
        '  "method": "series-complement",\n'
        '  "err_bound": 7.421975449741691e-15\n'
        "}\n"
    )


def test_eval_hidden_oracle_flag_appends_columns():
    code, out = run_cli(["eval", "--a", "2", "--c", "-0.5", "--use-oracle"])
    assert code == 0
    header, row = out.splitlines()
    assert header == "a,c,p,method,err_bound,oracle,diff"
    cells = row.split(",")
    assert float(cells[6]) <= float(cells[4]) + 1e-13 * float(cells[5])
    # the flag is hidden: it must not appear in --help output
    help_text = build_parser().parse_args(["eval", "--a", "1", "--c", "0"])
    assert hasattr(help_text, "use_oracle")


def test_eval_rejects_bad_arguments():
    code, _ = run_cli(["eval", "--a", "-1", "--c", "0"])
    assert code == 2
    code, _ = run_cli(["eval", "--a", "1"])
    assert code == 2  # missing required --c


# ----------------------------------------------------------------------
# scan
# ----------------------------------------------------------------------


def test_scan_golden_csv_first_delta_empty():
    code, out = run_cli(["scan", "--c", "0", "--a-min", "1", "--a-max", "4", "--n", "3"])
    assert code == 0
    assert out == (
        "a,p,delta,err_bound\n"
        "1.0,0.3678794411714422,,1.0088014610017906e-14\n"
        "2.0,0.4060058497098382,0.038126408538395995,1.0650758463759561e-14\n"
        "4.0,0.4334701203667093,0.02746427065687107,1.1537981637393601e-14\n"
    )


def test_scan_json_matches_csv_fields():
    args = ["scan", "--c", "0", "--a-min", "1", "--a-max", "4", "--n", "3"]
    _, csv_out = run_cli(args)
    _, json_out = run_cli(args + ["--json"])
    rows = json.loads(json_out)
    assert rows[0]["delta"] is None
    csv_rows = [line.split(",") for line in csv_out.splitlines()[1:]]
    for row, csv_row in zip(rows, csv_rows):
        assert repr(row["a"]) == csv_row[0]
        assert repr(row["p"]) == csv_row[1]
        assert repr(row["err_bound"]) == csv_row[3]


def test_scan_default_start_avoids_plateau():
    # for c < 0 the default a_min is -c + 0.01, keeping Q < 1
    code, out = run_cli(["scan", "--c", "-0.5", "--n", "3", "--a-max", "2"])
    assert code == 0
    first = out.splitlines()[1].split(",")
    assert float(first[0]) == 0.51
    assert float(first[1]) < 1.0


# ----------------------------------------------------------------------
# certify
# ----------------------------------------------------------------------


def test_certify_golden_json_non_monotone():
    code, out = run_cli(
        ["certify", "--c", "-0.2", "--a-min", "0.21", "--a-max", "500", "--n", "200"]
    )
    assert code == 0
    payload = json.loads(out)
    assert list(payload) == [
        "direction", "c", "scan", "witness", "margin_ratio", "interval", "detail",
    ]
    assert payload["direction"] == "non_monotone"
    assert payload["witness"] == {
        "a1": 0.21,
        "a2": 0.47704552021187635,
        "a3": 500.0,
        "p1": 0.5854727938337183,
        "p2": 0.438479290113096,
        "p3": 0.4976211735322509,
    }
    assert payload["interval"] is None
    assert "refinement" in payload["detail"]


def test_certify_exit_codes_by_regime():
    code, out = run_cli(["certify", "--c", "0", "--n", "60", "--a-max", "100"])
    assert code == 0
    assert json.loads(out)["direction"] == "increasing"
    code, out = run_cli(
        ["certify", "--c", "-1", "--a-min", "1.01", "--n", "60", "--a-max", "100"]
    )
    assert code == 0
    assert json.loads(out)["direction"] == "decreasing"


def test_certify_inconclusive_exits_three():
    # an unreachable margin forces the honest inconclusive verdict
    code, out = run_cli(
        ["certify", "--c", "0", "--a-min", "1", "--a-max", "2", "--n", "12",
         "--strict-margin", "1e15"]
    )
    assert code == 3
    assert json.loads(out)["direction"] == "inconclusive"


def test_certify_plateau_scan_is_usage_error():
    code, _ = run_cli(["certify", "--c", "-0.5", "--a-min", "0.3"])
    assert code == 2


def test_certify_threads_flag_is_byte_deterministic():
    base = ["certify", "--c", "-0.2", "--a-min", "0.21", "--a-max", "500", "--n", "120"]
    _, single = run_cli(base + ["--threads", "1"])
    _, pooled = run_cli(base + ["--threads", "4"])
    assert single == pooled


# ----------------------------------------------------------------------
# median / means
# ----------------------------------------------------------------------


def test_median_golden_single_shape():
    code, out = run_cli(["median", "--a", "1"])
    assert code == 0
    assert out == (
        "a,median,offset,residual\n"
        "1.0,0.6931471805599453,-0.3068528194400547,0.0\n"
    )


def test_median_grid_rows_stay_inside_bracket():
    code, out = run_cli(["median", "--a-min", "0.5", "--a-max", "50", "--n", "5"])
    assert code == 0
    lines = out.splitlines()[1:]
    assert len(lines) == 5
    for line in lines:
        a, med, offset, resid = map(float, line.split(","))
        assert -1.0 / 3.0 < offset < 0.0
        assert resid <= 1e-12
        assert math.isclose(med, a + offset, rel_tol=1e-12)


def test_median_requires_shape_or_grid():
    code, _ = run_cli(["median"])
    assert code == 2
    code, _ = run_cli(["median", "--a", "-3"])
    assert code == 2


def test_means_golden_and_degenerate_pair():
    code, out = run_cli(["means", "--x", "1", "--y", "4"])
    assert code == 0
    assert out == (
        "x,y,geo,log_mean,refined_mean,arith,chain_ok\n"
        "1.0,4.0,2.0,2.1640425613334453,2.1708011270346415,2.5,true\n"
    )
    code, _ = run_cli(["means", "--x", "1", "--y", "1"])
    assert code == 2


# ----------------------------------------------------------------------
# verify-all
# ----------------------------------------------------------------------


def test_verify_all_subset_text_output():
    code, out = run_cli(["verify-all", "--criteria", "c05,C13"])
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("C05 PASS")
    assert lines[1].startswith("C13 PASS")
    assert lines[-1] == "ALL PASS"


def test_verify_all_json_shape():
    code, out = run_cli(["verify-all", "--criteria", "C07", "--json"])
    assert code == 0
    payload = json.loads(out)
    assert payload["all_pass"] is True
    (entry,) = payload["criteria"]
    assert entry["cid"] == "C07"
    assert entry["passed"] is True
    assert entry["detail"]


def test_verify_all_corrupt_exits_one_and_names_failure():
    code, out = run_cli(["verify-all", "--criteria", "C01", "--corrupt"])
    assert code == 1
    assert "C01 FAIL" in out
    assert out.strip().endswith("FAIL: C01")


def test_verify_all_unknown_criterion_is_usage_error():
    code, _ = run_cli(["verify-all", "--criteria", "C99"])
    assert code == 2


# ----------------------------------------------------------------------
# plumbing: --out, exit-code mapping, determinism, subprocess entry
# ----------------------------------------------------------------------


def test_out_flag_writes_identical_bytes(tmp_path):
    target = tmp_path / "rows.csv"
    args = ["scan", "--c", "0", "--a-min", "1", "--a-max", "4", "--n", "3"]
    _, stdout_text = run_cli(args)
    code, silent = run_cli(args + ["--out", str(target)])
    assert code == 0
    assert silent == ""
    assert target.read_text() == stdout_text


def test_no_subcommand_and_help_exit_codes():
    code, _ = run_cli([])
    assert code == 2
    with contextlib.redirect_stdout(io.StringIO()):
        code = main(["--help"])
    assert code == 0


def test_certification_error_maps_to_exit_one(monkeypatch):
    def boom(*args, **kwargs):
        raise CertificationError("synthetic contradiction")

    monkeypatch.setattr("gammatail.cli.certify_monotone", boom)
    code, _ = run_cli(["certify", "--c", "0"])
    assert code == 1


def test_witness_search_error_maps_to_exit_three(monkeypatch):
    def boom(*args, **kwargs):
        raise WitnessSearchError("synthetic exhaustion", budget=1e6)

    monkeypatch.setattr("gammatail.cli.certify_monotone", boom)
    code, _ = run_cli(["certify", "--c", "-0.2"])
    assert code == 3


def test_repeated_invocations_are_byte_identical():
    args = ["median", "--a-min", "0.01", "--a-max", "100", "--n", "20"]
    _, first = run_cli(args)
    _, second = run_cli(args)
    assert first == second


def test_module_entry_point_runs_in_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "gammatail", "eval", "--a", "0.3", "--c", "-0.5"],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert proc.returncode == 0
    assert proc.stdout == "a,c,p,method,err_bound\n0.3,-0.5,1.0,plateau,0.0\n"
    bad = subprocess.run(
        [sys.executable, "-m", "gammatail", "means", "--x", "2", "--y", "1"],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert bad.returncode == 2
    assert "error" in bad.stderr.lower()
