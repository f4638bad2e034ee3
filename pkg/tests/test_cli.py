import csv
import io
import subprocess
import sys
from fractions import Fraction

import pytest

from zygqs.cli import COMMANDS, build_parser, main

from shared import SMOKE


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def table(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_smoke_set_covers_every_subcommand():
    assert set(SMOKE) == set(COMMANDS)


@pytest.mark.parametrize("command", sorted(SMOKE))
@pytest.mark.parametrize("fmt", ["csv", "svg"])
def test_subcommand_is_deterministic(tmp_path, command, fmt):
    outs = []
    for k in range(2):
        path = tmp_path / f"{k}.{fmt}"
        assert main([command, *SMOKE[command], "--format", fmt, "--out", str(path), "--assert"]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] and outs[0]
    if fmt == "csv":
        assert b"\r" not in outs[0] and outs[0].endswith(b"\n")
    else:
        assert outs[0].startswith(b"<svg") and b"<polyline" in outs[0]


def test_measure_audit_columns(capsys):
    code, out, _ = run_cli(capsys, "measure-audit", "--gamma", "1/2", "--depth", "4")
    rows = table(out)
    assert code == 0
    assert list(rows[0]) == ["depth", "delta_hat", "witness_I", "witness_J"]
    assert rows[0]["depth"] == "1" and rows[0]["delta_hat"] == "2"


def test_variation_rows(capsys):
    code, out, _ = run_cli(capsys, "variation", "--gamma", "1/2", "--q", "0.5", "--mmax", "4")
    rows = table(out)
    assert code == 0 and [r["m"] for r in rows] == ["1", "2", "3", "4"]
    for r in rows:
        assert Fraction(r["S_m"]) >= Fraction(r["maxint_m"]) / 4
    assert rows[0]["maxint_m"] == "1" and rows[1]["maxint_m"] == "9/8"


def test_variation_svg_has_one_polyline_per_gauge(capsys):
    _, out, _ = run_cli(capsys, "variation", "--q", "0.5,1.5", "--mmax", "3", "--format", "svg")
    assert out.count("<polyline") == 2


def test_graph_audit_straight_line(capsys):
    _, out, _ = run_cli(capsys, "graph-audit", "--gamma", "0", "--vscale", "0", "--depth", "4")
    row = table(out)[0]
    assert (float(row["H_hat"]), float(row["s_hat"]), float(row["K_hat"])) == (1, 0, 1)


def test_lipschitz_rows(capsys):
    _, out, _ = run_cli(capsys, "lipschitz-check", "--L", "2", "--slopes", "2")
    row = table(out)[0]
    assert row["re_fz"] == "5/2" and row["abs_fzbar_sq"] == "13/4"


def test_g_eval_example(capsys):
    _, out, _ = run_cli(capsys, "g-eval", "--x", "1/8")
    row = table(out)[0]
    assert row["x"] == "1/8" and row["mid"] == "1/16"


def test_assertion_failure_exits_1(capsys):
    code, _, err = run_cli(capsys, "growth-check", "--gamma-prime", "0.001", "--assert")
    assert code == 1 and "envelope violated" in err
    code, _, _ = run_cli(capsys, "growth-check", "--gamma-prime", "0.001")
    assert code == 0


@pytest.mark.parametrize("argv", [
    ["maxint", "--mmax", "9"],
    ["maxint", "--mmax", "7"],
    ["variation", "--q", "0,1"],
    ["graph-audit", "--depth", "7"],
    ["graph-audit", "--vscale", "-1"],
    ["trace-check", "--a", "1", "--b", "0"],
    ["trace-check", "--a", "0", "--b", "4096"],
    ["lipschitz-check", "--L", "1", "--slopes", "2"],
    ["lipschitz-check", "--L", "0"],
    ["growth-check", "--gamma-prime", "1.5"],
    ["measure-audit", "--depth", "0"],
    ["seminorm", "--budget", "3"],
    ["halfplane-audit", "--depth", "9"],
])
def test_config_errors_exit_2(capsys, argv):
    code, out, err = run_cli(capsys, *argv)
    assert code == 2 and out == "" and "--" in err


@pytest.mark.parametrize("argv", [
    ["measure-audit", "--gamma", "1"],
    ["measure-audit", "--gamma", "x"],
    ["trace-check", "--a", "1/3"],
    ["graph-audit", "--window", "2,-1"],
    ["nope"],
])
def test_parse_errors_exit_2(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_help_lists_every_subcommand():
    text = build_parser().format_help()
    for name in COMMANDS:
        assert name in text


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "zygqs", "maxint", "--mmax", "2"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout == "m,maxint_m\n1,1\n2,9/8\n"
