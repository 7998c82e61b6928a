import subprocess
import sys
import xml.etree.ElementTree as ET
from pathlib import Path

import pytest

from lrdraw import cli
from lrdraw.layout import Layout, ValidationReport, validate
from lrdraw.tree import parse_tree, serialize_tree

DATA = Path(__file__).parent / "data"


def run(argv, capsys):
    code = cli.run([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_gen_then_width(tmp_path, capsys):
    f = tmp_path / "t.txt"
    assert run(["gen", "--family", "lower-bound", "--n", 1000, "--out", f], capsys)[0] == 0
    assert parse_tree(f.read_text()).n == 1000
    code, out, _ = run(["width", "--algo", "optimal", "--in", f], capsys)
    assert code == 0 and int(out) > 0


@pytest.mark.parametrize("family", cli.FAMILIES)
def test_gen_every_family(family, capsys):
    code, out, _ = run(["gen", "--family", family, "--n", 63, "--seed", 2], capsys)
    assert code == 0 and parse_tree(out).n == 63


def test_gen_family_params(capsys):
    code, out, _ = run(["gen", "--family", "lower-bound", "--n", 5000, "--c0", 8], capsys)
    assert code == 0 and parse_tree(out).n == 5000
    code, _, err = run(["gen", "--family", "lower-bound", "--n", 5000, "--mu", 0.3], capsys)
    assert code == 2 and "phi" in err


def test_draw_matches_golden_svg(tmp_path, capsys):
    out = tmp_path / "t.svg"
    code, _, _ = run(["draw", "--algo", "twist437", "--in", DATA / "tree40.txt", "--format", "svg", "--out", out],
                     capsys)
    assert code == 0
    text = out.read_text()
    assert text == (DATA / "tree40_twist437.svg").read_text()
    root = ET.fromstring(text.split("\n", 1)[1])
    assert root.tag.endswith("svg")


def test_draw_tsv_is_valid_layout(capsys):
    code, out, _ = run(["draw", "--algo", "baseline", "--in", DATA / "tree40.txt", "--format", "tsv"], capsys)
    assert code == 0
    rows = [line.split("\t") for line in out.splitlines()[1:]]
    tree = parse_tree((DATA / "tree40.txt").read_text())
    cols = [int(r[1]) for r in rows]
    ys = [int(r[2]) for r in rows]
    assert validate(tree, Layout(cols, ys, max(cols) + 1, max(ys) + 1)).ok


def test_draw_diagnostics(capsys):
    code, out, _ = run(["draw", "--algo", "twist438", "--in", DATA / "tree40.txt", "--format", "tsv",
                        "--diagnostics", "--n0", 4, "--h", 3, "--delta", 0.01], capsys)
    assert code == 0
    block = out.split("\n\n")[1]
    keys = dict(line.split("\t") for line in block.splitlines()[1:])
    assert {"width", "height", "fallbacks"} <= keys.keys()
    assert keys["height"] == "40"
    code, out, err = run(["draw", "--algo", "twist438", "--in", DATA / "tree40.txt", "--diagnostics"], capsys)
    assert out.startswith("<?xml") and err.startswith("key\tvalue")


def test_draw_refuses_invalid_layouts(monkeypatch, capsys):
    def broken(tree, layout):
        rep = ValidationReport()
        rep.results["planar"] = True
        rep.fail("planar", "injected")
        return rep

    monkeypatch.setattr(cli, "validate", broken)
    code, out, err = run(["draw", "--algo", "baseline", "--in", DATA / "tree40.txt"], capsys)
    assert code == 1 and out == "" and "injected" in err


def test_determinism(tmp_path, capsys):
    outs = []
    for k in range(2):
        f = tmp_path / f"b{k}.tsv"
        run(["bench", "--family", "bst", "--n-grid", "100:400:100", "--algo", "twist438", "--algo", "baseline",
             "--reps", 2, "--seed", 5, "--out", f], capsys)
        outs.append(f.read_bytes())
    assert outs[0] == outs[1]
    a = run(["gen", "--family", "random", "--n", 300, "--seed", 11], capsys)[1]
    assert a == run(["gen", "--family", "random", "--n", 300, "--seed", 11], capsys)[1]


def test_verify_checks(capsys):
    code, out, _ = run(["verify-lemma", "--which", "refined"], capsys)
    lams = [float(line.split("\t")[1]) for line in out.splitlines()[1:]]
    assert code == 0 and len(lams) == 8 and max(lams) < 1
    code, out, _ = run(["verify-lemma", "--which", "base"], capsys)
    assert code == 0 and "2.39506800" in out
    assert run(["verify-lemma", "--which", "exponent"], capsys)[0] == 0
    assert run(["verify-lemma", "--which", "family-params"], capsys)[0] == 0
    assert run(["verify-lemma", "--which", "holder", "--count", 2000], capsys)[0] == 0


def test_verify_reports_failures(capsys):
    # at p = 0.437 no mu satisfies the power constraint
    assert run(["verify-lemma", "--which", "family-params", "--p", 0.437], capsys)[0] == 1
    # below the threshold exponents the lambdas exceed 1
    assert run(["verify-lemma", "--which", "refined", "--p", 0.42], capsys)[0] == 1
    assert run(["verify-lemma", "--which", "base", "--p", 0.42], capsys)[0] == 1
    code, out, _ = run(["verify-lemma", "--which", "refined", "--gamma", 0.6], capsys)
    assert code == 1 and out.splitlines()[1].endswith("\t0") and out.splitlines()[3].endswith("\t1")


def test_oracle_exhaustive(capsys):
    code, out, _ = run(["oracle", "--n", 9, "--exhaustive", "--check"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "n\tworst_width\twitness_tree"
    assert [int(line.split("\t")[1]) for line in lines[1:]] == [1, 1, 2, 2, 2, 2, 3, 3, 3]
    assert parse_tree(lines[-1].split("\t")[2]).n == 9


def test_oracle_sampled(capsys):
    code, out, _ = run(["oracle", "--n", 6, "--samples", 50, "--seed", 1], capsys)
    ws = [int(line.split("\t")[1]) for line in out.splitlines()[1:]]
    assert code == 0 and ws == [1, 1, 2, 2, 2, 2]


def test_bench_columns_and_timing(capsys):
    code, out, _ = run(["bench", "--family", "lower-bound", "--n-grid", "1000:8000:x2", "--algo", "twist437",
                        "--timing"], capsys)
    lines = out.splitlines()
    assert code == 0
    assert lines[0].split("\t") == ["family", "n", "seed", "algo", "width", "height", "valid", "seconds"]
    assert [int(line.split("\t")[1]) for line in lines[1:]] == [1000, 2000, 4000, 8000]
    assert all(line.split("\t")[6] == "1" for line in lines[1:])


def test_bench_jobs_env(monkeypatch, capsys):
    monkeypatch.setenv("LRDRAW_JOBS", "2")
    code, out, _ = run(["bench", "--family", "complete", "--n-grid", "7:63:56", "--algo", "optimal"], capsys)
    assert code == 0
    assert [line.split("\t")[4] for line in out.splitlines()[1:]] == ["3", "6"]


def test_fit(tmp_path, capsys):
    f = tmp_path / "pts.tsv"
    f.write_text("n\twidth\n" + "".join(f"{n}\t{2 * n ** 0.5}\n" for n in range(1, 40)))
    code, out, _ = run(["fit", "--in", f], capsys)
    a, b, c = (float(x) for x in out.splitlines()[1].split("\t"))
    assert code == 0 and abs(b - 0.5) < 1e-6 and abs(a - 2) < 1e-6


@pytest.mark.parametrize(
    "argv",
    [
        ["gen", "--family", "random", "--n", 600],
        ["draw", "--algo", "optimal", "--in", "/nonexistent/tree.txt"],
        ["bench", "--family", "bst", "--n-grid", "10:5:1"],
        ["bench", "--family", "bst", "--n-grid", "10:20"],
        ["oracle", "--n", 20],
        ["fit", "--in", DATA / "tree40.txt"],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2
    assert err.startswith("lrdraw ") and len(err.strip().splitlines()) == 1


def test_malformed_tree_reports_offset(tmp_path, capsys):
    f = tmp_path / "bad.txt"
    f.write_text("((,),")
    code, _, err = run(["width", "--algo", "baseline", "--in", f], capsys)
    assert code == 2 and "offset" in err


@pytest.mark.parametrize("argv", [["frobnicate"], ["gen", "--n", "5"], ["gen", "--family", "random", "--n", "0"],
                                  ["draw", "--algo", "fancy", "--in", "x"]])
def test_parser_rejects_bad_flags(argv):
    with pytest.raises(SystemExit) as exc:
        cli.run(argv)
    assert exc.value.code == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "lrdraw", "gen", "--family", "complete", "--n", "7"],
                         capture_output=True, text=True, check=True)
    assert res.stdout.strip() == serialize_tree(parse_tree("(((,),(,)),((,),(,)))"))
