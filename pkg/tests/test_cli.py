import csv
import io
import json
import subprocess
import sys

import pytest

from sspengine import cli
from sspengine.checks import Check, CheckOutcome, RunConfig
from sspengine.equivcheck import EnumerationBoundError
from sspengine.game import GameError
from sspengine.schemes import SchemeError


def run_main(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_json_report(capsys):
    code, out, _ = run_main(capsys, "--suite", "gap-demo", "--format", "json")
    report = json.loads(out)
    assert code == 0
    assert report["schema_version"] == 1 and report["suite"] == "gap-demo"
    rows = {r["name"]: r for r in report["checks"]}
    assert rows["primitive-forger-advantage"]["value"] == "1/1"
    assert rows["seuf-replayer-win"]["value"] == "0/1"
    assert "get_pk() -> Ok(0)" in rows["primitive-gap-counterexample"]["counterexample"]
    assert all(r["status"] == "pass" for r in report["checks"])


def test_csv_report(capsys):
    code, out, _ = run_main(capsys, "--suite", "rsa", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert list(rows[0]) == cli.COLUMNS
    assert [r["name"] for r in rows][0] == "rsa-functional-correctness"


def test_documented_examples(capsys):
    code, out, _ = run_main(capsys, "--suite", "sigproto", "--msg-size", "3", "--depth", "3", "--format", "json")
    row = next(r for r in json.loads(out)["checks"] if r["name"] == "theorem-1-perfect-ind")
    assert code == 0 and row["status"] == "pass" and row["value"] == "0/1"
    code, out, _ = run_main(capsys, "--suite", "rsa", "--rsa-n", "0", "--format", "json")
    row = next(r for r in json.loads(out)["checks"] if r["name"] == "rsa-functional-correctness")
    assert code == 0 and row["status"] == "pass"


def test_text_report(capsys):
    code, out, _ = run_main(capsys, "--suite", "sigproto")
    assert code == 0
    assert out.startswith("suite: sigproto")
    assert "theorem-1-perfect-ind" in out


def test_output_file(tmp_path, capsys):
    target = tmp_path / "report.json"
    code, out, _ = run_main(capsys, "--suite", "gap-demo", "--format", "json", "--output", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["suite"] == "gap-demo"


def test_unwritable_output(tmp_path, capsys):
    code, _, err = run_main(capsys, "--suite", "gap-demo", "--output", str(tmp_path / "missing" / "r.txt"))
    assert code == 2 and "cannot write" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["--depth", "9"],
        ["--depth", "0"],
        ["--msg-size", "1"],
        ["--msg-size", "20"],
        ["--state-size", "5", "--challenge-size", "5"],
        ["--state-size", "0"],
        ["--rsa-n", "40"],
        ["--rsa-n", "7"],
    ],
)
def test_guard_rails(capsys, argv):
    code, out, err = run_main(capsys, "--suite", "gap-demo", *argv)
    assert code == 2 and out == "" and "error" in err


@pytest.mark.parametrize("suite", ["sigproto", "all"])
@pytest.mark.parametrize("argv", [["--msg-size", "8", "--depth", "4"], ["--msg-size", "7", "--depth", "3"]])
def test_signature_work_bound(capsys, suite, argv):
    code, out, err = run_main(capsys, "--suite", suite, *argv)
    assert code == 2 and out == "" and "transcript nodes" in err


def test_work_bound_only_applies_to_signature_suites(capsys):
    code, _, _ = run_main(capsys, "--suite", "gap-demo", "--msg-size", "8", "--depth", "4")
    assert code == 0


def test_negative_rsa_n(capsys):
    code, out, err = run_main(capsys, "--suite", "gap-demo", "--rsa-n", "-1")
    assert code == 2 and out == "" and "error" in err


@pytest.mark.parametrize(
    "exc",
    [EnumerationBoundError("too many strategy nodes"), SchemeError("empty key space"), GameError("bad query")],
)
def test_structural_errors_exit_2(monkeypatch, capsys, exc):
    def boom(cfg):
        raise exc

    monkeypatch.setattr(cli, "checks_for", lambda suite: [Check("boom", "demo", boom)])
    code, out, err = run_main(capsys, "--suite", "gap-demo")
    assert code == 2 and out == "" and str(exc) in err


def test_failing_check_exits_1(monkeypatch, capsys):
    bad = Check("always-fails", "demo", lambda cfg: CheckOutcome("fail", 1, "nope"))
    monkeypatch.setattr(cli, "checks_for", lambda suite: [bad])
    code, out, _ = run_main(capsys, "--suite", "gap-demo", "--format", "json")
    assert code == 1
    assert json.loads(out)["checks"][0]["counterexample"] == "nope"


def test_deterministic_and_thread_order(monkeypatch):
    cfg = RunConfig(suite="gap-demo")
    strip = lambda rep: [{k: v for k, v in r.items() if k != "elapsed_ms"} for r in rep["checks"]]
    first, _ = cli.run(cfg)
    monkeypatch.setenv("SSP_ENGINE_THREADS", "4")
    second, _ = cli.run(cfg)
    assert strip(first) == strip(second)


def test_bad_thread_count(monkeypatch, capsys):
    monkeypatch.setenv("SSP_ENGINE_THREADS", "many")
    code, _, err = run_main(capsys, "--suite", "gap-demo")
    assert code == 2 and "SSP_ENGINE_THREADS" in err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "sspengine", "--suite", "gap-demo", "--format", "csv"],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == ",".join(cli.COLUMNS)
