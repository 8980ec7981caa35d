import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from rank2sep.cli import main
from rank2sep.formats import Report

DATA = Path(__file__).parent / "data"


def run(argv, capsys, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.TextIOWrapper(io.BytesIO(stdin.encode())))
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_check_corollary_golden(capsys):
    code, out, _ = run(["check", str(DATA / "bell_mixture_p25.state")], capsys)
    assert code == 1
    assert out.splitlines()[0] == "ENTANGLED (corollary fast path: p=0.25 < 1/2)"
    assert "PPT holds: False" in out


def test_check_quiet_prints_headline_only(capsys):
    code, out, _ = run(["check", "--quiet", str(DATA / "bell_mixture_p25.state")], capsys)
    assert code == 1
    assert out == "ENTANGLED (corollary fast path: p=0.25 < 1/2)\n"


def test_decompose_classical_mixture(capsys):
    code, out, _ = run(["decompose", str(DATA / "classical_mix.state")], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("SEPARABLE")
    terms = [line for line in lines if line.strip().startswith("[")]
    assert len(terms) == 2
    assert all("weight 0.5 " in line for line in terms)
    assert {line[line.index("u ="):] for line in terms} == {"u = (1, 0)  v = (1, 0)", "u = (0, 1)  v = (0, 1)"}


def test_concurrence_bell(capsys):
    code, out, _ = run(["concurrence", str(DATA / "bell.state")], capsys)
    assert code == 0
    assert out.splitlines()[:3] == ["C_2 = 1", "I_0 = 1", "I_1 = 0.5"]


def test_concurrence_machine_readable(capsys):
    code, out, _ = run(["concurrence", "--format", "machine-readable", str(DATA / "bell.state")], capsys)
    data = json.loads(out)
    assert code == 0
    assert data["concurrence"] == pytest.approx(1, abs=1e-12)
    assert data["invariants"] == pytest.approx([1, 0.5], abs=1e-12)


def test_ppt_subcommand(capsys):
    code, out, _ = run(["ppt", str(DATA / "bell_mixture_p25.state")], capsys)
    assert code == 1 and "VIOLATED" in out
    code, out, _ = run(["ppt", str(DATA / "classical_mix.state")], capsys)
    assert code == 0 and "holds" in out


def test_machine_readable_report_round_trips(capsys):
    code, out, _ = run(["check", "--format", "machine-readable", str(DATA / "classical_mix.state")], capsys)
    assert code == 0
    report = Report.from_json(out)
    assert report.separable and report.branch == "BothEigenvectorsProduct"
    assert report.oracle["agreement"] == "Consistent"
    assert report.oracle["reconstruction_error"] < 1e-12
    assert len(report.input_sha256) == 64


@pytest.mark.parametrize(
    "argv",
    [
        ["check", "/nonexistent/file.state"],
        ["check", str(DATA / "short_trace.state")],
        ["concurrence", str(DATA / "classical_mix.state")],
        ["generate", "--kind", "generic", "--n", "2", "--p", "1.5", "--seed", "1"],
    ],
)
def test_errors_exit_two(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2
    assert err.startswith("rank2sep: error:")


def test_usage_error_exits_two(capsys):
    with pytest.raises(SystemExit) as info:
        main(["check"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2


def test_trace_deficit_message(capsys):
    _, _, err = run(["check", str(DATA / "short_trace.state")], capsys)
    assert "trace deficit 0.1" in err


@pytest.mark.parametrize("kind, expected", [("product-mixture", 0), ("corollary", 1)])
def test_generate_then_check_via_stdin(kind, expected, capsys, monkeypatch):
    code, text, _ = run(["generate", "--kind", kind, "--n", "3", "--p", "0.3", "--seed", "11"], capsys)
    assert code == 0
    assert json.loads(text)["provenance"]["seed"] == 11
    code, out, _ = run(["check", "--quiet", "-"], capsys, stdin=text, monkeypatch=monkeypatch)
    assert code == expected


def test_generate_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.state", tmp_path / "b.state"
    for path in (a, b):
        assert main(["generate", "--kind", "generic", "--n", "2", "--p", "0.4", "--seed", "5", "-o", str(path)]) == 0
    assert a.read_text() == b.read_text()


def test_selftest_small(capsys):
    code, out, _ = run(["selftest", "--trials", "5", "--seed", "3"], capsys)
    assert code == 0
    assert out.splitlines()[-1].endswith(", 0 failed")
    assert "Philox" in out.splitlines()[0]


def test_console_script_pipeline():
    gen = subprocess.run(
        [sys.executable, "-m", "rank2sep.cli", "generate", "--kind", "product-mixture", "--n", "2", "--p", "0.4",
         "--seed", "1"],
        capture_output=True, text=True, check=True,
    )
    chk = subprocess.run([sys.executable, "-m", "rank2sep.cli", "check", "-"], input=gen.stdout,
                         capture_output=True, text=True)
    assert chk.returncode == 0
    assert chk.stdout.startswith("SEPARABLE")
