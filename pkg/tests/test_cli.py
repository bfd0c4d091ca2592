"""CLI contract tests: flags, exit codes, and output formats."""

import subprocess
import sys

import pytest

from csdcsim import cli
from csdcsim.protocol import InternalError, Session
from csdcsim.transcript import parse_transcript

RUN = [sys.executable, "-m", "csdcsim.cli"]


def invoke(*args, **kwargs):
    return subprocess.run(
        RUN + list(args), capture_output=True, text=True, timeout=120, **kwargs
    )


def stats_dict(text):
    pairs = [line.split("\t") for line in text.strip().splitlines()]
    return {key: value for key, value in pairs}


# --- run mode -----------------------------------------------------------


def test_run_reports_stats_and_exits_zero():
    proc = invoke("--mode", "run", "--triplets", "8", "--message", "0001", "--seed", "42")
    assert proc.returncode == 0
    stats = stats_dict(proc.stdout)
    assert stats == {
        "decoded": "0001",
        "match": "true",
        "checked_triplets": "4",
        "violations": "0",
    }


def test_run_is_byte_deterministic(tmp_path):
    paths = [tmp_path / "a.tsv", tmp_path / "b.tsv"]
    for path in paths:
        proc = invoke(
            "--mode", "run", "--triplets", "12", "--message", "000111",
            "--seed", "9", "--transcript", str(path),
        )
        assert proc.returncode == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_transcript_goes_to_stdout_with_dash():
    proc = invoke(
        "--mode", "run", "--triplets", "8", "--message", "0001",
        "--seed", "42", "--transcript", "-", "--stats", "/dev/null",
    )
    assert proc.returncode == 0
    records = parse_transcript(proc.stdout)
    assert records[0].seq == 1
    assert records[0].action == "PREPARE"
    assert records[-1].action == "COMPLETE"


def test_transcript_is_not_written_unless_requested(tmp_path):
    proc = invoke(
        "--mode", "run", "--triplets", "8", "--message", "0001", "--seed", "42",
        cwd=tmp_path,
    )
    assert proc.returncode == 0
    assert list(tmp_path.iterdir()) == []


def test_detected_eavesdropper_exits_two():
    proc = invoke(
        "--mode", "run", "--triplets", "8", "--message", "0001",
        "--seed", "2", "--attack", "intercept-resend",
    )
    assert proc.returncode == 2
    stats = stats_dict(proc.stdout)
    assert stats["match"] == "false"
    assert stats["decoded"] == ""
    assert int(stats["violations"]) > 0


def test_attack_basis_flag_is_accepted():
    proc = invoke(
        "--mode", "run", "--triplets", "8", "--message", "0001",
        "--seed", "0", "--attack", "intercept-resend", "--attack-basis", "z",
    )
    assert proc.returncode in (0, 2)


# --- usage errors -------------------------------------------------------


@pytest.mark.parametrize(
    "args",
    [
        ["--mode", "run", "--triplets", "7", "--message", "0001"],
        ["--mode", "run", "--triplets", "8", "--message", "00"],
        ["--mode", "run", "--triplets", "8", "--message", "xyz1"],
        ["--mode", "run", "--triplets", "8"],  # no message
        ["--mode", "run", "--triplets", "8", "--message", "0001", "--parties", "2"],
        ["--mode", "run", "--triplets", "8", "--message", "0001", "--check-fraction", "1.5"],
        ["--mode", "sweep", "--trials", "0"],
        ["--unknown-flag"],
        ["--mode", "frobnicate"],
    ],
)
def test_bad_usage_exits_one(args):
    proc = invoke(*args)
    assert proc.returncode == 1
    assert "error" in proc.stderr


# --- verify mode --------------------------------------------------------


def test_verify_passes_and_reports_findings():
    proc = invoke("--mode", "verify")
    assert proc.returncode == 0
    lines = proc.stdout.strip().splitlines()
    swap = [l for l in lines if l.startswith("swap-product")]
    assert len(swap) == 16
    assert all("\tpass\t" in l for l in swap)
    assert any(l.startswith("ghz-orthonormality\tpass") for l in lines)
    findings = [l for l in lines if "\tfinding\t" in l]
    assert sorted(f.split("\t")[0] for f in findings) == [
        "ghz-expansion index=3",
        "ghz-expansion index=4",
    ]
    assert any(l.startswith("decode-table\tpass\tkeys=64") for l in lines)


def test_verify_structural_failure_exits_three(monkeypatch, capsys):
    real = cli.bases.verify_swap_identity

    def broken(left, right):
        report = real(left, right)
        return type(report)(
            left=report.left, right=report.right, holds=False,
            max_residual=1.0, outcome_table=report.outcome_table,
        )

    monkeypatch.setattr(cli.bases, "verify_swap_identity", broken)
    code = cli.main(["--mode", "verify"])
    capsys.readouterr()
    assert code == 3


# --- internal errors ----------------------------------------------------


def test_simulator_bug_exits_four(monkeypatch, capsys):
    def explode(self):
        raise InternalError("phase ordering violated")

    monkeypatch.setattr(Session, "run", explode)
    code = cli.main(["--mode", "run", "--triplets", "8", "--message", "0001"])
    captured = capsys.readouterr()
    assert code == 4
    assert "internal error" in captured.err


# --- sweep mode ---------------------------------------------------------


def test_sweep_emits_one_row_per_attack_cell():
    proc = invoke("--mode", "sweep", "--triplets", "8", "--trials", "25", "--seed", "3")
    assert proc.returncode == 0
    lines = proc.stdout.strip().splitlines()
    header = lines[0].split("\t")
    assert header == [
        "attack", "trials", "checked_triplets",
        "detection_rate", "abort_rate", "decode_accuracy",
    ]
    rows = [line.split("\t") for line in lines[1:]]
    assert [row[0] for row in rows] == [
        "none",
        "intercept-resend:random",
        "intercept-resend:z",
        "intercept-resend:x",
        "entangle-measure",
    ]
    for row in rows:
        assert int(row[1]) == 25
        assert int(row[2]) == 100
        for cell in row[3:]:
            float(cell)  # parseable, nan allowed
    none_row = rows[0]
    assert float(none_row[3]) == 0.0
    assert float(none_row[4]) == 0.0
    assert float(none_row[5]) == 1.0


def test_sweep_is_deterministic():
    first = invoke("--mode", "sweep", "--triplets", "8", "--trials", "10", "--seed", "11")
    second = invoke("--mode", "sweep", "--triplets", "8", "--trials", "10", "--seed", "11")
    assert first.stdout == second.stdout


def test_stats_file_destination(tmp_path):
    out = tmp_path / "stats.tsv"
    proc = invoke(
        "--mode", "run", "--triplets", "8", "--message", "0001",
        "--seed", "42", "--stats", str(out),
    )
    assert proc.returncode == 0
    assert proc.stdout == ""
    assert stats_dict(out.read_text())["decoded"] == "0001"
