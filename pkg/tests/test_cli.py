from __future__ import annotations

import csv
import io

import pytest

from qcss.channel import analytic_perr_z
from qcss.cli import SWEEP_COLUMNS, main
from qcss.table import table_row


def run(capsys, *argv) -> tuple[int, str]:
    code = main([str(a) for a in argv])
    return code, capsys.readouterr().out


def rows(text: str) -> list[dict]:
    body = "\n".join(line for line in text.splitlines() if not line.startswith("#"))
    return list(csv.DictReader(io.StringIO(body)))


@pytest.fixture
def tiny(tmp_path, capsys):
    path = tmp_path / "tiny.qcss"
    code, out = run(capsys, "build", "--m", 4, "--t", 2, "--mx", 4, "--seed", 1, "--out", path)
    assert code == 0
    return path


def test_build_tiny_validates(tiny, capsys):
    code, out = run(capsys, "validate", tiny)
    assert code == 0 and out.startswith("OK")


def test_build_reports(tmp_path, capsys):
    code, out = run(capsys, "build", "--m", 10, "--t", 2, "--mx", 563, "--seed", 1, "--out", tmp_path / "a.qcss")
    assert code == 0
    assert "Q=0.430" in out
    assert "rank(H^x)=563 (full)" in out
    assert "pool acceptance" in out and "degrees" in out
    lines = (tmp_path / "a.qcss").read_text().splitlines()
    assert lines[1].split()[3] == "1023"


def test_build_deterministic_across_workers(tmp_path, monkeypatch, capsys):
    outs = []
    for k, w in enumerate((1, 1, 2)):
        monkeypatch.setenv("QCSS_OUTPUT_DIR", str(tmp_path / str(k)))
        run(capsys, "build", "--m", 8, "--t", 3, "--mx", 40, "--seed", 5, "--workers", w, "--out", "c.qcss")
        outs.append((tmp_path / str(k) / "c.qcss").read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_build_failure_exit_status(tmp_path, capsys):
    code = main(["build", "--m", "3", "--t", "4", "--mx", "1", "--out", str(tmp_path / "x")])
    assert code == 1


def test_validate_flags_corrupted_row(tiny, tmp_path, capsys):
    lines = tiny.read_text().splitlines()
    row = [int(i) for i in lines[3].split()]
    row[-1] = next(i for i in range(15) if i not in row)
    lines[3] = " ".join(map(str, sorted(row)))
    bad = tmp_path / "bad.qcss"
    bad.write_text("\n".join(lines) + "\n")
    code, out = run(capsys, "validate", bad)
    assert code == 1
    assert "FAIL commutativity" in out and "row(s) 1" in out


def test_validate_truncated(tiny, tmp_path, capsys):
    cut = tmp_path / "cut.qcss"
    cut.write_text("\n".join(tiny.read_text().splitlines()[:4]) + "\n")
    assert main(["validate", str(cut)]) == 2
    assert main(["validate", str(tmp_path / "missing.qcss")]) == 2


def test_table_reference_row(capsys):
    code, out = run(capsys, "table", "--m", 12, "--t", 6, "--p-block", "1e-4", "--mx", 1191)
    assert code == 0
    (row,) = rows(out)
    assert float(row["p_z"]) == pytest.approx(2.52e-4, rel=0.005)
    assert row["M_z"] == "72" and round(float(row["Q_z"]), 3) == 0.982
    assert round(float(row["Q"]), 2) == 0.69


def test_table_small_consistent(capsys):
    _, out = run(capsys, "table", "--m", 4, "--t", 2, "--p-block", 0.5, "--asymmetry", 10)
    (row,) = rows(out)
    assert analytic_perr_z(15, 2, float(row["p_z"])) == pytest.approx(0.5, rel=1e-4)
    assert float(row["p_x"]) == pytest.approx(float(row["p_z"]) / 10, rel=1e-5)
    assert row["M_x"] == ""
    r = table_row(10, 4)
    assert r.M_z == 40 and r.N == 1023


def test_sweep_schema_and_zero_noise(tiny, capsys):
    code, out = run(capsys, "sweep", tiny, "--px", "0,0.02", "--trials", 300, "--seed", 2)
    assert code == 0
    assert "# command=sweep" in out and "# version=" in out
    header = next(line for line in out.splitlines() if not line.startswith("#"))
    assert header.split(",") == SWEEP_COLUMNS
    r0, r1 = rows(out)
    assert r0["estimate"] == "0" and r0["block_errors"] == "0"
    assert r1["trials"] == "300" and r1["metric"] == "strict"


def test_sweep_deterministic_and_worker_free(tiny, tmp_path, monkeypatch):
    outs = []
    for k, w in enumerate((1, 1, 3)):
        monkeypatch.setenv("QCSS_OUTPUT_DIR", str(tmp_path / str(k)))
        main(["sweep", str(tiny), "--px-log", "0.01", "0.05", "3", "--trials", "600", "--workers", str(w), "--out", "s.csv"])
        outs.append((tmp_path / str(k) / "s.csv").read_bytes())
    assert outs[0] == outs[1] == outs[2]
    assert b"workers" not in outs[0]


def test_sweep_requires_grid(tiny):
    assert main(["sweep", str(tiny)]) == 2


def test_config_file_reproduces_artifact(tiny, tmp_path, capsys):
    cfg = tmp_path / "build.cfg"
    echoed = [line[2:] for line in tiny.read_text().splitlines() if line.startswith("# ")]
    cfg.write_text("\n".join(e for e in echoed if not e.startswith("out=")) + "\n")
    again = tmp_path / "again.qcss"
    assert main(["build", "--config", str(cfg), "--out", str(again)]) == 0
    strip = lambda p: [line for line in p.read_text().splitlines() if not line.startswith("# out=")]
    assert strip(again) == strip(tiny)


def test_config_file_rejects_unknown_keys(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("m=4\nbogus=1\n")
    with pytest.raises(SystemExit):
        main(["build", "--config", str(cfg)])


def test_output_dir_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("QCSS_OUTPUT_DIR", str(tmp_path / "outdir"))
    assert main(["build", "--m", "4", "--t", "2", "--mx", "3", "--seed", "2"]) == 0
    assert (tmp_path / "outdir" / "code_m4_t2_mx3_s2.qcss").exists()
    assert main(["table", "--m", "4", "--t", "2", "--out", "row.csv"]) == 0
    assert (tmp_path / "outdir" / "row.csv").exists()
