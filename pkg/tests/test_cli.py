import json
import subprocess
import sys

import pytest

import oracle
import piforge.checkpoint
from piforge import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_agm_ten_digits(capsys):
    code, out, _ = run(capsys, "agm", "--algo", "borwein", "--digits", "10")
    assert code == cli.EXIT_OK
    assert out.startswith("3.141592653")
    assert out.strip() == "3.1415926535"


@pytest.mark.parametrize("algo", ["borwein", "salamin"])
@pytest.mark.parametrize("base", ["10", "16"])
def test_agm_writes_digit_file_and_report(tmp_path, capsys, algo, base):
    out = tmp_path / "pi.txt"
    code, stdout, _ = run(capsys, "agm", "--algo", algo, "--digits", "500", "--base", base,
                          "-o", str(out))
    assert code == cli.EXIT_OK and stdout == ""
    assert out.read_text() == oracle.pi_digits(500, int(base)) + "\n"
    doc = json.loads((tmp_path / "pi.txt.json").read_text())
    assert doc["schema"] == "pi-forge/1" and doc["command"] == "agm"
    for key in ("algorithm", "n", "magnifier_bits", "rounding_ulps", "truncation_log10",
                "guard_digits", "verdict", "timings", "budget_ulps", "digits_sha256"):
        assert key in doc
    assert doc["verdict"] == "certified"
    assert doc["algorithm"] == algo
    assert set(doc["timings"]) >= {"iterate", "rescale", "render"}


def test_agm_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["agm", "--digits", "0"])
    assert exc.value.code == cli.EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        cli.main(["agm", "--digits", "10", "--base", "8"])
    assert exc.value.code == cli.EXIT_USAGE
    capsys.readouterr()


def test_agm_single_guard_digit(capsys):
    # The working magnifier keeps the bound at a few ulps, so one decimal
    # guard digit can certify; one hex guard digit lands near a boundary here.
    code, out, _ = run(capsys, "agm", "--digits", "50", "--guard", "1")
    assert code == cli.EXIT_OK
    assert out.strip() == oracle.pi_digits(50)
    code, out, err = run(capsys, "agm", "--digits", "50", "--base", "16", "--guard", "1")
    assert code == cli.EXIT_AMBIGUOUS
    assert "ambiguous" in err
    assert oracle.pi_digits(50, 16).startswith(out.strip()[:-1])


def test_agm_unwritable_output_is_io_error(tmp_path, capsys):
    code, _, _ = run(capsys, "agm", "--digits", "10", "-o", str(tmp_path / "no" / "pi.txt"))
    assert code == cli.EXIT_IO


def test_trace_and_figures(tmp_path, capsys):
    code, _, _ = run(capsys, "agm", "--algo", "salamin", "--digits", "300", "--base", "16",
                     "-o", str(tmp_path / "pi.txt"), "--trace", str(tmp_path / "trace.csv"),
                     "--figures", str(tmp_path / "fig"))
    assert code == cli.EXIT_OK
    lines = (tmp_path / "trace.csv").read_text().splitlines()
    assert lines[0] == "iteration,elapsed_s,truncation_log10,digits_bound"
    assert len(lines) > 3
    bounds = [int(line.split(",")[3]) for line in lines[1:]]
    assert bounds == sorted(bounds) and bounds[-1] >= 300 * 1.2
    for name in ("convergence.png", "timings.png"):
        assert (tmp_path / "fig" / name).read_bytes()[:4] == b"\x89PNG"
    doc = json.loads((tmp_path / "pi.txt.json").read_text())
    assert len(doc["figures"]) == 2


@pytest.mark.parametrize("algo", ["borwein", "salamin"])
def test_interrupted_checkpoint_resume_is_byte_identical(tmp_path, capsys, monkeypatch, algo):
    ref = tmp_path / "ref.txt"
    assert run(capsys, "agm", "--algo", algo, "--digits", "2000", "-o", str(ref))[0] == 0

    ckpt = tmp_path / "run.ckpt"
    real_save = piforge.checkpoint.save_state
    saves = []

    def interrupting_save(path, st):
        real_save(path, st)
        saves.append(st)
        if len(saves) == 3:
            raise KeyboardInterrupt

    monkeypatch.setattr(piforge.checkpoint, "save_state", interrupting_save)
    out = tmp_path / "resumed.txt"
    with pytest.raises(KeyboardInterrupt):
        cli.main(["agm", "--algo", algo, "--digits", "2000", "-o", str(out),
                  "--checkpoint", str(ckpt)])
    assert not out.exists()
    assert piforge.checkpoint.load_state(ckpt) == saves[-1]

    monkeypatch.setattr(piforge.checkpoint, "save_state", real_save)
    code, _, _ = run(capsys, "agm", "--algo", algo, "--digits", "2000", "-o", str(out),
                     "--checkpoint", str(ckpt))
    assert code == cli.EXIT_OK
    assert out.read_bytes() == ref.read_bytes()


def test_checkpoint_from_other_run_is_rejected(tmp_path, capsys):
    ckpt = tmp_path / "run.ckpt"
    assert run(capsys, "agm", "--digits", "100", "--checkpoint", str(ckpt))[0] == 0
    code, _, _ = run(capsys, "agm", "--digits", "3000", "--checkpoint", str(ckpt))
    assert code == cli.EXIT_IO
    ckpt.write_bytes(b"garbage")
    code, _, _ = run(capsys, "agm", "--digits", "100", "--checkpoint", str(ckpt))
    assert code == cli.EXIT_IO


def test_bbp_position_one(capsys, tmp_path):
    code, out, _ = run(capsys, "bbp", "--position", "1", "--report", str(tmp_path / "b.json"))
    assert (code, out) == (cli.EXIT_OK, "2\n")
    doc = json.loads((tmp_path / "b.json").read_text())
    assert doc["digit"] == "2" and doc["verdict"] == "certified"


def test_bbp_low_precision_is_ambiguous(capsys):
    code, out, err = run(capsys, "bbp", "--position", "5", "--precision-bits", "4")
    assert code == cli.EXIT_AMBIGUOUS
    assert out == "" and "not certified" in err


def test_bbp_thread_counts_agree(capsys, monkeypatch):
    outs = set()
    for threads in ("1", "2", "3"):
        code, out, _ = run(capsys, "--threads", threads, "bbp", "--position", "20000")
        assert code == 0
        outs.add(out)
    monkeypatch.setenv("PIFORGE_THREADS", "2")
    outs.add(run(capsys, "bbp", "--position", "20000")[1])
    assert outs == {format(oracle.hex_digit(20000), "X") + "\n"}


def test_crosscheck_computed_run(capsys, tmp_path):
    code, out, _ = run(capsys, "crosscheck", "--digits", "3000", "--samples", "20",
                       "--report", str(tmp_path / "c.json"))
    assert code == cli.EXIT_OK
    rows = [line.split("\t") for line in out.splitlines()]
    assert len(rows) == 20
    assert all(r[1] == r[2] and r[3] == "match" for r in rows)
    doc = json.loads((tmp_path / "c.json").read_text())
    assert doc["verdict"] == "pass" and len(doc["positions"]) == 20


def test_crosscheck_corrupted_file(capsys, tmp_path):
    good = oracle.pi_digits(400, 16)
    f = tmp_path / "pi16.txt"
    corrupt = good[:2 + 99] + ("0" if good[2 + 99] != "0" else "1") + good[2 + 100:]
    f.write_text(corrupt + "\n")
    code, out, err = run(capsys, "crosscheck", "--digits-file", str(f), "--positions", "1,100,400")
    assert code == cli.EXIT_MISMATCH
    assert "100" in err
    f.write_text(good + "\n")
    assert run(capsys, "crosscheck", "--digits-file", str(f), "--positions", "1,100,400")[0] == 0


def test_crosscheck_positions_beyond_run(capsys, tmp_path):
    f = tmp_path / "pi16.txt"
    f.write_text(oracle.pi_digits(50, 16) + "\n")
    code, _, err = run(capsys, "crosscheck", "--digits-file", str(f), "--positions", "10,51")
    assert code == cli.EXIT_USAGE
    assert "51" in err


def test_crosscheck_missing_file(capsys, tmp_path):
    code, _, _ = run(capsys, "crosscheck", "--digits-file", str(tmp_path / "absent.txt"))
    assert code == cli.EXIT_IO


def test_selftest(capsys):
    code, out, _ = run(capsys, "selftest", "--digits", "300")
    assert code == cli.EXIT_OK
    assert out.count("PASS") == 8 and "FAIL" not in out


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "piforge", "agm", "--digits", "25"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.strip() == oracle.pi_digits(25)
