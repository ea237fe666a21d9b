"""Output files for runs: digit files, JSON reports, CSV traces and figures."""
from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

SCHEMA = "pi-forge/1"
TRACE_FIELDS = ("iteration", "elapsed_s", "truncation_log10", "digits_bound")


def write_digit_file(path, digit_string: str) -> str:
    """Write ``digit_string`` as a one-line UTF-8 file; returns its SHA-256."""
    data = (digit_string + "\n").encode("utf-8")
    Path(path).write_bytes(data)
    return hashlib.sha256(data).hexdigest()


def read_digit_file(path) -> str:
    text = Path(path).read_text(encoding="utf-8")
    first = text.splitlines()[0] if text else ""
    return first.strip()


def write_json_report(path, command: str, payload: dict) -> dict:
    doc = {"schema": SCHEMA, "command": command, **payload}
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return doc


def write_trace_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=TRACE_FIELDS)
        w.writeheader()
        for row in rows:
            w.writerow({k: row[k] for k in TRACE_FIELDS})


def plot_run(rows, target_digits: float, algorithm: str, outdir) -> list:
    """Convergence and per-iteration timing figures; returns the written paths.

    ``target_digits`` is the requested precision in decimal digits.
    """
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    its = [r["iteration"] for r in rows]
    digits = [r["digits_bound"] for r in rows]
    elapsed = [r["elapsed_s"] for r in rows]
    steps = [b - a for a, b in zip([0.0] + elapsed[:-1], elapsed)]

    written = []
    fig, ax = plt.subplots(figsize=(5.5, 3.5))
    ax.semilogy(its, [max(d, 1) for d in digits], "o-", label="guaranteed by truncation bound")
    ax.axhline(target_digits, color="grey", ls="--", lw=1, label="requested")
    ax.set_xlabel("iteration")
    ax.set_ylabel("correct decimal digits (lower bound)")
    ax.set_title(f"{algorithm}: convergence")
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    p = outdir / "convergence.png"
    fig.savefig(p, dpi=120)
    plt.close(fig)
    written.append(p)

    fig, ax = plt.subplots(figsize=(5.5, 3.5))
    ax.bar(its, steps, color="tab:blue")
    ax.set_xlabel("iteration")
    ax.set_ylabel("seconds")
    ax.set_title(f"{algorithm}: time per iteration")
    fig.tight_layout()
    p = outdir / "timings.png"
    fig.savefig(p, dpi=120)
    plt.close(fig)
    written.append(p)
    return written
