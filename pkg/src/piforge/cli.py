"""Command-line interface: ``piforge {agm,bbp,crosscheck,selftest}``."""
from __future__ import annotations

import argparse
import logging
import math
import random
import sys
import time
from pathlib import Path

from . import bbp, checkpoint, report
from .digits import DigitRequest, compute_digits, crosscheck, truncation_log10_at
from .errors import CheckpointError, ConfigurationError, ContractError, PiForgeError

log = logging.getLogger("piforge")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_AMBIGUOUS = 3
EXIT_MISMATCH = 4
EXIT_IO = 5


class UsageError(Exception):
    pass


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _positions(text):
    try:
        out = [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad position list {text!r}") from None
    if not out:
        raise argparse.ArgumentTypeError("empty position list")
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="piforge", description="Certified digits of pi (AGM) and BBP hex-digit extraction.")
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("--threads", type=_positive, default=None,
                        help="worker processes for BBP sums (env PIFORGE_THREADS)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("agm", help="compute certified digits with an AGM algorithm")
    p.add_argument("--algo", choices=("borwein", "salamin"), default="borwein")
    p.add_argument("--digits", type=_positive, required=True, help="digits after the point")
    p.add_argument("--base", type=int, choices=(10, 16), default=10)
    p.add_argument("--guard", type=_positive, default=None, help="guard digits (default: auto)")
    p.add_argument("--output", "-o", type=Path, default=None, help="digit file (default: stdout)")
    p.add_argument("--report", type=Path, default=None, help="JSON report path")
    p.add_argument("--checkpoint", type=Path, default=None, help="resume/save state here")
    p.add_argument("--trace", type=Path, default=None, help="per-iteration CSV trace")
    p.add_argument("--figures", type=Path, default=None, help="directory for PNG figures")

    p = sub.add_parser("bbp", help="extract one hexadecimal digit with the BBP formula")
    p.add_argument("--position", type=_positive, required=True, help="1-based hex position")
    p.add_argument("--precision-bits", type=_positive, default=None,
                   help="fixed precision; disables escalation")
    p.add_argument("--max-extra-bits", type=int, default=64)
    p.add_argument("--report", type=Path, default=None)

    p = sub.add_parser("crosscheck", help="spot-check a hex AGM run against BBP")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--digits-file", type=Path, help="existing base-16 digit file")
    src.add_argument("--digits", type=_positive, help="compute a base-16 run of this length")
    p.add_argument("--algo", choices=("borwein", "salamin"), default="salamin")
    p.add_argument("--positions", type=_positions, default=None, help="e.g. '1,100,2000'")
    p.add_argument("--samples", type=_positive, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", type=Path, default=None)

    p = sub.add_parser("selftest", help="quick end-to-end consistency checks")
    p.add_argument("--digits", type=_positive, default=1000)
    return parser


def _threads(args) -> int:
    return args.threads if args.threads is not None else bbp.default_threads()


def cmd_agm(args) -> int:
    req = DigitRequest(args.digits, args.base, args.guard, args.algo)
    state = None
    if args.checkpoint is not None and args.checkpoint.exists():
        state = checkpoint.load_state(args.checkpoint)
        log.info("resuming from %s", args.checkpoint)

    rows = []
    t0 = time.perf_counter()

    def on_step(st):
        idx = st.index if args.algo == "borwein" else st.k
        tl = truncation_log10_at(args.algo, idx)
        rows.append({"iteration": idx, "elapsed_s": round(time.perf_counter() - t0, 6),
                     "truncation_log10": tl, "digits_bound": max(0, math.floor(-tl))})
        if args.checkpoint is not None:
            checkpoint.save_state(args.checkpoint, st)

    try:
        rep = compute_digits(req, state=state, on_step=on_step)
    except ContractError as exc:
        if state is not None:
            raise CheckpointError(f"{args.checkpoint}: {exc}") from None
        raise

    payload = rep.as_dict()
    if args.output is not None:
        payload["digits_sha256"] = report.write_digit_file(args.output, rep.digit_string)
        payload["digits_file"] = str(args.output)
    else:
        sys.stdout.write(rep.digit_string + "\n")
    if args.trace is not None:
        report.write_trace_csv(args.trace, rows)
    if args.figures is not None and rows:
        payload["figures"] = [str(p) for p in
                              report.plot_run(rows, args.digits * math.log10(args.base),
                                              args.algo, args.figures)]
    report_path = args.report
    if report_path is None and args.output is not None:
        report_path = args.output.with_name(args.output.name + ".json")
    if report_path is not None:
        report.write_json_report(report_path, "agm", payload)
    log.info("%s: verdict %s (B=%d ulps, r=%d)", args.algo, rep.verdict,
             rep.budget_ulps, rep.guard_remainder)
    if not rep.certified:
        print(f"ambiguous: guard remainder {rep.guard_remainder} within {rep.budget_ulps} "
              f"ulps of a digit boundary; rerun with more --guard digits", file=sys.stderr)
        return EXIT_AMBIGUOUS
    return EXIT_OK


def cmd_bbp(args) -> int:
    threads = _threads(args)
    t0 = time.perf_counter()
    if args.precision_bits is not None:
        p = args.precision_bits
        digit = bbp.pi_hex_digit(bbp.BbpParams(args.position, p), threads)
    else:
        digit, p = bbp.hex_digit(args.position, max_extra_bits=args.max_extra_bits,
                                 threads=threads)
    elapsed = time.perf_counter() - t0
    if args.report is not None:
        report.write_json_report(args.report, "bbp", {
            "position": args.position, "precision_bits": p,
            "digit": None if digit is None else format(digit, "X"),
            "verdict": "certified" if digit is not None else "ambiguous",
            "timings": {"extract": elapsed}})
    if digit is None:
        print(f"position {args.position}: not certified at {p} bits", file=sys.stderr)
        return EXIT_AMBIGUOUS
    print(format(digit, "X"))
    return EXIT_OK


def cmd_crosscheck(args) -> int:
    threads = _threads(args)
    if args.digits_file is not None:
        text = report.read_digit_file(args.digits_file)
    else:
        rep = compute_digits(DigitRequest(args.digits, 16, None, args.algo))
        if not rep.certified:
            print("AGM run was not certified", file=sys.stderr)
            return EXIT_AMBIGUOUS
        text = rep.digit_string
    length = len(text.partition(".")[2])
    if args.positions is not None:
        positions = args.positions
    else:
        rng = random.Random(args.seed)
        positions = sorted(rng.sample(range(1, length + 1), min(args.samples, length)))
    bad = [d for d in positions if not 1 <= d <= length]
    if bad:
        raise UsageError(f"positions {bad} outside the run (1..{length})")
    t0 = time.perf_counter()
    result = crosscheck(text, positions, threads)
    elapsed = time.perf_counter() - t0
    for c in result.checks:
        bbp_txt = "-" if c.bbp_digit is None else format(c.bbp_digit, "X")
        print(f"{c.position}\t{c.agm_digit:X}\t{bbp_txt}\t{c.verdict}")
    if args.report is not None:
        report.write_json_report(args.report, "crosscheck", {
            "run_length": length,
            "positions": [{"position": c.position, "agm": format(c.agm_digit, "X"),
                           "bbp": None if c.bbp_digit is None else format(c.bbp_digit, "X"),
                           "precision_bits": c.precision_bits, "verdict": c.verdict}
                          for c in result.checks],
            "verdict": "pass" if result.passed else "mismatch",
            "timings": {"crosscheck": elapsed}})
    if not result.passed:
        print(f"mismatch at positions {result.mismatches}", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_selftest(args) -> int:
    n = args.digits
    ok = True

    def line(name, passed, detail=""):
        nonlocal ok
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'}  {name}{'  ' + detail if detail else ''}")

    runs = {}
    for algo in ("borwein", "salamin"):
        for base in (10, 16):
            runs[algo, base] = compute_digits(DigitRequest(n, base, None, algo))
            line(f"{algo} base {base} certified", runs[algo, base].certified)
    for base in (10, 16):
        same = runs["borwein", base].digit_string == runs["salamin", base].digit_string
        line(f"borwein == salamin (base {base}, {n} digits)", same)
    line("decimal prefix", runs["borwein", 10].digit_string.startswith("3.14159265358979"))
    hexrun = runs["salamin", 16]
    rng = random.Random(1)
    positions = sorted(rng.sample(range(1, n + 1), min(10, n)))
    res = crosscheck(hexrun, positions)
    line("BBP spot check", res.passed, f"positions {positions}")
    return EXIT_OK if ok else EXIT_FAILURE


COMMANDS = {"agm": cmd_agm, "bbp": cmd_bbp, "crosscheck": cmd_crosscheck,
            "selftest": cmd_selftest}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ConfigurationError) as exc:
        print(f"piforge: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, CheckpointError) as exc:
        print(f"piforge: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except PiForgeError as exc:
        print(f"piforge: error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
