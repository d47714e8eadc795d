"""Command-line batch runner.

Exit codes: 0 when every check passes, 1 when any check fails, 2 on a
configuration or structural error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from .checks import SUITE_NAMES, Check, RunConfig, checks_for
from .heap import StructuralError
from .schemes import SchemeError

SCHEMA_VERSION = 1
COLUMNS = ["name", "anchor", "status", "value", "counterexample", "elapsed_ms"]

# guard rails; see --help
MAX_MSG = 8
MAX_STATE_X_CHALLENGE = 9
MAX_DEPTH = 4
MAX_RSA_N = 6
# transcript tree of the signature protocol: (|M| queries * |M| keys) ** depth
MAX_SIG_NODES = 50_000


class ConfigError(ValueError):
    pass


def _frac(v: Fraction | None) -> str | None:
    if v is None:
        return None
    v = Fraction(v)
    return f"{v.numerator}/{v.denominator}"


def check_config(cfg: RunConfig) -> None:
    if cfg.suite not in SUITE_NAMES:
        raise ConfigError(f"unknown suite {cfg.suite!r}")
    if not 2 <= cfg.msg_size <= MAX_MSG:
        raise ConfigError(f"--msg-size must be in 2..{MAX_MSG}")
    if cfg.state_size < 1 or cfg.challenge_size < 1:
        raise ConfigError("--state-size and --challenge-size must be positive")
    n = cfg.state_size * cfg.challenge_size
    if not 2 <= n <= MAX_STATE_X_CHALLENGE:
        raise ConfigError(f"state-size * challenge-size must be in 2..{MAX_STATE_X_CHALLENGE}")
    if not 1 <= cfg.depth <= MAX_DEPTH:
        raise ConfigError(f"--depth must be in 1..{MAX_DEPTH}")
    if not 0 <= cfg.rsa_n <= MAX_RSA_N:
        raise ConfigError(f"--rsa-n must be in 0..{MAX_RSA_N}")
    nodes = (cfg.msg_size**2) ** cfg.depth
    if cfg.suite in ("sigproto", "all") and nodes > MAX_SIG_NODES:
        raise ConfigError(
            f"msg-size {cfg.msg_size} at depth {cfg.depth} gives ~{nodes} transcript nodes (limit {MAX_SIG_NODES})"
        )


def run_check(check: Check, cfg: RunConfig) -> dict:
    start = time.perf_counter()
    outcome = check.run(cfg)
    return {
        "name": check.name,
        "anchor": check.anchor,
        "status": outcome.status,
        "value": _frac(outcome.value),
        "counterexample": outcome.counterexample,
        "elapsed_ms": int((time.perf_counter() - start) * 1000),
    }


def _threads() -> int:
    raw = os.environ.get("SSP_ENGINE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"SSP_ENGINE_THREADS must be an integer, got {raw!r}") from None


def run(cfg: RunConfig) -> tuple[dict, int]:
    """Run the configured suite; returns the report and the exit code."""
    check_config(cfg)
    checks = checks_for(cfg.suite)
    threads = _threads()
    if threads == 1:
        rows = [run_check(c, cfg) for c in checks]
    else:
        with ThreadPoolExecutor(threads) as pool:
            rows = list(pool.map(lambda c: run_check(c, cfg), checks))
    report = {"schema_version": SCHEMA_VERSION, "suite": cfg.suite, "checks": rows}
    code = 0 if all(r["status"] == "pass" for r in rows) else 1
    return report, code


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
        w.writeheader()
        for row in report["checks"]:
            w.writerow({k: "" if row[k] is None else row[k] for k in COLUMNS})
        return buf.getvalue()
    lines = [f"suite: {report['suite']}"]
    for row in report["checks"]:
        value = f" value={row['value']}" if row["value"] is not None else ""
        lines.append(f"{row['status']:>14}  {row['name']}{value}  ({row['elapsed_ms']} ms)")
        if row["counterexample"]:
            lines.append(f"{'':>16}{row['counterexample']}")
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="sspengine",
        description="Exact game-based indistinguishability checks at toy sizes.",
        epilog=(
            f"Guard rails: msg-size <= {MAX_MSG}, state-size*challenge-size <= {MAX_STATE_X_CHALLENGE}, "
            f"depth <= {MAX_DEPTH}, rsa-n <= {MAX_RSA_N}, and for the signature suites "
            f"(msg-size^2)^depth <= {MAX_SIG_NODES}. Attestation checks cap the depth at 2. "
            "SSP_ENGINE_THREADS sets the number of worker threads; report order is fixed."
        ),
    )
    p.add_argument("--suite", choices=SUITE_NAMES, default="all")
    p.add_argument("--msg-size", type=int, default=3, help="message space of the toy signature scheme")
    p.add_argument("--state-size", type=int, default=2)
    p.add_argument("--challenge-size", type=int, default=2)
    p.add_argument("--depth", type=int, default=3, help="adversary query bound k")
    p.add_argument("--rsa-n", type=int, default=0, help="RSA n parameter (primes below n+6)")
    p.add_argument("--samples", type=int, default=200, help="sampled depth-2 strategies in reduction checks")
    p.add_argument("--format", choices=["json", "csv", "text"], default="text")
    p.add_argument("--output", help="write the report here instead of stdout")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(
        suite=args.suite,
        msg_size=args.msg_size,
        state_size=args.state_size,
        challenge_size=args.challenge_size,
        depth=args.depth,
        rsa_n=args.rsa_n,
        samples=args.samples,
    )
    try:
        report, code = run(cfg)
    except (ConfigError, StructuralError, SchemeError) as exc:
        print(f"sspengine: error: {exc}", file=sys.stderr)
        return 2
    text = render(report, args.format)
    if args.output:
        try:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"sspengine: cannot write {args.output}: {exc}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
