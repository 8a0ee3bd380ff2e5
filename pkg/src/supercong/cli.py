"""Command-line front end.

Exit codes: 0 all checks passed, 1 a congruence failed (counterexample),
2 usage/parse/config error, 3 precision exhausted.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import series, wz
from .congruence import CHECK_NAMES, REGISTRY, CheckReport, sweep
from .hypdsl import ParseError, parse_series_file

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_PRECISION = 0, 1, 2, 3

FIELDS = (
    "check", "p", "r", "required_valuation", "achieved_valuation", "pass",
    "lower_bound", "status", "lhs_digest", "rhs_digest", "elapsed_ms", "message",
)


class ConfigError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits with 2 already; keep it that way
        self.print_usage(sys.stderr)
        raise ConfigError(message)


@dataclass
class RunConfig:
    subcommand: str
    p_lo: int = 3
    p_hi: int = 100
    r: int = 1
    checks: list[str] = field(default_factory=list)
    workers: int = 1
    backend: str = "auto"
    guard_digits: int = 10
    output_path: str | None = None
    output_format: str = "json"
    series_file: str | None = None
    timings: bool = False

    def validate(self) -> "RunConfig":
        if self.p_lo > self.p_hi:
            raise ConfigError(f"--pmin {self.p_lo} exceeds --pmax {self.p_hi}")
        if self.workers < 1:
            raise ConfigError("--workers must be at least 1")
        if self.guard_digits < 0:
            raise ConfigError("--guard-digits must be non-negative")
        if self.r < 1:
            raise ConfigError("--r must be at least 1")
        unknown = [c for c in self.checks if c not in REGISTRY]
        if unknown:
            raise ConfigError(
                f"unknown check(s): {', '.join(unknown)}; known: {', '.join(CHECK_NAMES)}"
            )
        return self


# ------------------------------------------------------------ report files


def _valuation_text(v) -> object:
    if v is None:
        return None
    if v == math.inf:
        return "+inf"
    return v


def report_record(rep: CheckReport, timings: bool = False) -> dict:
    if rep.status in ("pass", "fail"):
        expected = rep.achieved_valuation >= rep.required_valuation
        if expected != rep.passed:
            raise AssertionError(f"inconsistent pass flag in {rep}")
    return {
        "check": rep.check,
        "p": rep.p,
        "r": rep.r,
        "required_valuation": _valuation_text(rep.required_valuation),
        "achieved_valuation": _valuation_text(rep.achieved_valuation),
        "pass": rep.passed,
        "lower_bound": rep.lower_bound,
        "status": rep.status,
        "lhs_digest": rep.lhs_digest,
        "rhs_digest": rep.rhs_digest,
        "elapsed_ms": round(rep.elapsed_ms, 3) if timings else None,
        "message": rep.message,
    }


def summary_record(reports: Sequence[CheckReport], wall_ms: float | None) -> dict:
    margins = [
        rep.achieved_valuation - rep.required_valuation
        for rep in reports
        if rep.status in ("pass", "fail") and rep.required_valuation != math.inf
    ]
    return {
        "summary": True,
        "total": len(reports),
        "passed": sum(rep.status == "pass" for rep in reports),
        "failed": sum(rep.status == "fail" for rep in reports),
        "skipped": sum(rep.status == "skipped" for rep in reports),
        "errors": sum(rep.status in ("error", "precision-exhausted") for rep in reports),
        "min_margin": _valuation_text(min(margins)) if margins else None,
        "wall_ms": round(wall_ms, 3) if wall_ms is not None else None,
    }


def render_reports(
    reports: Sequence[CheckReport],
    fmt: str = "json",
    wall_ms: float | None = None,
    timings: bool = False,
) -> str:
    records = [report_record(rep, timings) for rep in reports]
    summary = summary_record(reports, wall_ms if timings else None)
    if fmt == "json":
        lines = [json.dumps(rec, ensure_ascii=False) for rec in records]
        lines.append(json.dumps(summary, ensure_ascii=False))
        return "\n".join(lines) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(FIELDS)
        for rec in records:
            writer.writerow("" if rec[k] is None else rec[k] for k in FIELDS)
        writer.writerow(["#summary"] + [f"{k}={v}" for k, v in summary.items() if k != "summary"])
        return buf.getvalue()
    raise ConfigError(f"unknown format {fmt!r}")


def _write(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def exit_code(reports: Sequence[CheckReport]) -> int:
    statuses = {rep.status for rep in reports}
    if "fail" in statuses:
        return EXIT_FAIL
    if "precision-exhausted" in statuses:
        return EXIT_PRECISION
    if "error" in statuses:
        return EXIT_USAGE
    return EXIT_OK


def _announce(reports: Sequence[CheckReport]) -> None:
    for rep in reports:
        if rep.status == "skipped":
            continue
        if rep.status == "fail":
            print(
                f"COUNTEREXAMPLE {rep.check} p={rep.p} r={rep.r}: valuation "
                f"{rep.achieved_valuation} < required {rep.required_valuation}",
                file=sys.stderr,
            )
        elif rep.status != "pass":
            print(f"{rep.status.upper()} {rep.check} p={rep.p} r={rep.r}: {rep.message}",
                  file=sys.stderr)


def _print_lines(reports: Sequence[CheckReport]) -> None:
    for rep in reports:
        tag = {"pass": "PASS", "fail": "FAIL", "skipped": "SKIP"}.get(rep.status, "ERROR")
        vals = f"{_valuation_text(rep.achieved_valuation)}/{_valuation_text(rep.required_valuation)}"
        if rep.lower_bound:
            vals = ">=" + vals
        if rep.status == "skipped":
            vals = "-"
        print(f"{tag:5} {rep.check:<12} p={rep.p:<6} r={rep.r} v={vals} {rep.message}".rstrip())


# ------------------------------------------------------------ subcommands


def _run_sweep(cfg: RunConfig, checks, *, echo: bool) -> int:
    start = time.perf_counter()
    reports = sweep(
        checks, cfg.p_lo, cfg.p_hi, cfg.r, cfg.workers,
        backend=cfg.backend, guard_digits=cfg.guard_digits,
    )
    wall_ms = (time.perf_counter() - start) * 1000.0
    if echo:
        _print_lines(reports)
        s = summary_record(reports, None)
        print(f"{s['passed']} passed, {s['failed']} failed, {s['skipped']} skipped, "
              f"{s['errors']} errors")
    if cfg.output_path is not None:
        _write(render_reports(reports, cfg.output_format, wall_ms, cfg.timings), cfg.output_path)
    _announce(reports)
    return exit_code(reports)


def verify_command(cfg: RunConfig) -> int:
    return _run_sweep(cfg, cfg.checks, echo=True)


def sweep_command(cfg: RunConfig) -> int:
    if cfg.output_path is None:
        cfg.output_path = "-"
    return _run_sweep(cfg, cfg.checks, echo=False)


def dsl_command(cfg: RunConfig) -> int:
    if not cfg.series_file:
        raise ConfigError("dsl needs --series-file")
    try:
        text = Path(cfg.series_file).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read series file: {exc}") from None
    try:
        blocks = parse_series_file(text)
    except ParseError as exc:
        msg = f"{exc.message} (expected {exc.expected})" if exc.expected else exc.message
        print(f"{cfg.series_file}:{exc.line}:{exc.column}: {msg}", file=sys.stderr)
        return EXIT_USAGE
    backend = "exact" if cfg.backend == "auto" else cfg.backend
    cfg.backend = backend
    return _run_sweep(cfg, blocks, echo=cfg.output_path not in ("-",))


def wz_command(args) -> int:
    if args.action == "certify":
        start = time.perf_counter()
        ok = wz.certificate_check()
        ms = (time.perf_counter() - start) * 1000.0
        if ok:
            print(f"certificate identity holds ({ms:.1f} ms)")
            return EXIT_OK
        print("certificate identity FAILS", file=sys.stderr)
        return EXIT_FAIL
    if args.action == "grid":
        bad = wz.find_wz_violation(args.nmax, args.kmax)
        if bad is None:
            print(f"WZ relation holds for 0<=n<={args.nmax}, 1<=k<={args.kmax}")
            return EXIT_OK
        print(f"WZ relation fails at (n, k) = {bad}", file=sys.stderr)
        return EXIT_FAIL
    failures = wz.telescoping_failures(args.p)
    lhs, rhs = wz.telescoping_sides(args.p)
    if not failures:
        print(f"telescoping holds at p={args.p}: both sides = {lhs}")
        return EXIT_OK
    for msg in failures:
        print(f"telescoping fails at p={args.p}: {msg}", file=sys.stderr)
    return EXIT_FAIL


def _decimal(q: Fraction, digits: int) -> str:
    sign = "-" if q < 0 else ""
    q = abs(q)
    whole = q.numerator // q.denominator
    frac = (q - whole) * 10**digits
    return f"{sign}{whole}.{frac.numerator // frac.denominator:0{digits}d}"


def numeric_command(args) -> int:
    if args.series == "k2":
        value = series.s_k2(args.terms)
        lo, hi = series.reference_16_over_pi(args.digits)
        label = "16/pi"
    else:
        value = series.s_g7(args.terms)
        lo, hi = series.reference_32_over_pi_cubed(args.digits)
        label = "32/pi^3"
    inside = lo < value < hi
    print(f"S({args.terms})   = {_decimal(value, args.digits)}")
    print(f"{label:<8}in [{_decimal(lo, args.digits)}, {_decimal(hi, args.digits + 2)}]")
    print("inside interval" if inside else "outside interval")
    return EXIT_OK if inside else EXIT_FAIL


# ------------------------------------------------------------ argument parsing


def _default_workers() -> int:
    raw = os.environ.get("SUPERCONG_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"SUPERCONG_WORKERS={raw!r} is not an integer") from None


def _add_range(sub: argparse.ArgumentParser, *, out: bool = True) -> None:
    sub.add_argument("--pmin", type=int, default=3)
    sub.add_argument("--pmax", type=int, default=100)
    sub.add_argument("--r", type=int, default=1)
    sub.add_argument("--workers", type=int, default=None)
    sub.add_argument("--backend", choices=("auto", "exact", "padic"), default="auto")
    sub.add_argument("--guard-digits", type=int, default=10)
    sub.add_argument("--timings", action="store_true",
                     help="record elapsed times (makes report files non-reproducible)")
    if out:
        sub.add_argument("--out", default=None)
        sub.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="supercong", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="plain-text file of key = value flag defaults")
    subs = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    verify = subs.add_parser("verify", help="run built-in checks over a prime range")
    verify.add_argument("checks", nargs="+", metavar="CHECK")
    _add_range(verify)

    sw = subs.add_parser("sweep", help="sweep checks and write a report file")
    sw.add_argument("--checks", required=False, default="")
    _add_range(sw)

    w = subs.add_parser("wz", help="WZ certificate, grid and telescoping checks")
    w.add_argument("action", choices=("certify", "grid", "telescope"))
    w.add_argument("--nmax", type=int, default=30)
    w.add_argument("--kmax", type=int, default=30)
    w.add_argument("--p", type=int, default=3)

    dsl = subs.add_parser("dsl", help="check user-defined series from a file")
    dsl.add_argument("--series-file", default=None)
    _add_range(dsl)

    num = subs.add_parser("numeric", help="compare a truncated sum with its closed form")
    num.add_argument("series", choices=("k2", "g7"))
    num.add_argument("--terms", type=int, default=60)
    num.add_argument("--digits", type=int, default=100)
    return parser


def load_config(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        values[key.strip().lstrip("-").replace("-", "_")] = value.strip()
    return values


def _apply_config(parser: argparse.ArgumentParser, command: str, values: dict[str, str]) -> None:
    sub = parser._subparsers._group_actions[0].choices[command]  # noqa: SLF001
    actions = {a.dest: a for a in sub._actions}  # noqa: SLF001
    defaults = {}
    for key, raw in values.items():
        action = actions.get(key)
        if action is None or not action.option_strings:
            raise ConfigError(f"config key {key!r} does not apply to {command!r}")
        if isinstance(action, argparse._StoreTrueAction):  # noqa: SLF001
            defaults[key] = raw.lower() in ("1", "true", "yes", "on")
            continue
        try:
            value = action.type(raw) if action.type else raw
        except ValueError:
            raise ConfigError(f"config key {key!r}: bad value {raw!r}") from None
        if action.choices and value not in action.choices:
            raise ConfigError(f"config key {key!r}: {raw!r} not in {list(action.choices)}")
        defaults[key] = value
    sub.set_defaults(**defaults)


def _config_from_args(args) -> RunConfig:
    checks = getattr(args, "checks", [])
    if isinstance(checks, str):
        checks = [c.strip() for c in checks.split(",") if c.strip()]
    workers = args.workers if args.workers is not None else _default_workers()
    return RunConfig(
        subcommand=args.command,
        p_lo=args.pmin,
        p_hi=args.pmax,
        r=args.r,
        checks=list(dict.fromkeys(checks)),
        workers=workers,
        backend=args.backend,
        guard_digits=args.guard_digits,
        output_path=args.out,
        output_format=args.format,
        series_file=getattr(args, "series_file", None),
        timings=args.timings,
    ).validate()


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        pre, _ = parser.parse_known_args(argv)
        if pre.config:
            _apply_config(parser, pre.command, load_config(pre.config))
        args = parser.parse_args(argv)
        if args.command == "wz":
            return wz_command(args)
        if args.command == "numeric":
            if not 1 <= args.digits <= 1000 or args.terms < 0:
                raise ConfigError("--digits must be in [1, 1000] and --terms >= 0")
            return numeric_command(args)
        cfg = _config_from_args(args)
        if args.command == "verify":
            return verify_command(cfg)
        if args.command == "sweep":
            return sweep_command(cfg)
        return dsl_command(cfg)
    except ConfigError as exc:
        print(f"supercong: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
