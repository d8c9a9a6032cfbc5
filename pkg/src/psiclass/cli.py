"""Command-line front end.

Exit codes: 0 success, 1 usage or validation error, 2 bound violation,
3 work budget exhausted.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from .arith import approx, format_rational
from .bounds import (
    SweepSummary,
    epsilon_report,
    lambda_factor,
    minimal_L,
    verify_theorem,
    verify_two_point,
)
from .cache import MemoCache, load_path, save_path
from .correlator import CorrelatorEngine
from .exceptions import BudgetExhausted, CacheFormatError
from .partitions import canonical_pi_L, dimension_ok, format_partition, parse_partition

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, EXIT_BUDGET = 0, 1, 2, 3

COMMANDS = ("compute", "table", "verify-bounds", "verify-two-point", "lambda-table", "cache-info")
TABLE_COLUMNS = ["g", "n", "partition", "correlator", "floor", "epsilon", "lambda", "satisfied"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    command: str
    g: int | None = None
    n: int | None = None
    L: int | None = None
    partition: tuple | None = None
    cache_path: str | None = None
    output_format: str = "text"
    output: str | None = None
    workers: int = 1
    work_budget: int | None = None

    def validate(self) -> None:
        need = {
            "compute": ("g", "partition"),
            "table": ("g", "n"),
            "verify-bounds": ("g", "n", "L"),
            "verify-two-point": ("g",),
            "lambda-table": ("g",),
            "cache-info": ("cache_path",),
        }[self.command]
        flag = {"partition": "--d", "cache_path": "--cache"}
        if (self.command in ("verify-bounds", "table") and None not in (self.g, self.L)
                and self.L >= self.g):
            raise UsageError(f"lambda(g, L) needs L < g, got g={self.g}, L={self.L}")
        for name in need:
            if getattr(self, name) is None:
                raise UsageError(f"{self.command} requires {flag.get(name, '--' + name)}")
        if self.g is not None and self.g < 0:
            raise UsageError("--g must be >= 0")
        if self.n is not None and self.n < 1:
            raise UsageError("--n must be >= 1")
        if self.L is not None and self.L < 0:
            raise UsageError("--L must be >= 0")
        if self.command in ("table", "verify-bounds", "verify-two-point") and self.g < 1:
            raise UsageError(f"{self.command} needs g >= 1")
        if self.command == "lambda-table" and self.g < 1:
            raise UsageError("lambda-table needs g >= 1")
        if self.workers < 1:
            raise UsageError("--workers must be positive")
        if self.work_budget is not None and self.work_budget < 1:
            raise UsageError("--budget must be positive")


def _json_rational(x):
    if x is None:
        return None
    x = Fraction(x)
    return {"num": str(x.numerator), "den": str(x.denominator)}


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _report_json(rep) -> dict:
    out = {
        "g": rep.key.genus,
        "n": len(rep.key.parts),
        "partition": format_partition(rep.key.parts),
        "correlator": _json_rational(rep.exact_value),
        "floor": _json_rational(rep.floor_value),
        "epsilon": _json_rational(rep.epsilon),
        "lambda": _json_rational(rep.lambda_bound),
        "satisfied": rep.bound_satisfied,
    }
    return out


def _text_table(header, rows) -> str:
    widths = [max(len(str(c)) for c in col) for col in zip(header, *rows)]
    lines = ["  ".join(str(c).ljust(w) for c, w in zip(r, widths)).rstrip()
             for r in [header, *rows]]
    return "\n".join(lines) + "\n"


def cmd_compute(cfg: RunConfig, engine: CorrelatorEngine) -> tuple[str, int]:
    g, d = cfg.g, cfg.partition
    if not dimension_ok(g, d):
        need = 3 * g - 3 + len(d)
        if g == 0 and len(d) < 3:
            raise UsageError(f"(g, n) = (0, {len(d)}) is unstable; genus 0 needs n >= 3")
        raise UsageError(
            f"dimension mismatch: parts sum to {sum(d)} but 3g-3+n = {need} for g={g}, n={len(d)}")
    if g == 0:
        value = engine(g, d)
        if cfg.output_format == "json":
            return json.dumps({"g": 0, "partition": format_partition(d),
                               "correlator": _json_rational(value)}, sort_keys=True) + "\n", EXIT_OK
        if cfg.output_format == "csv":
            return _csv_text(["g", "n", "partition", "correlator"],
                             [[0, len(d), format_partition(d), format_rational(value)]]), EXIT_OK
        return (f"g=0 d={format_partition(d)}\n"
                f"correlator  {format_rational(value)}  (approx {approx(value)})\n"), EXIT_OK
    rep = epsilon_report(g, d, None, engine)
    if cfg.output_format == "json":
        body = _report_json(rep)
        body["partition_as_given"] = format_partition(d)
        body["approx"] = {"correlator": approx(rep.exact_value), "floor": approx(rep.floor_value),
                          "epsilon": approx(rep.epsilon)}
        return json.dumps(body, sort_keys=True) + "\n", EXIT_OK
    if cfg.output_format == "csv":
        row = rep.row()
        return _csv_text(TABLE_COLUMNS, [[row[c] for c in TABLE_COLUMNS]]), EXIT_OK
    lines = [f"g={g} d={format_partition(d)}"]
    for name, x in (("correlator", rep.exact_value), ("floor", rep.floor_value),
                    ("epsilon", rep.epsilon)):
        lines.append(f"{name:<11} {format_rational(x)}  (approx {approx(x)})")
    return "\n".join(lines) + "\n", EXIT_OK


def _table_reports(cfg: RunConfig, engine: CorrelatorEngine) -> list:
    m = 3 * cfg.g - 3 + cfg.n
    if m < 0:
        return []
    L = cfg.L if cfg.L is not None else m
    reports = []
    for d in canonical_pi_L(m, cfg.n, L):
        bound_L = cfg.L if cfg.L is not None else minimal_L(d)
        reports.append(epsilon_report(cfg.g, d, bound_L if bound_L < cfg.g else None, engine))
    return reports


def cmd_table(cfg: RunConfig, engine: CorrelatorEngine) -> tuple[str, int]:
    reports = _table_reports(cfg, engine)
    if cfg.output_format == "json":
        body = {"g": cfg.g, "n": cfg.n, "L": cfg.L, "columns": TABLE_COLUMNS,
                "rows": [_report_json(r) for r in reports]}
        return json.dumps(body, sort_keys=True) + "\n", EXIT_OK
    rows = [[r.row()[c] for c in TABLE_COLUMNS] for r in reports]
    if cfg.output_format == "csv":
        return _csv_text(TABLE_COLUMNS, rows), EXIT_OK
    header = TABLE_COLUMNS + ["epsilon_approx"]
    rows = [row + [approx(r.epsilon)] for row, r in zip(rows, reports)]
    return _text_table(header, rows), EXIT_OK


def _summary_output(summary: SweepSummary, fmt: str) -> str:
    if fmt == "json":
        body = summary.to_dict(rational=_json_rational)
        body["reports"] = [_report_json(r) for r in summary.reports]
        return json.dumps(body, sort_keys=True) + "\n"
    if fmt == "csv":
        rows = [[r.row()[c] for c in TABLE_COLUMNS] for r in summary.reports]
        return _csv_text(TABLE_COLUMNS, rows)
    lines = [
        f"g={summary.g} n<={summary.n} L={'-' if summary.L is None else summary.L}",
        f"checked {summary.checked} canonical partitions ({summary.ordered} ordered)",
    ]
    if summary.min_epsilon is not None:
        lines.append(f"min epsilon {format_rational(summary.min_epsilon)}"
                     f"  (approx {approx(summary.min_epsilon)})")
        lines.append(f"max epsilon {format_rational(summary.max_epsilon)}"
                     f"  (approx {approx(summary.max_epsilon)})")
    if summary.L is not None:
        bound = lambda_factor(summary.g, summary.L) - 1
        lines.append(f"bound lambda-1 {format_rational(bound)}  (approx {approx(bound)})")
    lines.append(f"violations {len(summary.violations)}"
                 + "".join(f"\n  {format_partition(d)}" for d in summary.violations))
    if not summary.complete:
        lines.append("INCOMPLETE: work budget exhausted")
    return "\n".join(lines) + "\n"


def _summary_code(summary: SweepSummary) -> int:
    if summary.violations:
        return EXIT_VIOLATION
    if not summary.complete:
        return EXIT_BUDGET
    return EXIT_OK


def cmd_verify_bounds(cfg: RunConfig, engine: CorrelatorEngine) -> tuple[str, int]:
    summary = verify_theorem(cfg.g, cfg.n, cfg.L, engine, workers=cfg.workers)
    return _summary_output(summary, cfg.output_format), _summary_code(summary)


def cmd_verify_two_point(cfg: RunConfig, engine: CorrelatorEngine) -> tuple[str, int]:
    summary = verify_two_point(cfg.g, engine)
    return _summary_output(summary, cfg.output_format), _summary_code(summary)


def cmd_lambda_table(cfg: RunConfig, engine: CorrelatorEngine) -> tuple[str, int]:
    rows = []
    for g in range(1, cfg.g + 1):
        for L in range(g):
            lam = lambda_factor(g, L)
            rows.append((g, L, lam))
    if cfg.output_format == "json":
        body = {"rows": [{"g": g, "L": L, "lambda": _json_rational(lam)} for g, L, lam in rows]}
        return json.dumps(body, sort_keys=True) + "\n", EXIT_OK
    if cfg.output_format == "csv":
        return _csv_text(["g", "L", "lambda"],
                         [[g, L, format_rational(lam)] for g, L, lam in rows]), EXIT_OK
    return _text_table(["g", "L", "lambda", "lambda_approx"],
                       [[g, L, format_rational(lam), approx(lam)] for g, L, lam in rows]), EXIT_OK


def cmd_cache_info(cfg: RunConfig, engine: CorrelatorEngine) -> tuple[str, int]:
    cache = engine.cache
    per_genus: dict = {}
    max_n = 0
    for g, parts in cache.table:
        per_genus[g] = per_genus.get(g, 0) + 1
        max_n = max(max_n, len(parts))
    if cfg.output_format == "json":
        body = {"path": cfg.cache_path, "records": len(cache), "max_n": max_n,
                "per_genus": {str(g): c for g, c in sorted(per_genus.items())}}
        return json.dumps(body, sort_keys=True) + "\n", EXIT_OK
    if cfg.output_format == "csv":
        return _csv_text(["g", "records"], sorted(per_genus.items())), EXIT_OK
    lines = [f"{cfg.cache_path}: {len(cache)} records, max n {max_n}"]
    lines += [f"  g={g}: {c}" for g, c in sorted(per_genus.items())]
    return "\n".join(lines) + "\n", EXIT_OK


HANDLERS = {
    "compute": cmd_compute,
    "table": cmd_table,
    "verify-bounds": cmd_verify_bounds,
    "verify-two-point": cmd_verify_two_point,
    "lambda-table": cmd_lambda_table,
    "cache-info": cmd_cache_info,
}


def _partition_arg(text: str) -> tuple:
    try:
        return parse_partition(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--g", type=int, help="genus (max genus for lambda-table)")
    common.add_argument("--n", type=int, help="number of marked points (max n for verify-bounds)")
    common.add_argument("--L", type=int, help="bound on d_1 + ... + d_(n-2)")
    common.add_argument("--d", type=_partition_arg, dest="partition",
                        help="partition as a comma list, e.g. 3,1,0")
    common.add_argument("--format", choices=("text", "csv", "json"), default="text",
                        dest="output_format")
    common.add_argument("--cache", dest="cache_path", metavar="PATH",
                        help="load the memo cache from PATH before and save it after")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--budget", type=int, dest="work_budget", metavar="N",
                        help="cap on newly evaluated recursion nodes per correlator")
    common.add_argument("--output", "-o", metavar="PATH", help="write the result to PATH")

    parser = _Parser(prog="psiclass", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "compute": "exact correlator, floor bracket and epsilon for one partition",
        "table": "epsilon table over canonical partitions of Pi(3g-3+n, n) or Pi_L",
        "verify-bounds": "check epsilon >= lambda(g, L) - 1 on Pi_L for all n <= N",
        "verify-two-point": "check the two-point sandwich bounds at genus g",
        "lambda-table": "lambda(g, L) for all g <= G, L < g",
        "cache-info": "summarize a cache file",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def run(cfg: RunConfig) -> tuple[str, int]:
    cfg.validate()
    cache = MemoCache()
    if cfg.cache_path and os.path.exists(cfg.cache_path):
        cache = load_path(cfg.cache_path)
    elif cfg.command == "cache-info":
        raise UsageError(f"no cache file at {cfg.cache_path}")
    engine = CorrelatorEngine(cache, budget=cfg.work_budget)
    try:
        text, code = HANDLERS[cfg.command](cfg, engine)
    finally:
        if cfg.cache_path and cfg.command != "cache-info":
            save_path(cache, cfg.cache_path)
    return text, code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(**vars(args))
    try:
        text, code = run(cfg)
    except (UsageError, CacheFormatError) as exc:
        print(f"psiclass: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExhausted as exc:
        print(f"psiclass: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    if cfg.output:
        try:
            with open(cfg.output, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"psiclass: error: cannot write {cfg.output}: {exc}", file=sys.stderr)
            return EXIT_USAGE
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
