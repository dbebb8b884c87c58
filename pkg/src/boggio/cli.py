"""Command-line front end: kernel tables, Dirichlet solves and the verification suite."""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from .errors import BoggioError, DomainError, NonConvergence, SlowConvergence
from .kernel import (
    RadialGreenProfile,
    green_tilde,
    green_tilde_fast,
    green_tilde_integral,
    green_tilde_series,
)
from .quadrature import DEFAULT_SPEC, QuadratureSpec
from .solver import SolutionField, SourceFunction, boundary_profile
from .specfun import FracOrder
from .verify import ALIASES, CHECKS, run_checks

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_NONCONVERGENCE = 2
EXIT_USAGE = 64
COMMANDS = ("green-eval", "profile-table", "solve", "verify")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


@dataclass
class RunConfig:
    command: str
    n: int
    s: float
    radii: Optional[list]
    source: Optional[str]
    fmt: str = "csv"
    output: Optional[str] = None
    seed: int = 0
    only: list = field(default_factory=list)
    plot: Optional[str] = None
    rel_tol: Optional[float] = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.n < 1:
            raise UsageError("--n must be a positive integer")
        if not (self.s > 0.0) or math.isinf(self.s):
            raise UsageError("--s must be a finite positive number")
        if self.fmt not in ("csv", "json"):
            raise UsageError("--format must be csv or json")
        for name in self.only:
            if ALIASES.get(name, name) not in CHECKS:
                raise UsageError(f"unknown check {name!r}; choose from {', '.join(CHECKS)}")
        if self.rel_tol is not None and not self.rel_tol > 0.0:
            raise UsageError("--rel-tol must be positive")

    @property
    def spec(self) -> QuadratureSpec:
        return DEFAULT_SPEC if self.rel_tol is None else DEFAULT_SPEC.with_(rel_tol=self.rel_tol)


def _radii(text: str) -> list:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad radius list {text!r}")
    if not vals or any(not math.isfinite(v) or v < 0.0 for v in vals):
        raise argparse.ArgumentTypeError("radii must be finite and non-negative")
    return vals


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="boggio", description="Green function of (-Delta)^s on the unit ball.")
    p.add_argument("--version", action="version", version=f"boggio-kernel {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, default_n=1, default_s=1.5):
        sp.add_argument("--n", type=int, default=default_n, help="dimension (default %(default)s)")
        sp.add_argument("--s", type=float, default=default_s, help="order s > 0 (default %(default)s)")
        sp.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
        sp.add_argument("--output", help="write to this file instead of stdout")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--rel-tol", type=float, dest="rel_tol", help="quadrature relative tolerance")

    for name, help_text in (
        ("green-eval", "compare the integral and series forms of the radial profile"),
        ("profile-table", "tabulate the radial profile and its boundary factor"),
        ("solve", "solve (-Delta)^s u = f with zero exterior data"),
    ):
        sp = sub.add_parser(name, help=help_text)
        common(sp)
        sp.add_argument("--r", type=_radii, dest="radii", help="comma-separated radii")
        sp.add_argument("--plot", help="also render a figure to this path (needs matplotlib)")
        if name == "solve":
            sp.add_argument("--source", default="constant:1",
                            help="constant:c | bump:rho | power:K (default %(default)s)")
    sp = sub.add_parser("verify", help="run the verification suite")
    common(sp)
    sp.add_argument("--only", action="append", default=[],
                    help="restrict to named checks (repeatable or comma-separated)")
    return p


def parse_config(argv) -> RunConfig:
    args = build_parser().parse_args(argv)
    only = [x for item in getattr(args, "only", []) for x in item.split(",") if x]
    return RunConfig(
        command=args.command,
        n=args.n,
        s=args.s,
        radii=getattr(args, "radii", None),
        source=getattr(args, "source", None),
        fmt=args.fmt,
        output=args.output,
        seed=args.seed,
        only=only,
        plot=getattr(args, "plot", None),
        rel_tol=args.rel_tol,
    )


# ----------------------------------------------------------------------------
# evaluation


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("BOGGIO_THREADS", "1")))
    except ValueError:
        return 1


def _parallel_map(fn, items):
    """Map in a thread pool capped by BOGGIO_THREADS; results keep input order."""
    workers = min(_threads(), max(1, len(items)))
    if workers == 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _green_eval_row(cfg: RunConfig, r: float):
    n, order = cfg.n, FracOrder(cfg.s)
    if r >= 1.0:
        return [r, 0.0, 0.0, 0.0]
    if r == 0.0:
        v = 1.0 / (2.0 * order.s - n) if 2.0 * order.s > n else math.inf
        return [r, v, v, 0.0 if math.isfinite(v) else math.nan]
    integral = green_tilde_integral(r, n, order, cfg.spec.with_(rel_tol=min(cfg.spec.rel_tol, 1e-13)))
    try:
        series = float(green_tilde_series(r, RadialGreenProfile.build(n, order.s)))
    except SlowConvergence:
        # the power series cannot reach this radius; use the large-argument expansion
        series = float(green_tilde_fast(r, n, order)[0])
    return [r, integral, series, abs(integral - series)]


def _profile_row(cfg: RunConfig, r: float):
    n, order = cfg.n, FracOrder(cfg.s)
    if r >= 1.0:
        return [r, 0.0, math.nan]
    g = green_tilde(r, n, order)
    return [r, g, g / (1.0 - r * r) ** order.s]


def parse_source(text: str, n: int, order) -> SourceFunction:
    kind, _, arg = (text or "").partition(":")
    try:
        if kind == "constant":
            return SourceFunction.constant(float(arg))
        if kind == "bump":
            return SourceFunction.bump(float(arg))
        if kind == "power":
            if not arg.isdigit():
                raise ValueError(arg)
            return SourceFunction.power(int(arg), n, order)
    except (ValueError, DomainError) as exc:
        raise UsageError(f"bad --source {text!r}: {exc}")
    raise UsageError(f"bad --source {text!r}; use constant:c, bump:rho or power:K")


def _solve_rows(cfg: RunConfig):
    order = FracOrder(cfg.s)
    src = parse_source(cfg.source, cfg.n, order)
    field_ = SolutionField(src, cfg.n, order, cfg.spec)
    radii = cfg.radii if cfg.radii is not None else [round(0.05 * i, 2) for i in range(20)]

    def row(r):
        x = np.zeros(cfg.n)
        x[0] = r
        if r >= 1.0:
            return [r, 0.0, math.nan]
        u = field_(x)
        return [r, u, boundary_profile(field_, x, order)]

    return radii, _parallel_map(row, radii)


# ----------------------------------------------------------------------------
# output


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return "nan"
        return "%.17g" % v
    return str(v)


def _json_value(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else _fmt(v)
    return v


def header(cfg: RunConfig) -> str:
    return f"# boggio-kernel v{__version__} n={cfg.n} s={float(cfg.s)!r}"


def render(cfg: RunConfig, columns, rows) -> str:
    if cfg.fmt == "json":
        payload = {
            "schema": "boggio-kernel",
            "version": __version__,
            "command": cfg.command,
            "n": cfg.n,
            "s": cfg.s,
            "columns": list(columns),
            "rows": [[_json_value(v) for v in row] for row in rows],
        }
        return json.dumps(payload, indent=2) + "\n"
    lines = [header(cfg), ",".join(columns)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def emit(cfg: RunConfig, text: str) -> None:
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _maybe_plot(cfg: RunConfig, columns, rows, y_cols, title):
    if cfg.plot:
        from .plotting import render_table

        render_table(cfg.plot, list(columns), rows, columns[0], y_cols, title)


def cmd_green_eval(cfg: RunConfig) -> int:
    radii = cfg.radii if cfg.radii is not None else [round(0.05 * i, 2) for i in range(1, 20)]
    rows = _parallel_map(lambda r: _green_eval_row(cfg, r), radii)
    cols = ("r", "G_integral", "G_series", "abs_diff")
    emit(cfg, render(cfg, cols, rows))
    _maybe_plot(cfg, cols, rows, ["G_integral", "G_series"], f"radial profile n={cfg.n} s={cfg.s:g}")
    return EXIT_OK


def cmd_profile_table(cfg: RunConfig) -> int:
    radii = cfg.radii if cfg.radii is not None else [round(0.05 * i, 2) for i in range(0, 21)]
    rows = _parallel_map(lambda r: _profile_row(cfg, r), radii)
    cols = ("r", "G_tilde", "G_tilde_over_boundary")
    emit(cfg, render(cfg, cols, rows))
    _maybe_plot(cfg, cols, rows, ["G_tilde", "G_tilde_over_boundary"], f"profile n={cfg.n} s={cfg.s:g}")
    return EXIT_OK


def cmd_solve(cfg: RunConfig) -> int:
    _, rows = _solve_rows(cfg)
    cols = ("r", "u", "u_tilde")
    emit(cfg, render(cfg, cols, rows))
    _maybe_plot(cfg, cols, rows, ["u", "u_tilde"], f"solution n={cfg.n} s={cfg.s:g} f={cfg.source}")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    report = run_checks(cfg.n, cfg.s, cfg.only, cfg.seed)
    if cfg.fmt == "json":
        text = report.to_json({"schema": "boggio-kernel", "version": __version__,
                               "command": "verify", "n": cfg.n, "s": cfg.s})
    else:
        text = header(cfg) + "\n" + report.to_text()
    emit(cfg, text)
    return EXIT_OK if report.passed else EXIT_FAILED


HANDLERS = {
    "green-eval": cmd_green_eval,
    "profile-table": cmd_profile_table,
    "solve": cmd_solve,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = parse_config(argv)
        return HANDLERS[cfg.command](cfg)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    except UsageError as exc:
        sys.stderr.write(f"boggio: error: {exc}\n")
        return EXIT_USAGE
    except (NonConvergence, SlowConvergence) as exc:
        sys.stderr.write(f"boggio: non-convergence: {exc}\n")
        return EXIT_NONCONVERGENCE
    except BoggioError as exc:
        sys.stderr.write(f"boggio: error: {exc}\n")
        return EXIT_FAILED


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
