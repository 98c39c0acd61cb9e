"""Command-line front end.

Subcommands write plotter-ready tables (``potential``, ``kernel``,
``trace``, ``zeta``), a single record (``correction``) or run the oracle
suite (``validate``).  CSV output starts with ``#``-prefixed lines echoing
the configuration; numbers carry 17 significant digits.

Exit codes: 0 success, 1 validation failure, 2 bad flags, 3 numerical
failure (quadrature, convergence or stability).
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .dressing import DressingChain, dressed_potential
from .errors import (
    ConvergenceError,
    DegenerateWronskian,
    DomainError,
    InvalidChain,
    QuadratureFailure,
    StabilityError,
)
from .kink import VARIANTS, kink_kernel
from .transmutation import dressed_kernel
from .zeta import HeatTrace, quantum_correction, zeta_function

_RANGE_FLAGS = ("--x", "--y", "--tau", "--t", "--s")
_NUMERIC_FAILURES = (QuadratureFailure, ConvergenceError, StabilityError, DegenerateWronskian)


class FlagError(Exception):
    pass


def parse_range(text: str) -> np.ndarray:
    """``"min:max:step"`` (inclusive) or a single number."""
    parts = text.split(":")
    try:
        nums = [float(p) for p in parts]
    except ValueError:
        raise FlagError(f"cannot parse range {text!r}; expected min:max:step") from None
    if len(nums) == 1:
        return np.array(nums)
    if len(nums) != 3:
        raise FlagError(f"range {text!r} must have the form min:max:step")
    lo, hi, step = nums
    if not step > 0:
        raise FlagError(f"range step must be positive in {text!r}")
    if hi < lo:
        raise FlagError(f"range {text!r} is empty (max < min)")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(count)


def _join_range_values(argv):
    # argparse refuses option values that start with '-' unless attached with '='
    out = []
    i = 0
    while i < len(argv):
        arg = argv[i]
        if arg in _RANGE_FLAGS and i + 1 < len(argv):
            out.append(f"{arg}={argv[i + 1]}")
            i += 2
            continue
        out.append(arg)
        i += 1
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="darbouxheat",
        description="Dressed heat kernels, heat traces and one-loop zeta corrections.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, chain=False, variant=False, shift=False, scale=False):
        p.add_argument("--m", type=float, default=1.0, help="mass scale (default 1)")
        if chain:
            p.add_argument("--chain", default=None,
                           help="custom chain as parity:b pairs, e.g. cosh:1,sinh:2")
            p.add_argument("--preset", choices=("kink",), default=None,
                           help="named chain; 'kink' is b_k = k m / sqrt(2), N = 2")
        if variant:
            p.add_argument("--variant", choices=VARIANTS, default="exp-corrected")
        if shift:
            p.add_argument("--shift", type=float, default=None,
                           help="subtraction shift (default 4 m^2)")
        if scale:
            p.add_argument("--M", dest="M", type=float, default=1.0, help="zeta mass scale M")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--output", "-o", default="-", help="output path ('-' for stdout)")

    p = sub.add_parser("potential", help="table of x, u[N](x)")
    common(p, chain=True)
    p.add_argument("--x", required=True, help="min:max:step")

    p = sub.add_parser("kernel", help="table of tau, x, y, rho")
    common(p, chain=True, variant=True)
    p.add_argument("--method", choices=("closed-form", "dressed"), default=None,
                   help="kink kernel route (custom chains always use 'dressed')")
    p.add_argument("--tau", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)

    p = sub.add_parser("trace", help="table of t, gamma(t)")
    common(p, variant=True, shift=True)
    p.add_argument("--source", choices=("closed-form", "numeric-diagonal"), default="closed-form")
    p.add_argument("--t", required=True)

    p = sub.add_parser("zeta", help="table of s, zeta(s)")
    common(p, variant=True, shift=True, scale=True)
    p.add_argument("--s", required=True)

    p = sub.add_parser("correction", help="zeta(0), zeta'(0), S_q and error estimate")
    common(p, variant=True, shift=True, scale=True)

    p = sub.add_parser("validate", help="run the oracle and invariant suite")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", "-o", default="-")
    return parser


def _chain(args) -> DressingChain:
    if args.chain is not None and args.preset is not None:
        raise FlagError("--chain and --preset are mutually exclusive")
    if args.chain is not None:
        return DressingChain.parse(args.chain)
    return DressingChain.kink(args.m)


def _config(args) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("output", "format") and v is not None}
    if "shift" in vars(args):
        cfg["shift"] = args.shift if args.shift is not None else 4.0 * args.m ** 2
    return dict(sorted(cfg.items()))


def _fmt(value) -> str:
    return format(float(value), ".17g")


def _render(args, columns, rows) -> str:
    cfg = _config(args)
    if args.format == "json":
        payload = {"command": args.command, "config": cfg, "columns": list(columns),
                   "rows": [[float(v) for v in row] for row in rows]}
        return json.dumps(payload, indent=2) + "\n"
    lines = [f"# darbouxheat {args.command}"]
    lines += [f"# {k}={v}" for k, v in cfg.items()]
    lines.append("# columns=" + ",".join(columns))
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _emit(args, text):
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)


def _cmd_potential(args):
    xs = parse_range(args.x)
    return ("x", "u"), zip(xs, np.atleast_1d(dressed_potential(_chain(args), xs)))


def _cmd_kernel(args):
    chain = _chain(args)
    custom = args.chain is not None
    method = "dressed" if custom else (args.method or "closed-form")
    rows = []
    taus, xs, ys = parse_range(args.tau), parse_range(args.x), parse_range(args.y)
    for tau in taus:
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        if method == "closed-form":
            vals = kink_kernel(tau, gx, gy, args.m, args.variant)
        else:
            vals = dressed_kernel(chain, tau, gx, gy)
        for a, b, v in zip(gx.ravel(), gy.ravel(), np.ravel(vals)):
            rows.append((tau, a, b, v))
    return ("tau", "x", "y", "rho"), rows


def _trace(args, source="closed-form"):
    return HeatTrace.kink(args.m, args.shift, args.variant, source=source)


def _cmd_trace(args):
    ts = parse_range(args.t)
    trace = _trace(args, args.source)
    return ("t", "gamma"), [(t, trace(float(t))) for t in ts]


def _cmd_zeta(args):
    trace = _trace(args)
    return ("s", "zeta"), [(s, zeta_function(trace, s, args.M)) for s in parse_range(args.s)]


def _cmd_correction(args):
    res = quantum_correction(_trace(args), args.M)
    cols = ("zeta0", "zeta_prime0", "S_q", "M", "error")
    return cols, [tuple(res.as_dict()[c] for c in cols)]


def _cmd_validate(args):
    from .validation import run_all

    results = run_all(stream=sys.stderr)
    cols = ("check", "passed", "measured", "threshold")
    if args.format == "json":
        text = json.dumps({"command": "validate", "results": [
            {"check": r.name, "passed": r.passed, "measured": r.measured,
             "threshold": r.threshold, "detail": r.detail} for r in results]}, indent=2) + "\n"
    else:
        lines = ["# darbouxheat validate", "# columns=" + ",".join(cols)]
        # timings go to stderr only, keeping the table deterministic
        lines += [f"{r.name},{int(r.passed)},{_fmt(r.measured)},{_fmt(r.threshold)}"
                  for r in results]
        text = "\n".join(lines) + "\n"
    _emit(args, text)
    return 0 if all(r.passed for r in results) else 1


_COMMANDS = {
    "potential": _cmd_potential,
    "kernel": _cmd_kernel,
    "trace": _cmd_trace,
    "zeta": _cmd_zeta,
    "correction": _cmd_correction,
}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(_join_range_values(argv))
    try:
        if args.command == "validate":
            return _cmd_validate(args)
        if args.m <= 0:
            raise FlagError("--m must be positive")
        columns, rows = _COMMANDS[args.command](args)
        _emit(args, _render(args, columns, list(rows)))
    except (FlagError, InvalidChain, DomainError) as exc:
        parser.print_usage(sys.stderr)
        print(f"darbouxheat: error: {exc}", file=sys.stderr)
        return 2
    except _NUMERIC_FAILURES as exc:
        print(f"darbouxheat: numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
