"""Command line interface.

Exit codes: 0 success (or certified-at-scale), 1 configuration error,
2 non-convergence or numerical breakdown, 3 inconclusive, 4 violated.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .approx import METHODS, sigma_n, weight_fn
from .coefficients import CoefficientError, band_interval, family_preset, load_table
from .contfrac import resolvent_limit
from .criteria import (asymptotic_conditions_check, bounded_weight_criterion, discreteness_check,
                       equicontinuity_diagnostic, gn_derivative_bound, main_estimate_infimum,
                       transfer_lower_bound)
from .oracle import dense_resolvent, kolmogorov_distance, truncation_measure
from .polynomials import NumericalBreakdown
from .reports import jsonable
from .serialize import atomic_write_text, curve_csv, run_metadata, write_curve, write_json

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2
THREADS_ENV = "JACOBISPEC_THREADS"

_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX = re.compile(rf"^(?:(?P<re>[+-]?{_NUM})(?:(?P<im>[+-]{_NUM})i)?|(?P<imag>[+-]?{_NUM})i)$")


class ConfigError(ValueError):
    pass


def parse_complex(text: str) -> complex:
    """Parse ``re+imi`` (``1+2i``, ``-0.5-1e-3i``, ``2i``, ``0.5``)."""
    s = text.strip().replace(" ", "")
    m = _COMPLEX.match(s)
    if not m:
        raise ConfigError(f"cannot parse complex number {text!r}; use the form re+imi")
    if m.group("imag") is not None:
        return complex(0.0, float(m.group("imag")))
    im_part = float(m.group("im")) if m.group("im") is not None else 0.0
    return complex(float(m.group("re")), im_part)


def parse_grid(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"grid {text!r} must have the form lo:hi:count")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(f"grid {text!r} must have the form lo:hi:count") from None
    if count < 1 or not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo:
        raise ConfigError(f"grid {text!r} needs lo <= hi and count >= 1")
    return np.linspace(lo, hi, count)


def parse_window(text: str):
    parts = text.split(":")
    try:
        vals = tuple(int(p) for p in parts)
    except ValueError:
        raise ConfigError(f"window {text!r} must have the form lo:hi or lo:hi:step") from None
    if len(vals) not in (2, 3) or vals[0] < 1 or vals[1] <= vals[0]:
        raise ConfigError(f"window {text!r} needs 1 <= lo < hi")
    return vals


def parse_floats(text: str):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"expected a comma-separated list of numbers, got {text!r}") from None


def parse_family(text: str):
    """``constant:a,b``, ``hermite``, ``power:exponent[,scale]``,
    ``paired:ratio[,scale]``, ``paired-growing``,
    ``saturating:limit,start,rate`` or ``table:path``."""
    name, _, rest = text.partition(":")
    name = name.strip()
    try:
        if name == "table":
            if not rest:
                raise ConfigError("table family needs a path: table:PATH")
            return load_table(rest)
        nums = parse_floats(rest) if rest else []
        if name == "constant":
            keys = ("a", "b")
        elif name == "hermite":
            keys = ()
        elif name == "power":
            keys = ("exponent", "scale")
        elif name == "paired":
            keys = ("ratio", "scale")
        elif name == "paired-growing":
            if nums:
                raise ConfigError("paired-growing takes no parameters")
            return family_preset("paired", ratio=2.0)
        elif name == "saturating":
            keys = ("limit", "start", "rate")
        else:
            raise ConfigError(f"unknown family {name!r}")
        if len(nums) > len(keys):
            raise ConfigError(f"family {name!r} takes at most {len(keys)} parameters")
        return family_preset(name, **dict(zip(keys, nums)))
    except (CoefficientError, OSError) as exc:
        raise ConfigError(str(exc)) from None


def _threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def _config(args) -> dict:
    out = {k: v for k, v in vars(args).items() if k not in ("func",)}
    out["threads"] = _threads()
    return out


def _emit(args, payload: dict) -> None:
    text = json.dumps(jsonable(payload), indent=2) + "\n"
    if getattr(args, "out", None):
        atomic_write_text(args.out, text)
    sys.stdout.write(text)


# ----------------------------------------------------------------- commands


def cmd_resolvent(args) -> int:
    seq = parse_family(args.family)
    lam = parse_complex(args.lam)
    if lam.imag == 0:
        raise ConfigError("Im lambda must be nonzero")
    value, cert = resolvent_limit(seq, lam, tol=args.tol, n_max=args.n_max)
    payload = {"value": value, "certificate": cert.to_dict()}
    if args.oracle_n:
        ref = dense_resolvent(seq, args.oracle_n, lam)
        payload["oracle"] = {"N": args.oracle_n, "value": ref, "abs_diff": abs(ref - value)}
    payload["metadata"] = run_metadata(_config(args))
    _emit(args, payload)
    if not cert.converged:
        print(f"no convergence after {cert.iterations} approximants", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_weights(args) -> int:
    if not args.grid:
        raise ConfigError("weights needs --grid lo:hi:count")
    seq = parse_family(args.family)
    xs = parse_grid(args.grid)
    if args.n < 1:
        raise ConfigError("--n must be >= 1")
    fs = np.atleast_1d(weight_fn(seq, args.n, xs, args.method))
    band = band_interval(seq, args.n)
    base = band.lo if args.base is None else args.base
    sig = sigma_n(seq, args.n, base, xs, tol=args.tol)
    meta = run_metadata(_config(args), n=args.n, band=band.to_dict(), method=args.method,
                        quadrature_error=sig.error_estimate, sigma=sig.to_dict())
    if args.out:
        prefix = Path(args.out)
        write_curve(prefix.with_name(prefix.name + ".weights.csv"), xs, fs, meta)
        write_curve(prefix.with_name(prefix.name + ".sigma.csv"), xs, sig.values, meta)
    else:
        sys.stdout.write(curve_csv(("x", "value"), zip(xs, fs)))
    return EXIT_OK


def cmd_criteria(args) -> int:
    seq = parse_family(args.family)
    name = args.criterion
    window = parse_window(args.window) if args.window else None
    interval = tuple(parse_floats(args.interval)) if args.interval else (-1.0, 1.0)
    if len(interval) != 2 or not interval[0] < interval[1]:
        raise ConfigError("--interval must be lo,hi with lo < hi")
    grid = parse_grid(args.grid) if args.grid else None
    if name == "discreteness":
        rep = discreteness_check(seq, window or (2, 500), margin=args.margin)
    elif name == "bounded-weight":
        rep = bounded_weight_criterion(seq, interval, grid, window or (1, 200))
    elif name == "main-estimate":
        rep = main_estimate_infimum(seq, interval, grid, window or (1, 200))
    elif name == "transfer":
        rep = transfer_lower_bound(seq, args.K, window or (1, 200), grid)
    elif name in ("asymptotic", "thm39"):
        rep = asymptotic_conditions_check(seq, args.n_max)
    elif name == "equicontinuity":
        deltas = parse_floats(args.deltas)
        rep = equicontinuity_diagnostic(seq, interval, window or (1, 200), deltas)
    elif name == "gn-bound":
        rep = gn_derivative_bound(seq, interval, window or (1, 200), grid)
    else:  # pragma: no cover - argparse restricts the choices
        raise ConfigError(f"unknown criterion {name!r}")
    payload = rep.to_dict()
    payload["metadata"] = run_metadata(_config(args))
    _emit(args, payload)
    return rep.exit_code


def cmd_oracle_compare(args) -> int:
    seq = parse_family(args.family)
    xs = parse_grid(args.grid)
    meas = truncation_measure(seq, args.N)
    sig = sigma_n(seq, args.n, float(xs[0]), xs)
    dist = kolmogorov_distance(meas, sig)
    payload = {"N": args.N, "n": args.n, "kolmogorov_distance": dist,
               "truncation_mass": float(meas.weights.sum()),
               "sigma_error_estimate": sig.error_estimate,
               "metadata": run_metadata(_config(args))}
    if args.measure_out:
        atomic_write_text(args.measure_out, meas.to_csv())
        payload["measure_file"] = str(args.measure_out)
    _emit(args, payload)
    return EXIT_OK


def hermite_rows(ns, xs, threads=1):
    """Rows ``(n, x, f_n(x), exp(-x**2)/sqrt(pi), |diff|)``."""
    seq = family_preset("hermite")
    xs = np.asarray(xs, dtype=float)
    target = np.exp(-xs ** 2) / math.sqrt(math.pi)

    def one(n):
        return np.atleast_1d(weight_fn(seq, int(n), xs))

    with ThreadPoolExecutor(max_workers=threads) as pool:
        curves = list(pool.map(one, ns))
    rows = []
    for n, f in zip(ns, curves):
        for x, fx, t in zip(xs, f, target):
            rows.append((float(n), float(x), float(fx), float(t), abs(float(fx) - float(t))))
    return rows


def cmd_hermite_demo(args) -> int:
    ns = [int(v) for v in parse_floats(args.n_values)]
    if any(n < 1 for n in ns):
        raise ConfigError("--n-values must be positive")
    xs = parse_floats(args.x_values)
    rows = hermite_rows(ns, xs, _threads())
    text = curve_csv(("n", "x", "f_n", "target", "abs_diff"), rows)
    if args.out:
        atomic_write_text(args.out, text)
        write_json(Path(args.out).with_name(Path(args.out).name + ".json"),
                   run_metadata(_config(args)))
    sys.stdout.write(text)
    return EXIT_OK


# ----------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="jacobispec",
                                description="Spectral diagnostics for Jacobi matrices.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def family(sp):
        sp.add_argument("--family", required=True,
                        help="constant:a,b | hermite | power:exp[,scale] | paired:ratio[,scale] | "
                             "paired-growing | saturating:limit,start,rate | table:PATH")
        sp.add_argument("--out", help="output file (JSON) or prefix")

    sp = sub.add_parser("resolvent", help="resolvent element by continued fraction")
    family(sp)
    sp.add_argument("--lambda", dest="lam", required=True, help="complex point, e.g. 0+1i")
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--n-max", type=int, default=100_000)
    sp.add_argument("--oracle-n", type=int, default=0, help="also solve the N x N truncation")
    sp.set_defaults(func=cmd_resolvent)

    sp = sub.add_parser("weights", help="approximant density and distribution curves")
    family(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--grid", help="lo:hi:count")
    sp.add_argument("--method", choices=METHODS, default="auto")
    sp.add_argument("--base", type=float, default=None, help="base point of the distribution")
    sp.add_argument("--tol", type=float, default=1e-12)
    sp.set_defaults(func=cmd_weights)

    sp = sub.add_parser("criteria", help="finite-window spectral criteria")
    sp.add_argument("criterion", choices=["discreteness", "bounded-weight", "main-estimate",
                                          "transfer", "asymptotic", "thm39", "equicontinuity",
                                          "gn-bound"],
                    help="thm39 is an alias of asymptotic")
    family(sp)
    sp.add_argument("--window", help="lo:hi[:step] index window")
    sp.add_argument("--interval", help="lo,hi")
    sp.add_argument("--grid", help="lo:hi:count evaluation grid")
    sp.add_argument("--n-max", type=int, default=2000)
    sp.add_argument("--K", type=float, default=1.0)
    sp.add_argument("--margin", type=float, default=0.01)
    sp.add_argument("--deltas", default="0.01,0.05,0.1")
    sp.set_defaults(func=cmd_criteria)

    sp = sub.add_parser("oracle-compare", help="truncation measure against the approximant distribution")
    family(sp)
    sp.add_argument("--N", type=int, default=2000)
    sp.add_argument("--n", type=int, default=100)
    sp.add_argument("--grid", required=True, help="lo:hi:count")
    sp.add_argument("--measure-out", help="write the truncation measure as lambda,weight CSV")
    sp.set_defaults(func=cmd_oracle_compare)

    sp = sub.add_parser("hermite-demo", help="Hermite densities against the Gaussian limit")
    sp.add_argument("--n-values", default="100,1000,10000")
    sp.add_argument("--x-values", default="-1,-0.5,0,0.5,1")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_hermite_demo)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on bad usage; the contract reserves 2 for numerics
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (ConfigError, CoefficientError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalBreakdown, ZeroDivisionError, FloatingPointError) as exc:
        print(f"numerical breakdown: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
