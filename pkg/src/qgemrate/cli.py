"""Command-line interface: ``qgemrate {rate,figure,verify,witness,simulate}``.

Exit codes: 0 success, 1 runtime or verification failure, 2 usage error.
Options may also come from ``--config FILE`` (flat ``key = value`` lines,
keys are long option names); explicit flags win over the file.
"""
from __future__ import annotations

import argparse
import math
import re
import sys
from pathlib import Path

import numpy as np

from .chart import chart_from_rows
from .dipole import DipoleGeometry, DipoleParams
from .quadrature import QuadratureSpec, rate_by_quadrature
from .rates import rate_closed_form, rate_general
from . import states
from .states import BASIS_LABELS, concurrence, parse_state_spec, witness
from .sweeps import FIGURES, METHODS, Grid, SweepConfig, figure_rows, witness_rows, write_csv
from .timedomain import TimeDomainError, TimeDomainSpec, simulate_time_domain
from .verify import run_all

def parse_angle(text: str) -> float:
    try:
        return states.parse_angle(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _floats(text: str, conv=float):
    try:
        return tuple(conv(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _angles(text: str):
    return tuple(parse_angle(x) for x in text.split(",") if x.strip())


def _vector(text: str):
    v = _floats(text)
    if len(v) != 3:
        raise argparse.ArgumentTypeError(f"expected x,y,z, got {text!r}")
    n = math.sqrt(sum(x * x for x in v))
    if n == 0:
        raise argparse.ArgumentTypeError("zero vector")
    return tuple(x / n for x in v)


def _grid_size(text: str):
    m = re.fullmatch(r"\s*(\d+)\s*[xX]\s*(\d+)\s*", text)
    if not m:
        raise argparse.ArgumentTypeError(f"expected NxM, got {text!r}")
    return int(m.group(1)), int(m.group(2))


def _range(text: str):
    v = _floats(text)
    if len(v) != 3:
        raise argparse.ArgumentTypeError(f"expected start,stop,count, got {text!r}")
    return v[0], v[1], int(v[2])


def _add_geometry(p):
    g = p.add_argument_group("geometry")
    g.add_argument("--sep-direction", type=_vector, default=(1.0, 0.0, 0.0), help="unit separation direction x,y,z")
    g.add_argument("--axis", type=_vector, default=(0.0, 0.0, 1.0), help="spin quantization axis x,y,z")
    g.add_argument("--g-factor", type=float, default=2.0)


def _geometry(args, kd=0.0):
    return DipoleGeometry(kd, np.array(args.sep_direction), np.array(args.axis))


def _td_spec(args) -> TimeDomainSpec:
    return TimeDomainSpec(
        n_k=args.n_k,
        detuning_window=args.detuning_window,
        n_polar=args.td_grid[0],
        n_azimuth=args.td_grid[1],
        horizon=args.horizon,
        n_samples=args.samples,
        fit_window=tuple(args.fit_window),
        rate_scale=args.rate_scale,
        integrator=args.integrator,
    )


def _add_time_domain(p):
    t = p.add_argument_group("time domain")
    d = TimeDomainSpec()
    t.add_argument("--n-k", type=int, default=d.n_k, help="wavenumbers across the band")
    t.add_argument("--detuning-window", type=float, default=d.detuning_window, help="band half-width / k")
    t.add_argument("--td-grid", type=_grid_size, default=(d.n_polar, d.n_azimuth), help="angular grid NxM")
    t.add_argument("--horizon", type=float, default=d.horizon, help="total time in units of 1/(ck)")
    t.add_argument("--samples", type=int, default=d.n_samples)
    t.add_argument("--fit-window", type=_floats, default=d.fit_window, help="t1,t2 as fractions of the horizon")
    t.add_argument("--rate-scale", type=float, default=d.rate_scale)
    t.add_argument("--integrator", choices=("exact", "rk4"), default=d.integrator)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qgemrate", description="Photon emission rates of two-spin states.")
    parser.add_argument("--config", help="flat key = value file with defaults for long options")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rate", help="rate of a single state")
    p.add_argument("--state", required=True, help="qgem:<phase>[,placement=..], (1)..(5), or 8 reals")
    p.add_argument("--kd", type=float, required=True)
    p.add_argument("--method", choices=METHODS, default="general")
    p.add_argument("--grid", type=_grid_size, default=(64, 128), help="quadrature grid NxM")
    p.add_argument("--csv", help="also write the result as a one-row CSV")
    _add_geometry(p)
    _add_time_domain(p)

    p = sub.add_parser("figure", help="CSV for one figure sweep")
    p.add_argument("name", choices=sorted(FIGURES))
    p.add_argument("--out", help="CSV path (default <name>.csv)")
    p.add_argument("--chart", nargs="?", const="", default=None, help="also write an SVG chart (optional path)")
    p.add_argument("--kd-values", type=_floats, default=None, help="fixed kd values for fig1a")
    p.add_argument("--phases", type=_angles, default=None, help="fixed phases for fig1b/fig2, e.g. 0,pi/2,pi")
    p.add_argument("--kd-range", type=_range, default=(0.0, 20.0, 401), help="start,stop,count")
    p.add_argument("--phi-count", type=int, default=65)
    p.add_argument("--log", action="store_true", help="logarithmic kd grid")
    p.add_argument("--no-roots", action="store_true", help="do not add phase-independent kd points")
    p.add_argument("--method", choices=METHODS, default="closed-form")
    p.add_argument("--grid", type=_grid_size, default=(64, 128))
    p.add_argument("--workers", type=int, default=1)
    _add_geometry(p)
    _add_time_domain(p)

    p = sub.add_parser("verify", help="cross-check analytic rates against the oracles")
    p.add_argument("--quadrature", type=_grid_size, default=(64, 128), help="grid NxM")
    p.add_argument("--time-domain", action="store_true", help="also run the time-domain checks")
    p.add_argument("--tol-general", type=float, default=1e-12)
    p.add_argument("--tol-quadrature", type=float, default=1e-8)
    p.add_argument("--tol-time", type=float, default=0.05)
    p.add_argument("--phi-count", type=int, default=16)
    p.add_argument("--kd-count", type=int, default=16)
    _add_time_domain(p)

    p = sub.add_parser("witness", help="witness and concurrence over a phase grid")
    p.add_argument("--phi-count", type=int, default=65)
    p.add_argument("--out", help="CSV path (default stdout)")

    p = sub.add_parser("simulate", help="time-domain emission trace")
    p.add_argument("--state", required=True)
    p.add_argument("--kd", type=float, required=True)
    p.add_argument("--out", help="trace CSV path")
    _add_geometry(p)
    _add_time_domain(p)
    return parser


def read_config(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def apply_config(parser, config: dict) -> None:
    """Install config values as defaults on every subcommand that has that option."""
    for sub in parser._subparsers._group_actions[0].choices.values():
        defaults = {}
        for action in sub._actions:
            if action.dest not in config:
                continue
            value = config[action.dest]
            if action.type is not None:
                value = action.type(value)
            elif isinstance(action.default, bool):
                value = value.lower() in ("1", "true", "yes", "on")
            defaults[action.dest] = value
            action.required = False
        sub.set_defaults(**defaults)


def _cmd_rate(args, out) -> int:
    state = parse_state_spec(args.state)
    geom = _geometry(args, args.kd)
    params = DipoleParams(g_factor=args.g_factor)
    if args.method == "closed-form":
        if state.phase is None:
            raise ValueError("closed-form needs a qgem:<phase> state")
        result = rate_closed_form(state.phase, args.kd)
    elif args.method == "general":
        result = rate_general(state, geom, params)
    elif args.method == "quadrature":
        result = rate_by_quadrature(state, geom, QuadratureSpec(*args.grid), params)
    else:
        trace = simulate_time_domain(state, geom, _td_spec(args), params)
        result = None
        total = trace.slope_r0
    if result is not None:
        total = result.total
    print(f"R/R0 = {total!r}", file=out)
    print(f"method = {args.method}  kd = {args.kd!r}", file=out)
    if result is not None and result.channels:
        print("channel  diagonal               cross", file=out)
        for c in result.channels:
            print(f"{BASIS_LABELS[c.final]:<8} {c.diagonal!r:<22} {c.cross!r}", file=out)
    if result is not None and result.error_estimate is not None:
        print(f"error estimate = {result.error_estimate:.3g}", file=out)
    print(f"witness = {witness(state)!r}", file=out)
    print(f"concurrence = {concurrence(state)!r}", file=out)
    if args.csv:
        write_csv(args.csv, ("state", "kd", "method", "R_over_R0"), [(args.state, float(args.kd), args.method, float(total))])
    return 0


def _cmd_figure(args, out) -> int:
    start, stop, count = args.kd_range
    cfg = SweepConfig(
        phi_grid=Grid(0.0, 2 * math.pi, args.phi_count),
        kd_grid=Grid(start, stop, count, log=args.log),
        fixed_kd=args.kd_values if args.kd_values else SweepConfig.fixed_kd,
        phases=args.phases,
        method=args.method,
        geometry=_geometry(args),
        params=DipoleParams(g_factor=args.g_factor),
        quadrature=QuadratureSpec(*args.grid),
        time_domain=_td_spec(args),
        include_roots=not args.no_roots,
        workers=args.workers,
    )
    header, rows = figure_rows(args.name, cfg)
    path = Path(args.out or f"{args.name}.csv")
    try:
        write_csv(path, header, rows)
        if args.chart is not None:
            chart = Path(args.chart) if args.chart else path.with_suffix(".svg")
            chart.write_text(chart_from_rows(header, rows, args.name), encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {len(rows)} rows to {path}", file=out)
    return 0


def _cmd_verify(args, out) -> int:
    results = run_all(
        quadrature=QuadratureSpec(*args.quadrature),
        time_domain=args.time_domain,
        td_spec=_td_spec(args),
        tol_general=args.tol_general,
        tol_quadrature=args.tol_quadrature,
        tol_time=args.tol_time,
        n_phi=args.phi_count,
        n_kd=args.kd_count,
    )
    ok = True
    for r in results:
        print(r.summary(), file=out)
        if not r.passed:
            ok = False
            for dev, desc in r.worst:
                print(f"    {dev:.3g}  {desc}", file=out)
    return 0 if ok else 1


def _cmd_witness(args, out) -> int:
    header, rows = witness_rows(Grid(0.0, 2 * math.pi, args.phi_count))
    if args.out:
        try:
            write_csv(args.out, header, rows)
        except OSError as exc:
            print(f"error: cannot write output: {exc}", file=sys.stderr)
            return 1
    else:
        write_csv(out, header, rows)
    return 0


def _cmd_simulate(args, out) -> int:
    state = parse_state_spec(args.state)
    trace = simulate_time_domain(state, _geometry(args, args.kd), _td_spec(args), DipoleParams(g_factor=args.g_factor))
    print(f"slope = {trace.slope!r}  R/R0 = {trace.slope_r0!r}  residual = {trace.residual:.3g}", file=out)
    print(f"P(T) = {float(trace.probability[-1])!r}", file=out)
    if args.out:
        try:
            trace.to_csv(args.out)
        except OSError as exc:
            print(f"error: cannot write output: {exc}", file=sys.stderr)
            return 1
    return 0


COMMANDS = {
    "rate": _cmd_rate,
    "figure": _cmd_figure,
    "verify": _cmd_verify,
    "witness": _cmd_witness,
    "simulate": _cmd_simulate,
}


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        try:
            apply_config(parser, read_config(known.config))
        except (OSError, ValueError, argparse.ArgumentTypeError) as exc:
            parser.error(f"bad config file: {exc}")
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args, out)
    except (ValueError, TimeDomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
