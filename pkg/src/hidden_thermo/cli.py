"""Command-line interface: ``hidden-thermo {verify,sweep,moments,sample,fluct}``.

Exit codes: 0 success, 1 runtime or I/O failure (including failed checks),
2 usage or domain error.
"""
from __future__ import annotations

import argparse
import contextlib
import math
import sys
import warnings
from dataclasses import dataclass

import numpy as np

from . import fluctuations as fl
from . import juttner as ju
from . import thermodynamics as th
from .numerics import ConvergenceError, DomainError, RandomStream
from .verification import DEFAULT_SEED, SUITES, ReportRow, Status, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _seed(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number {text!r}") from None
    if not (math.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError("must be a positive finite number")
    return v


@contextlib.contextmanager
def _open_out(path: str):
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="\n", encoding="ascii") as fh:
            yield fh


def _print_rows(rows: list[ReportRow], out) -> bool:
    for r in rows:
        print(r.format(), file=out)
    n_fail = sum(r.status is Status.FAIL for r in rows)
    print(f"# {len(rows)} checks, {n_fail} failed", file=out)
    return n_fail == 0


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepRequest:
    alpha0: float
    kappa: float | None  # fixed kappa, or None to derive it from alpha_T
    alpha_T: float
    theta_min: float
    theta_max: float
    points: int
    scale: str
    out_path: str

    def __post_init__(self):
        if not self.theta_min < self.theta_max:
            raise UsageError("--theta-min must be below --theta-max")
        if self.points < 2:
            raise UsageError("--points must be >= 2")
        if self.scale not in ("log", "linear"):
            raise UsageError("--scale must be log or linear")


def cmd_verify(args, out) -> int:
    print(f"# verify suite={args.suite} seed={args.seed:#x} n={args.n}", file=out)
    rows = run_suite(args.suite, args.seed, args.n)
    return EXIT_OK if _print_rows(rows, out) else EXIT_FAIL


def sweep_rows(req: SweepRequest):
    hidden = ju.JuttnerDist(req.alpha0)
    eps0 = 4.0 / 3.0 * ju.mass_moments(hidden).mean_mass
    kappa = req.kappa if req.kappa is not None else fl.kappa_stats(fl.ThermalJuttner(req.alpha_T)).kappa
    tm = th.ThermoModel(eps0, kappa)
    space = np.geomspace if req.scale == "log" else np.linspace
    t = space(req.theta_min, req.theta_max, req.points)
    e = th.mean_energy(tm, t * eps0) / eps0
    cv = th.heat_capacity(tm, t * eps0)
    return tm, list(zip(t, e, cv))


def cmd_sweep(args, out) -> int:
    if args.kappa is not None and args.alpha_t is not None:
        raise UsageError("--kappa and --alpha-t are mutually exclusive")
    req = SweepRequest(
        alpha0=args.alpha0,
        kappa=args.kappa,
        alpha_T=args.alpha_t if args.alpha_t is not None else 1e-3,
        theta_min=args.theta_min,
        theta_max=args.theta_max,
        points=args.points,
        scale=args.scale,
        out_path=args.out,
    )
    if req.alpha0 > th.ALPHA_WARN:
        print(f"# warning: alpha0 = {req.alpha0} > {th.ALPHA_WARN}; lowest-order law is inaccurate", file=sys.stderr)
    tm, rows = sweep_rows(req)
    with _open_out(req.out_path) as fh:
        fh.write("theta_over_eps0,mean_Ek_over_eps0,c_V\n")
        for t, e, cv in rows:
            fh.write(f"{_fmt(t)},{_fmt(e)},{_fmt(cv)}\n")
    if req.out_path != "-":
        print(f"# wrote {len(rows)} rows to {req.out_path} (kappa={_fmt(tm.kappa)}, "
              f"kappa_tilde={_fmt(tm.kappa_tilde)}, eps0={_fmt(tm.epsilon0)} m0c^2)", file=out)
    return EXIT_OK


def cmd_moments(args, out) -> int:
    d = ju.JuttnerDist(args.alpha0)
    mm = ju.mass_moments(d)
    q1 = ju.juttner_expect(d, lambda g: g)
    q2 = ju.juttner_expect(d, lambda g: g * g)
    rows = [
        ("alpha0", d.alpha),
        ("mean_mass", mm.mean_mass),
        ("mean_mass_sq", mm.mean_mass_sq),
        ("ratio", mm.ratio),
        ("ratio_minus_4/3", mm.ratio - 4.0 / 3.0),
        ("quad_rel_delta_mean_mass", abs(mm.mean_mass - q1) / q1),
        ("quad_rel_delta_mean_mass_sq", abs(mm.mean_mass_sq - q2) / q2),
    ]
    for name, v in rows:
        print(f"{name:<28} {_fmt(v)}", file=out)
    return EXIT_OK


def cmd_sample(args, out) -> int:
    d = ju.JuttnerDist(args.alpha0)
    g = ju.sample_gamma(d, RandomStream(args.seed), args.n)
    with _open_out(args.out) as fh:
        fh.write("gamma\n")
        fh.write("".join(f"{_fmt(x)}\n" for x in g))
    if args.out != "-":
        print(f"# wrote {args.n} samples to {args.out} (alpha={_fmt(d.alpha)}, seed={args.seed:#x})", file=out)
    return EXIT_OK


def parse_thermal(spec: str) -> fl.ThermalDist:
    """Parse ``juttner:<alpha_T>`` or ``delta:<gamma_T>``."""
    kind, _, value = spec.partition(":")
    try:
        x = float(value)
    except ValueError:
        raise UsageError(f"malformed thermal spec {spec!r}") from None
    try:
        if kind == "juttner":
            return fl.ThermalJuttner(x)
        if kind == "delta":
            return fl.PointMass(x)
    except DomainError as exc:
        raise UsageError(f"invalid thermal spec {spec!r}: {exc}") from None
    raise UsageError(f"unknown thermal law {kind!r} (use juttner:<alpha_T> or delta:<gamma_T>)")


def cmd_fluct(args, out) -> int:
    td = parse_thermal(args.td)
    if args.n < 1000:
        raise UsageError("--n must be >= 1000 for Monte Carlo moments")
    hidden = ju.JuttnerDist(args.alpha0)
    exact = fl.thermal_variance_exact(hidden, td)
    m = ju.mass_moments(hidden).mean_mass
    x1, _ = fl.excess_moments(td)
    zeroth = 0.0 if x1 == 0 else fl.thermal_variance_zeroth(fl.kappa_stats(td).kappa, m * x1, m)
    est = fl.monte_carlo_moments(hidden, td, RandomStream(args.seed), args.n)
    print(f"# fluct alpha0={_fmt(hidden.alpha)} td={args.td} n={args.n} seed={args.seed:#x}", file=out)
    rows = [
        ReportRow.check("MC variance vs exact (5 se)", est.variance, exact, 5 * est.se_variance),
        ReportRow.check("MC mean vs m x1 (5 se)", est.mean, m * x1, 5 * est.se_mean),
        ReportRow.check("zeroth-order vs exact (rel, 5 alpha0)",
                        0.0 if exact == 0 else abs(zeroth - exact) / exact, 0.0, 5 * hidden.alpha,
                        warn_only=True),
    ]
    print(f"variance_exact   {_fmt(exact)}", file=out)
    print(f"variance_zeroth  {_fmt(zeroth)}", file=out)
    print(f"variance_mc      {_fmt(est.variance)} +- {_fmt(est.se_variance)}", file=out)
    print(f"mean_mc          {_fmt(est.mean)} +- {_fmt(est.se_mean)}", file=out)
    return EXIT_OK if _print_rows(rows, out) else EXIT_FAIL


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hidden-thermo", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run the self-check suites")
    v.add_argument("--suite", choices=SUITES, default="all")
    v.add_argument("--seed", type=_seed, default=DEFAULT_SEED)
    v.add_argument("--n", type=_positive_int, default=1_000_000, help="Monte Carlo sample size")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep", help="mean energy and heat capacity on a temperature grid (CSV)")
    s.add_argument("--alpha0", type=_positive_float, default=0.01)
    s.add_argument("--alpha-t", type=_positive_float, default=None,
                   help="derive kappa from a Juttner law for gamma_T (default 1e-3)")
    s.add_argument("--kappa", type=float, default=None, help="fixed kappa >= 0")
    s.add_argument("--theta-min", type=_positive_float, default=0.05, help="in units of eps0")
    s.add_argument("--theta-max", type=_positive_float, default=50.0, help="in units of eps0")
    s.add_argument("--points", type=int, default=200)
    s.add_argument("--scale", choices=("log", "linear"), default="log")
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_sweep)

    m = sub.add_parser("moments", help="hidden mass moments and their quadrature cross-check")
    m.add_argument("--alpha0", type=float, required=True)
    m.set_defaults(func=cmd_moments)

    sa = sub.add_parser("sample", help="draw hidden Lorentz factors (CSV)")
    sa.add_argument("--alpha0", type=float, required=True)
    sa.add_argument("--n", type=int, required=True)
    sa.add_argument("--seed", type=_seed, default=DEFAULT_SEED)
    sa.add_argument("--out", default="-")
    sa.set_defaults(func=cmd_sample)

    f = sub.add_parser("fluct", help="energy variance: exact, lowest order and Monte Carlo")
    f.add_argument("td", nargs="?", default="juttner:0.01", help="juttner:<alpha_T> or delta:<gamma_T>")
    f.add_argument("--alpha0", type=_positive_float, default=0.1)
    f.add_argument("--n", type=_positive_int, default=1_000_000)
    f.add_argument("--seed", type=_seed, default=DEFAULT_SEED)
    f.set_defaults(func=cmd_fluct)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if getattr(args, "n", 1) < 1:
            raise UsageError("--n must be a positive integer")
        if getattr(args, "kappa", None) is not None and not (math.isfinite(args.kappa) and args.kappa >= 0):
            raise UsageError("--kappa must be a finite number >= 0")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", th.ZerothOrderWarning)
            return args.func(args, out)
    except (UsageError, DomainError) as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ConvergenceError, ju.TabulationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
