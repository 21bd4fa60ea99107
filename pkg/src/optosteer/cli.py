"""Command-line front end.

    optosteer sweep   [--config PATH] [--r-min R] [--r-max R] [--steps N] [--out CSV]
    optosteer windows [--csv CSV | sweep options] [--predicate P ...]
    optosteer steer   CM_FILE -x 0 1 -y 2
    optosteer check   [CM_FILE] [--config PATH] [--r R]

Exit codes: 0 success, 2 config/parse error, 3 numerical failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import constants as tol
from .errors import NumericalError, ParseError, UnknownColumn, UnknownPredicate
from .linalg import (
    CovarianceMatrix,
    lyapunov_residual,
    physicality_margin,
    read_cm,
    solve_lyapunov,
    symplectic_eigenvalues,
)
from .model import Config, NoiseConvention, build_system, check_stability, read_config
from .steering import Partition, classify_values, gaussian_steering
from .sweep import SweepConfig, emit_csv, emit_plot_script, find_windows, read_csv, run_sweep

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4

DEFAULT_PREDICATES = ["genuine_tripartite", "one_way(ab)", "two_way(ab)",
                      "one_way(ab_c)", "one_way(ac_b)", "one_way(bc_a)"]


class _Failure(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _common_parser(defaults=True) -> argparse.ArgumentParser:
    # Global flags are accepted before or after the subcommand. The copy
    # attached to each subcommand suppresses its defaults so it cannot
    # overwrite values given in front of the subcommand.
    def d(value):
        return value if defaults else argparse.SUPPRESS

    p = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    p.add_argument("--config", default=d(None), help="key = value parameter file (SI units)")
    p.add_argument("--noise-convention", choices=["physical", "paper-literal"], default=d(None),
                   help="optical diffusion blocks (default: physical)")
    p.add_argument("--out", default=d(None), help="output path")
    p.add_argument("--r-min", type=float, default=d(0.0))
    p.add_argument("--r-max", type=float, default=d(2.0))
    p.add_argument("--steps", type=int, default=d(401))
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="optosteer", parents=[_common_parser()], allow_abbrev=False,
        description="Gaussian steering in a two-cavity optomechanical system.")
    common = _common_parser(defaults=False)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("sweep", parents=[common], help="sweep the squeezing parameter")
    sp.add_argument("--plot-script", help="where to write the plotting script "
                    "(default: plot_<csv stem>.py next to the CSV)")
    sp.add_argument("--workers", type=int, default=1)

    wp = sub.add_parser("windows", parents=[common],
                        help="r intervals where a predicate holds")
    wp.add_argument("--csv", help="read rows from an existing sweep CSV")
    wp.add_argument("--predicate", action="append",
                    help="genuine_tripartite | one_way(P) | two_way(P) | no_way(P) | "
                         "positive(COLUMN); P in ab, ab_c, ac_b, bc_a. Repeatable.")

    st = sub.add_parser("steer", parents=[common], help="steering of a CM file")
    st.add_argument("cm_file")
    st.add_argument("-x", "--x-modes", type=int, nargs="+", required=True,
                    help="steering party (mode indices)")
    st.add_argument("-y", "--y-modes", type=int, nargs="+", required=True,
                    help="steered party (mode indices)")

    ck = sub.add_parser("check", parents=[common], help="physicality and solver diagnostics")
    ck.add_argument("cm_file", nargs="?")
    ck.add_argument("--r", type=float, help="squeezing for the model run (default: config r)")
    return parser


def _load_config(args) -> Config:
    cfg = read_config(args.config) if args.config else Config()
    if args.noise_convention:
        cfg = replace(cfg, noise_convention=NoiseConvention.parse(args.noise_convention))
    return cfg


def _sweep_config(args, default_out="sweep.csv") -> SweepConfig:
    cfg = _load_config(args)
    try:
        return SweepConfig(cfg.params, args.r_min, args.r_max, args.steps,
                           cfg.noise_convention, args.out or default_out)
    except ValueError as exc:
        raise _Failure(EXIT_CONFIG, str(exc))


def _print_windows(rows, predicates, out):
    for pred in predicates:
        win = find_windows(rows, pred)
        spans = ", ".join(f"[{lo:.4g}, {hi:.4g}]" for lo, hi in win.intervals) or "none"
        print(f"{win.quantity}: {spans}", file=out)


def cmd_sweep(args, out=sys.stdout) -> int:
    cfg = _sweep_config(args)
    rows = run_sweep(cfg, workers=args.workers)
    csv_path = Path(cfg.output_path)
    emit_csv(rows, csv_path)
    script = Path(args.plot_script) if args.plot_script else \
        csv_path.with_name(f"plot_{csv_path.stem}.py")
    emit_plot_script(rows, script, csv_path)
    bad = [row for row in rows if not row.ok]
    print(f"wrote {len(rows)} rows to {csv_path} ({len(bad)} flagged)", file=out)
    print(f"wrote plot script {script}", file=out)
    _print_windows(rows, ["genuine_tripartite"], out)
    return EXIT_NUMERIC if bad and cfg.noise_convention is NoiseConvention.PHYSICAL else EXIT_OK


def cmd_windows(args, out=sys.stdout) -> int:
    rows = read_csv(args.csv) if args.csv else run_sweep(_sweep_config(args))
    if not rows:
        raise _Failure(EXIT_CONFIG, "no rows")
    _print_windows(rows, args.predicate or DEFAULT_PREDICATES, out)
    return EXIT_OK


def cmd_steer(args, out=sys.stdout) -> int:
    cm = read_cm(args.cm_file)
    try:
        part = Partition(tuple(args.x_modes), tuple(args.y_modes))
        part.validate(cm.n_modes)
    except ValueError as exc:
        raise _Failure(EXIT_CONFIG, f"bad partition: {exc}")
    fwd = gaussian_steering(cm, part)
    back = gaussian_steering(cm, part.swapped())
    x = ",".join(map(str, part.steering_modes))
    y = ",".join(map(str, part.steered_modes))
    for label, sv in ((f"({x})->({y})", fwd), (f"({y})->({x})", back)):
        nus = " ".join(f"{v:.10g}" for v in sv.nu_bar)
        print(f"G{label} = {sv.value:.10g} nats   nu_bar = [{nus}]", file=out)
    print(f"class: {classify_values(fwd.value, back.value).value}", file=out)
    return EXIT_OK


def _report_cm(cm: CovarianceMatrix, out) -> bool:
    ok = True
    sym = cm.matrix
    asym = float(np.max(np.abs(sym - sym.T)))
    if asym > tol.SYMMETRY_TOL * max(1.0, float(np.max(np.abs(sym)))):
        print(f"symmetry: FAIL (max |s - s^T| = {asym:.3g})", file=out)
        cm = CovarianceMatrix(0.5 * (sym + sym.T), cm.convention)
        ok = False
    margin = physicality_margin(cm)
    phys = margin >= -tol.PHYSICALITY_TOL
    ok &= phys
    print(f"physicality margin min eig(s + i Omega/2) = {margin:.6g}  "
          f"[{'ok' if phys else 'Unphysical'}]", file=out)
    try:
        nu = symplectic_eigenvalues(cm.normalized(), cm.n_modes)
        print("symplectic spectrum of 2s: " + " ".join(f"{v:.10g}" for v in nu), file=out)
        if nu[-1] < 1 - 1e-8:
            ok = False
    except NumericalError as exc:
        print(f"symplectic spectrum of 2s: unavailable ({exc})", file=out)
        ok = False
    return ok


def cmd_check(args, out=sys.stdout) -> int:
    if args.cm_file:
        cm = read_cm(args.cm_file)
        print(f"{args.cm_file}: {cm.n_modes} modes", file=out)
        print("stability: n/a (no drift matrix)", file=out)
        print("Lyapunov residual: n/a", file=out)
        ok = _report_cm(cm, out)
    else:
        cfg = _load_config(args)
        params = cfg.params if args.r is None else cfg.params.with_r(args.r)
        k, n = build_system(params, cfg.noise_convention)
        rep = check_stability(k)
        print(f"model at r = {params.r:g}, noise convention {cfg.noise_convention.value}", file=out)
        print(f"stability: {'stable' if rep.stable else 'NOT STABLE'} "
              f"(max Re eig K = {rep.max_real_part:.6g} rad/s)", file=out)
        if not rep.stable:
            return EXIT_NUMERIC
        sigma = solve_lyapunov(k, n)
        res = lyapunov_residual(k, sigma, n)
        print(f"Lyapunov residual ||K s + s K^T + N|| / ||N|| = {res:.3g}", file=out)
        ok = _report_cm(CovarianceMatrix(sigma), out) and res <= tol.LYAPUNOV_RTOL
    print("all checks passed" if ok else "CHECK FAILED", file=out)
    return EXIT_OK if ok else EXIT_NUMERIC


COMMANDS = {"sweep": cmd_sweep, "windows": cmd_windows, "steer": cmd_steer, "check": cmd_check}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args, out=out)
    except _Failure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except NumericalError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ParseError, UnknownPredicate, UnknownColumn, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
