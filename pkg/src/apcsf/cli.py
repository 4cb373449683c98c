"""Command-line driver: ``apcsf {evolve,converge,area-loss,check}``.

Exit codes: 0 success, 1 I/O error, 2 configuration error, 3 degenerate
polygon, 4 linear-solver failure, 5 self-check failure.
"""

import argparse
import logging
import math
import os
import sys
import tempfile

import numpy as np

from . import analysis, checks
from . import fullydiscrete as fd
from . import semidiscrete as sd
from .curves import interpolate, parse_curve, uniform_grid
from .errors import ConfigError, DegenerateEdge, SingularSystem
from .geometry import TWO_PI, shoelace_area
from .trajectory import DIAGNOSTIC_COLUMNS

log = logging.getLogger("apcsf")

EXIT_OK, EXIT_IO, EXIT_CONFIG, EXIT_DEGENERATE, EXIT_SOLVER, EXIT_SUITE = 0, 1, 2, 3, 4, 5


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------

def _period(text):
    if text.lower() in ("2pi", "2*pi"):
        return TWO_PI
    try:
        val = float(text)
    except ValueError:
        raise ConfigError("period", f"expected '2pi' or a positive number, got {text!r}") from None
    if not val > 0:
        raise ConfigError("period", "must be positive")
    return val


def _tau(text):
    if text == "auto":
        return "auto"
    try:
        val = float(text)
    except ValueError:
        raise ConfigError("tau", f"expected 'auto' or a decimal, got {text!r}") from None
    if not (val > 0 and math.isfinite(val)):
        raise ConfigError("tau", "must be positive")
    return val


def _n_list(text):
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError("n-list", f"expected comma-separated integers, got {text!r}") from None
    try:
        return analysis.check_doubling(vals)
    except ValueError as exc:
        raise ConfigError("n-list", str(exc)) from None


def _positive(name, val):
    if not (val > 0 and math.isfinite(val)):
        raise ConfigError(name, f"must be positive, got {val!r}")
    return val


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def write_atomic(path, text):
    """Write via a temporary file in the target directory, then rename."""
    if path == "-":
        sys.stdout.write(text)
        return
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd_, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".csv")
    try:
        with os.fdopen(fd_, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def diagnostics_csv(traj):
    lines = ["step,t," + ",".join(DIAGNOSTIC_COLUMNS)]
    for step, t, row in zip(traj.steps, traj.times, traj.diagnostics):
        lines.append(f"{step},{t:.10g}," + ",".join(f"{v:.12e}" for v in row))
    return "\n".join(lines) + "\n"


def svg_viewport(X0, pad=0.2):
    lo, hi = X0.min(axis=0), X0.max(axis=0)
    span = np.maximum(hi - lo, 1e-12)
    lo, span = lo - pad * span, span * (1 + 2 * pad)
    return lo, span


def svg_frame(X, viewport, size=480, caption=""):
    (x0, y0), (w, h) = viewport
    scale = size / max(w, h)
    pts = " ".join(f"{(x - x0) * scale:.3f},{(y0 + h - y) * scale:.3f}" for x, y in X)
    W, H = w * scale, h * scale
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W:.0f}" height="{H:.0f}" '
        f'viewBox="0 0 {W:.3f} {H:.3f}">\n'
        f'<rect width="100%" height="100%" fill="white"/>\n'
        f'<polygon points="{pts}" fill="none" stroke="black" stroke-width="1.5"/>\n'
        f'<text x="6" y="16" font-size="12" font-family="monospace">{caption}</text>\n'
        f"</svg>\n"
    )


def write_svg_frames(directory, traj):
    os.makedirs(directory, exist_ok=True)
    vp = svg_viewport(traj.positions[0])
    width = max(5, len(str(int(traj.steps[-1]))))
    for step, t, X in zip(traj.steps, traj.times, traj.positions):
        path = os.path.join(directory, f"{int(step):0{width}d}.svg")
        with open(path, "w") as fh:
            fh.write(svg_frame(X, vp, caption=f"step {step}  t={t:.5g}  A={shoelace_area(X):.6g}"))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_evolve(args):
    if args.n < 3:
        raise ConfigError("n", f"N must be >= 3, got {args.n}")
    T = _positive("t-end", args.t_end)
    if args.record_every < 1:
        raise ConfigError("record-every", "must be >= 1")
    tau = _tau(args.tau)
    period = _period(args.period)
    curve = parse_curve(args.curve, period)
    X0 = interpolate(curve, uniform_grid(args.n, period), eps_q=args.eps_q)
    if args.scheme == "semi":
        dt = None if tau == "auto" else tau
        traj = sd.evolve(X0, T, dt, args.record_every, eps_q=args.eps_q, period=period)
    else:
        if tau == "auto":
            tau = 0.5 * (period / args.n) ** 2
        m = max(1, round(T / tau))
        if abs(m * tau - T) > 1e-12 * T:
            log.warning("t-end adjusted from %.10g to %.10g (%d steps of tau=%.6g)", T, m * tau, m, tau)
        traj = fd.evolve_full(X0, m * tau, tau, args.record_every, eps_q=args.eps_q,
                              cond_cap=args.cond_cap, period=period)
    write_atomic(args.out_csv, diagnostics_csv(traj))
    if args.out_svg:
        write_svg_frames(args.out_svg, traj)
    audit = analysis.audit_structure(traj)
    log.info("%s", audit.summary())
    return EXIT_OK


def cmd_converge(args):
    N_list = _n_list(args.n_list)
    T = _positive("t-end", args.t_end)
    period = _period(args.period)
    curve = parse_curve(args.curve, period)
    try:
        report = analysis.run_convergence_study(curve, N_list, T, _tau(args.tau), period,
                                                max_workers=args.workers)
    except ValueError as exc:
        raise ConfigError("tau", str(exc)) from None
    print(report.table())
    if args.report:
        write_atomic(args.report, report.to_csv())
    return EXIT_OK


def cmd_area_loss(args):
    N_list = _n_list(args.n_list)
    T = _positive("t-end", args.t_end)
    period = _period(args.period)
    curve = parse_curve(args.curve, period)
    try:
        study = analysis.area_loss_study(curve, N_list, T, _tau(args.tau), period)
    except ValueError as exc:
        raise ConfigError("tau", str(exc)) from None
    text = study.to_csv()
    print(text, end="")
    if args.report:
        write_atomic(args.report, text)
    return EXIT_OK


def cmd_check(args):
    names = args.suite or None
    try:
        results = checks.run_suites(names, seed=args.seed)
    except KeyError as exc:
        raise ConfigError("suite", str(exc.args[0])) from None
    print(f"seed {args.seed}")
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<26} {r.detail}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_SUITE


def build_parser():
    p = argparse.ArgumentParser(prog="apcsf", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, n_list=False):
        sp.add_argument("--curve", default="ellipse:2,1", help="ellipse:a,b | circle:r | file:PATH")
        if n_list:
            sp.add_argument("--n-list", default="16,32,64,128")
        sp.add_argument("--tau", default="auto", help="time step or 'auto' (0.5 h^2)")
        sp.add_argument("--t-end", type=float, default=0.25)
        sp.add_argument("--period", default="2pi",
                        help="length of the parameter interval (sets h = period/N)")

    e = sub.add_parser("evolve", help="integrate one trajectory")
    common(e)
    e.add_argument("--scheme", choices=("semi", "full"), default="full")
    e.add_argument("--n", type=int, default=64)
    e.add_argument("--record-every", type=int, default=1)
    e.add_argument("--out-csv", default="-", help="diagnostics CSV path ('-' for stdout)")
    e.add_argument("--out-svg", default=None, help="directory for one SVG frame per snapshot")
    e.add_argument("--eps-q", type=float, default=None, help="absolute edge-length floor")
    e.add_argument("--cond-cap", type=float, default=fd.DEFAULT_COND_CAP)
    e.set_defaults(func=cmd_evolve)

    c = sub.add_parser("converge", help="E1/E2/E3 refinement study")
    common(c, n_list=True)
    c.add_argument("--report", default=None, help="CSV output path")
    c.add_argument("--workers", type=int, default=1)
    c.set_defaults(func=cmd_converge)

    a = sub.add_parser("area-loss", help="enclosed-area drift versus h")
    common(a, n_list=True)
    a.add_argument("--report", default=None, help="CSV output path")
    a.set_defaults(func=cmd_area_loss)

    k = sub.add_parser("check", help="run the randomized self-check suites")
    k.add_argument("--suite", action="append", choices=sorted(checks.SUITES))
    k.add_argument("--seed", type=int, default=checks.DEFAULT_SEED)
    k.set_defaults(func=cmd_check)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DegenerateEdge as exc:
        print(f"degenerate polygon: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except SingularSystem as exc:
        print(f"linear solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
