"""Command-line front end.

Subcommands: ``solve``, ``table``, ``stability``, ``convergence``. Exit codes:
0 success, 2 configuration error, 3 numerical blow-up.
"""

import argparse
import json
import math
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import NonFinite, TelegraphError
from .integrator import integrate
from .norms import L2_WEIGHTS, convergence_study, error_norms
from .problem import Grid, builtin, load_spec_file, nodes_for_step
from .semidiscrete import CORNER_ORDERS
from .stability import analyze
from .weights import build_weights, dump_csv

OUTPUT_ENV = "TDQM_OUTPUT_DIR"
EXIT_CONFIG = 2
EXIT_BLOWUP = 3
NUM = "%.8e"


class ConfigError(Exception):
    pass


def load_tables():
    text = resources.files(__package__).joinpath("tables.json").read_text()
    return json.loads(text)


def _floats(text):
    try:
        return [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from None


def _output_dir(args):
    out = args.output or os.environ.get(OUTPUT_ENV) or "output"
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _load_problem(key, alpha, beta, kinds=None):
    if key is None:
        raise ConfigError("a problem id or spec file is required")
    if os.path.isfile(str(key)):
        spec = load_spec_file(key)
        if alpha is not None or beta is not None or kinds is not None:
            raise ConfigError("--alpha/--beta/--faces apply to built-in problems only")
        return spec
    return builtin(key, alpha, beta, kinds)


def _nearest_nodes(h):
    """Node count for the closest step to `h` that divides 1 (halves round up)."""
    if not h > 0:
        raise ConfigError("grid step must be positive")
    try:
        return nodes_for_step(h)
    except ValueError:
        n = math.floor(1.0 / h + 0.5) + 1
        warnings.warn(f"h={h:g} does not divide 1; using {n} nodes (h={1 / (n - 1):.6g})")
        return n


def _grid(args, lenient=False):
    if args.nx is not None:
        return Grid(args.nx, args.ny if args.ny is not None else args.nx)
    if args.h is None:
        raise ConfigError("give --h or --nx")
    nodes = _nearest_nodes if lenient else nodes_for_step
    nx = nodes(args.h)
    ny = nodes(args.hy) if getattr(args, "hy", None) else nx
    return Grid(nx, ny)


def _weights(grid, p):
    wx = build_weights(grid.nx, p)
    wy = wx if grid.ny == grid.nx else build_weights(grid.ny, p)
    return wx, wy


def _fmt_t(t):
    return f"{t:g}"


def _run(spec, grid, p, dt, observe, t_final, l2_weight="h", corner_order="y-last",
         boundary_time="stage", fields_dir=None, weights=None):
    """Integrate and collect ErrorReports at the observation times."""
    weights = weights or _weights(grid, p)
    reports = []
    X, Y = grid.mesh()

    def observer(state, wall):
        reports.append(error_norms(state, spec, grid, l2_weight, wall))
        if fields_dir is not None:
            exact = np.asarray(spec.exact(X, Y, state.t), dtype=float) * np.ones_like(X)
            data = np.column_stack([X.ravel(), Y.ravel(), state.u.ravel(), exact.ravel()])
            np.savetxt(fields_dir / f"field_t{_fmt_t(state.t)}.csv", data, delimiter=",",
                       fmt=NUM, header="x,y,u,exact", comments="")

    integrate(spec, grid, weights, dt, t_final, observer=observer, observe_times=observe,
              boundary_time=boundary_time, corner_order=corner_order)
    return reports


def _write_errors(path, reports, timing=True):
    with open(path, "w") as fh:
        fh.write("t,l2,linf,rel,wall_seconds\n")
        for r in reports:
            wall = r.wall_seconds if timing else 0.0
            fh.write(",".join(NUM % v for v in (r.t, r.l2, r.linf, r.rel, wall)) + "\n")


# -- subcommands --------------------------------------------------------------

def cmd_solve(args):
    spec = _load_problem(args.problem, args.alpha, args.beta, args.faces)
    if spec.exact is None:
        raise ConfigError("the problem has no exact solution to measure errors against")
    grid = _grid(args)
    observe = _floats(args.observe) if args.observe else []
    t_final = args.tfinal if args.tfinal is not None else (max(observe) if observe else 1.0)
    if not observe:
        observe = [t_final]
    if any(t < 0 or t > t_final for t in observe):
        raise ConfigError("observation times must lie in [0, tfinal]")
    out = _output_dir(args)
    weights = _weights(grid, args.p)
    if args.dump_weights:
        dump_csv(weights[0], str(out / "weights_x"))
        dump_csv(weights[1], str(out / "weights_y"))
    reports = _run(spec, grid, args.p, args.dt, observe, t_final, args.l2_weight,
                   args.corner_order, args.boundary_time, out if args.fields else None, weights)
    _write_errors(out / "errors.csv", reports, timing=not args.no_timing)
    for r in reports:
        print(f"t={r.t:g}  L2={r.l2:.4e}  Linf={r.linf:.4e}  Re={r.rel:.4e}  ({r.wall_seconds:.2f}s)")
    print(f"wrote {out / 'errors.csv'}")
    return 0


def _table_run(cfg, observe, l2_weight):
    spec = builtin(cfg["problem"], cfg["alpha"], cfg["beta"])
    n = nodes_for_step(cfg["h"])
    return _run(spec, Grid(n, n), cfg["p"], cfg["dt"], observe, max(observe), l2_weight)


def cmd_table(args):
    tables = load_tables()
    key = str(args.table_id)
    if key not in tables:
        raise ConfigError(f"unknown table {args.table_id!r}; available: {', '.join(tables)}")
    table = tables[key]
    observe = [float(t) for t in table["observe"]]
    runs = table["runs"]
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        results = list(pool.map(lambda c: _table_run(c, observe, args.l2_weight), runs))
    out = _output_dir(args)
    path = out / f"table_{key}.csv"
    cols = ["t"]
    for cfg in runs:
        cols += [f"{cfg['label']}_{m}" for m in ("l2", "linf", "rel", "wall_seconds")]
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for i, t in enumerate(observe):
            row = [t]
            for reps in results:
                r = reps[i]
                row += [r.l2, r.linf, r.rel, r.wall_seconds if not args.no_timing else 0.0]
            fh.write(",".join(NUM % v for v in row) + "\n")
    print(table["title"])
    for cfg, reps in zip(runs, results):
        for r in reps:
            print(f"  {cfg['label']:>16}  t={r.t:<4g} L2={r.l2:.4e}  Linf={r.linf:.4e}")
    print(f"wrote {path}")
    return 0


class _Coefficients:
    def __init__(self, alpha, beta):
        self.alpha = alpha
        self.beta = beta


def cmd_stability(args):
    grid = _grid(args, lenient=True)
    if not args.alpha > 0:
        raise ConfigError("alpha must be positive")
    m = (grid.nx - 2) * (grid.ny - 2)
    if m > 2500:
        warnings.warn(f"{m} interior unknowns: the spectrum is large and slow to compute")
    report = analyze(_Coefficients(args.alpha, args.beta), grid, args.p, args.dt, method=args.method)
    out = _output_dir(args)
    path = out / "stability.csv"
    with open(path, "w") as fh:
        fh.write("re_lambda,im_lambda\n")
        for lam in report.spectrum:
            fh.write(f"{NUM % lam.real},{NUM % lam.imag}\n")
        fh.write("# summary: " + json.dumps(report.summary()) + "\n")
    print(f"{grid.nx}x{grid.ny} grid, {report.spectrum.size} eigenvalues")
    print(f"max Re(lambda_B) = {report.max_re:.6e}  max |Im| = {report.max_abs_im:.3e}  rho = {report.rho:.6e}")
    print(f"dt = {args.dt:g}: {report.verdict}  (max |R| = {report.max_abs_r:.12f}, dt_max = {report.dt_max:.6e})")
    print(f"wrote {path}")
    return 0


def cmd_convergence(args):
    spec = _load_problem(args.problem, args.alpha, args.beta)
    grids = [int(g) for g in _floats(args.grids)]
    rows = convergence_study(spec, grids, args.dt, args.p, args.tfinal, args.l2_weight)
    out = _output_dir(args)
    path = out / "convergence.csv"
    with open(path, "w") as fh:
        fh.write("nx,ny,h,l2,linf,order_l2,order_linf,decreasing\n")
        for r in rows:
            fh.write(f"{r.nx},{r.ny},{NUM % r.h},{NUM % r.l2},{NUM % r.linf},"
                     f"{NUM % r.order_l2},{NUM % r.order_linf},{int(r.decreasing)}\n")
    for r in rows:
        print(f"n={r.nx:<4d} h={r.h:<8g} L2={r.l2:.4e}  Linf={r.linf:.4e}  order={r.order_linf:.3f}")
    print(f"wrote {path}")
    return 0


# -- parser -------------------------------------------------------------------

def _common(p):
    p.add_argument("--output", help=f"output directory (default ${OUTPUT_ENV} or ./output)")
    p.add_argument("--l2-weight", choices=L2_WEIGHTS, default="h",
                   help="L2 weight: hx ('h') or hx*hy ('area')")
    p.add_argument("--no-timing", action="store_true", help="write wall_seconds as 0")


def _grid_args(p):
    p.add_argument("--h", type=float, help="grid step (must divide 1)")
    p.add_argument("--hy", type=float, help="y step if different from --h")
    p.add_argument("--nx", type=int, help="nodes in x (overrides --h)")
    p.add_argument("--ny", type=int, help="nodes in y (default nx)")


def build_parser():
    parser = argparse.ArgumentParser(prog="telegraph-dqm",
                                     description="Telegraph equation solver (exponential B-spline DQM + SSP-RK54)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one problem and tabulate errors")
    p.add_argument("--problem", required=True, help="built-in id 1-6, label (ex1..ex7) or spec file")
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    _grid_args(p)
    p.add_argument("--faces", help="override built-in face kinds, e.g. DDDD or DDNN")
    p.add_argument("--dt", type=float, required=True)
    p.add_argument("--p", type=float, default=1.0, help="spline shape parameter")
    p.add_argument("--tfinal", type=float)
    p.add_argument("--observe", help="comma-separated observation times")
    p.add_argument("--corner-order", choices=CORNER_ORDERS, default="y-last")
    p.add_argument("--boundary-time", choices=("stage", "frozen"), default="stage")
    p.add_argument("--fields", action="store_true", help="write field_t<t>.csv per observation")
    p.add_argument("--dump-weights", action="store_true", help="write the weighting matrices")
    _common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("table", help="reproduce a bundled table configuration")
    p.add_argument("table_id", help="1-8, ex6-h0.05 or ex7")
    p.add_argument("--jobs", type=int, default=1, help="worker threads")
    _common(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("stability", help="spectrum and stability verdict")
    _grid_args(p)
    p.epilog = "A --h that does not divide 1 is rounded to the nearest node count."
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--dt", type=float, required=True)
    p.add_argument("--method", choices=("kronecker", "dense"), default="kronecker")
    _common(p)
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("convergence", help="grid refinement study")
    p.add_argument("--problem", required=True)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--grids", required=True, help="comma-separated node counts, e.g. 11,21")
    p.add_argument("--dt", type=float, required=True)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--tfinal", type=float, default=1.0)
    _common(p)
    p.set_defaults(func=cmd_convergence)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NonFinite as exc:
        when = f" at t={exc.t:g}" if exc.t is not None else ""
        print(f"error: numerical blow-up{when}: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    except (ConfigError, TelegraphError, ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
