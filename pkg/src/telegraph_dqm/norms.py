"""Error norms against exact solutions and grid-refinement studies."""

import math
from dataclasses import dataclass

import numpy as np

from .errors import NoExactSolution
from .integrator import integrate
from .problem import Grid
from .weights import build_weights

L2_WEIGHTS = ("h", "area")


@dataclass(frozen=True)
class ErrorReport:
    t: float
    l2: float
    linf: float
    rel: float
    wall_seconds: float = 0.0
    rel_max: float = 0.0    # max|e| / max|u_exact|


def norms_of(err, exact, hx, hy=None, l2_weight="h"):
    """L2, L-infinity and relative norms of an error field.

    ``l2 = sqrt(w * sum(err**2))`` with ``w = hx`` (``"h"``) or ``hx * hy``
    (``"area"``); ``rel = |err|_2 / |exact|_2`` with unweighted sums.
    """
    if l2_weight not in L2_WEIGHTS:
        raise ValueError(f"l2_weight must be one of {L2_WEIGHTS}")
    err = np.asarray(err, dtype=float)
    exact = np.asarray(exact, dtype=float)
    w = hx if l2_weight == "h" else hx * (hy if hy is not None else hx)
    sq = float(np.sum(err**2))
    l2 = math.sqrt(w * sq)
    linf = float(np.max(np.abs(err))) if err.size else 0.0
    ex2 = float(np.sum(exact**2))
    rel = math.sqrt(sq / ex2) if ex2 > 0 else (0.0 if sq == 0 else math.inf)
    exmax = float(np.max(np.abs(exact))) if exact.size else 0.0
    rel_max = linf / exmax if exmax > 0 else (0.0 if linf == 0 else math.inf)
    return l2, linf, rel, rel_max


def error_norms(state, spec, grid, l2_weight="h", wall_seconds=0.0):
    """ErrorReport of `state` against ``spec.exact`` at ``state.t``."""
    if spec.exact is None:
        raise NoExactSolution(f"problem {spec.name!r} has no exact solution")
    X, Y = grid.mesh()
    exact = np.asarray(spec.exact(X, Y, state.t), dtype=float) * np.ones_like(X)
    l2, linf, rel, rel_max = norms_of(state.u - exact, exact, grid.hx, grid.hy, l2_weight)
    return ErrorReport(state.t, l2, linf, rel, wall_seconds, rel_max)


@dataclass(frozen=True)
class ConvergenceRow:
    nx: int
    ny: int
    h: float
    l2: float
    linf: float
    order_l2: float       # nan on the first row
    order_linf: float
    decreasing: bool      # error below the previous row (True on the first row)


def _order(e_coarse, e_fine, ratio):
    if e_coarse > 0 and e_fine > 0 and ratio > 1:
        return math.log(e_coarse / e_fine) / math.log(ratio)
    return math.nan


def convergence_study(spec, grids, dt, p, t_final, l2_weight="h", boundary_time="stage"):
    """Run `spec` on each grid and report errors at `t_final` with observed orders.

    `grids` holds Grid objects or node counts. The observed order between
    consecutive grids is ``log(e_coarse / e_fine) / log(h_coarse / h_fine)``,
    which is ``log2`` of the error ratio for halved h.
    """
    grids = [g if isinstance(g, Grid) else Grid(int(g), int(g)) for g in grids]
    if len(grids) < 2:
        raise ValueError("a convergence study needs at least two grids")
    if spec.exact is None:
        raise NoExactSolution(f"problem {spec.name!r} has no exact solution")
    rows = []
    prev = None
    for g in grids:
        wx = build_weights(g.nx, p)
        wy = wx if g.ny == g.nx else build_weights(g.ny, p)
        state = integrate(spec, g, (wx, wy), dt, t_final, boundary_time=boundary_time)
        rep = error_norms(state, spec, g, l2_weight)
        if prev is None:
            o2 = oinf = math.nan
            dec = True
        else:
            ratio = prev[0].hx / g.hx
            o2 = _order(prev[1].l2, rep.l2, ratio)
            oinf = _order(prev[1].linf, rep.linf, ratio)
            dec = rep.linf < prev[1].linf
        rows.append(ConvergenceRow(g.nx, g.ny, g.hx, rep.l2, rep.linf, o2, oinf, dec))
        prev = (g, rep)
    return rows
