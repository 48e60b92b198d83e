"""Method-of-lines reduction of the telegraph equation.

With ``v = u_t`` the PDE becomes ``u_t = v``, ``v_t = u_xx + u_yy - 2 alpha v
- beta**2 u + f``. Only interior nodes are evolved; boundary values are
algebraic and are recovered before every right-hand-side evaluation, either
straight from Dirichlet data or from the first-order weights on Neumann faces.
"""

from dataclasses import dataclass

import numpy as np

from .errors import SingularClosure
from .problem import DIRICHLET, NEUMANN

CORNER_ORDERS = ("y-last", "x-last")
TIME_FD_STEP = 1e-6


@dataclass
class State:
    u: np.ndarray
    v: np.ndarray
    t: float = 0.0

    def copy(self):
        return State(self.u.copy(), self.v.copy(), self.t)


def _fd_dt(g, s, t, step=TIME_FD_STEP):
    return (np.asarray(g(s, t + step)) - np.asarray(g(s, t - step))) / (2 * step)


class _AxisClosure:
    """Boundary recovery along one axis (rows 0 and -1 of the array it is given)."""

    def __init__(self, order1, kind_lo, kind_hi, axis_name):
        self.a = order1
        self.kind_lo = kind_lo
        self.kind_hi = kind_hi
        a = order1
        scale = float(np.max(np.abs(a)))
        self.det = a[0, 0] * a[-1, -1] - a[-1, 0] * a[0, -1]
        if kind_lo == NEUMANN and kind_hi == NEUMANN:
            if not abs(self.det) > 1e-10 * scale**2:
                raise SingularClosure(
                    f"{axis_name}: closure determinant {self.det:.3e} is singular"
                )
        elif kind_lo == NEUMANN:
            if not abs(a[0, 0]) > 1e-10 * scale:
                raise SingularClosure(f"{axis_name}: boundary weight a_11 vanishes")
        elif kind_hi == NEUMANN:
            if not abs(a[-1, -1]) > 1e-10 * scale:
                raise SingularClosure(f"{axis_name}: boundary weight a_NN vanishes")

    def apply(self, w, g_lo, g_hi):
        """Overwrite ``w[0]`` and ``w[-1]`` in place; `g_*` hold face data."""
        a = self.a
        if self.kind_lo == DIRICHLET:
            w[0] = g_lo
        if self.kind_hi == DIRICHLET:
            w[-1] = g_hi
        if self.kind_lo == NEUMANN and self.kind_hi == NEUMANN:
            s1 = g_lo - a[0, 1:-1] @ w[1:-1]
            s2 = g_hi - a[-1, 1:-1] @ w[1:-1]
            w[0] = (s1 * a[-1, -1] - s2 * a[0, -1]) / self.det
            w[-1] = (s2 * a[0, 0] - s1 * a[-1, 0]) / self.det
        elif self.kind_lo == NEUMANN:
            w[0] = (g_lo - a[0, 1:-1] @ w[1:-1] - a[0, -1] * w[-1]) / a[0, 0]
        elif self.kind_hi == NEUMANN:
            w[-1] = (g_hi - a[-1, 1:-1] @ w[1:-1] - a[-1, 0] * w[0]) / a[-1, -1]


class Semidiscrete:
    """Spatially discretised telegraph problem on a fixed grid.

    Parameters
    ----------
    spec : TelegraphSpec
    grid : Grid
    wx, wy : WeightSet
        Weights for the x and y directions (node counts must match the grid).
    corner_order : {"y-last", "x-last"}
        Which pair of faces is closed last and therefore owns the corners.
    """

    def __init__(self, spec, grid, wx, wy, corner_order="y-last"):
        if wx.n != grid.nx or wy.n != grid.ny:
            raise ValueError("weight sets do not match the grid")
        if corner_order not in CORNER_ORDERS:
            raise ValueError(f"corner_order must be one of {CORNER_ORDERS}")
        self.spec = spec
        self.grid = grid
        self.wx = wx
        self.wy = wy
        self.corner_order = corner_order
        f = spec.faces
        self.x_closure = _AxisClosure(wx.order1, f["x_min"].kind, f["x_max"].kind, "x")
        self.y_closure = _AxisClosure(wy.order1, f["y_min"].kind, f["y_max"].kind, "y")

        a2, b2 = wx.order2, wy.order2
        self.a2_int = a2[1:-1, 1:-1].copy()
        self.a2_edge = a2[1:-1][:, [0, -1]].copy()   # columns for u_1j, u_Nj
        self.b2_int_t = b2[1:-1, 1:-1].T.copy()
        self.b2_edge_t = b2[1:-1][:, [0, -1]].T.copy()
        X, Y = grid.mesh()
        self.X, self.Y = X, Y
        self.Xi, self.Yi = X[1:-1, 1:-1], Y[1:-1, 1:-1]

    # -- state -------------------------------------------------------------
    def init_state(self):
        return init_state(self.spec, self.grid)

    # -- boundary ----------------------------------------------------------
    def _face_data(self, t, derivative):
        g = self.grid
        out = {}
        for name, s in (("x_min", g.y), ("x_max", g.y), ("y_min", g.x), ("y_max", g.x)):
            data = self.spec.faces[name].data
            val = _fd_dt(data, s, t) if derivative else data(s, t)
            out[name] = np.broadcast_to(np.asarray(val, dtype=float), s.shape)
        return out

    def _close(self, w, data):
        steps = [
            (self.x_closure, w, data["x_min"], data["x_max"]),
            (self.y_closure, w.T, data["y_min"], data["y_max"]),
        ]
        if self.corner_order == "x-last":
            steps.reverse()
        for closure, arr, lo, hi in steps:
            closure.apply(arr, lo, hi)

    def close_boundary(self, u, v, t, close_v=True):
        """Overwrite boundary entries of `u` (and `v`) in place for time `t`.

        `v` on the boundary is closed with the time derivative of the face
        data (central difference), so ``v`` stays consistent with ``u_t``.
        """
        self._close(u, self._face_data(t, derivative=False))
        if close_v and v is not None:
            self._close(v, self._face_data(t, derivative=True))

    # -- right-hand side ---------------------------------------------------
    def forcing_term(self, u, t):
        """``K_ij``: forcing plus the boundary columns of the second-order weights."""
        f = np.asarray(self.spec.forcing(self.Xi, self.Yi, t), dtype=float)
        return (
            f
            + self.a2_edge @ u[[0, -1], 1:-1]
            + u[1:-1, [0, -1]] @ self.b2_edge_t
        )

    def rhs(self, u, v, t, out=None):
        """Time derivatives ``(du, dv)``; boundary rows are zero.

        Assumes the boundary of `u` has already been closed at time `t`.
        """
        if out is None:
            du = np.zeros_like(u)
            dv = np.zeros_like(u)
        else:
            du, dv = out
        ui = u[1:-1, 1:-1]
        vi = v[1:-1, 1:-1]
        spec = self.spec
        du[1:-1, 1:-1] = vi
        dv[1:-1, 1:-1] = (
            self.a2_int @ ui
            + ui @ self.b2_int_t
            - 2.0 * spec.alpha * vi
            - spec.beta**2 * ui
            + self.forcing_term(u, t)
        )
        return du, dv


def init_state(spec, grid):
    X, Y = grid.mesh()
    u = np.asarray(spec.phi(X, Y), dtype=float) * np.ones_like(X)
    v = np.asarray(spec.psi(X, Y), dtype=float) * np.ones_like(X)
    return State(u, v, 0.0)


def close_boundary(state, spec, grid, wx, wy, t, corner_order="y-last"):
    """Copy of `state` with its boundary closed at time `t`."""
    out = State(state.u.copy(), state.v.copy(), t)
    Semidiscrete(spec, grid, wx, wy, corner_order).close_boundary(out.u, out.v, t)
    return out


def rhs(state, spec, grid, wx, wy):
    return Semidiscrete(spec, grid, wx, wy).rhs(state.u, state.v, state.t)
