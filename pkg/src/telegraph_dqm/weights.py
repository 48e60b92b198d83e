"""Differential-quadrature weighting coefficients from the modified basis.

First-order weights ``A`` solve the tridiagonal matrix system ``Psi A^T = Psi'``
where ``Psi[p, l] = psi_p(x_l)`` and ``Psi'[p, i] = psi_p'(x_i)``. Second-order
weights follow from Shu's recursion.
"""

from dataclasses import dataclass

import numpy as np

from .errors import CoincidentNodes, NotDominant, TooFewNodes
from .splines import SplineShape, make_shape, modified_nodal_value


@dataclass(frozen=True)
class Tridiagonal:
    sub: np.ndarray   # length n-1, entry k sits at row k+1, column k
    diag: np.ndarray  # length n
    sup: np.ndarray   # length n-1, entry k sits at row k, column k+1

    @property
    def n(self):
        return len(self.diag)

    def to_dense(self):
        return np.diag(self.diag) + np.diag(self.sub, -1) + np.diag(self.sup, 1)

    def is_diagonally_dominant(self, strict=True):
        off = np.zeros(self.n)
        off[1:] += np.abs(self.sub)
        off[:-1] += np.abs(self.sup)
        d = np.abs(self.diag)
        return bool(np.all(d > off) if strict else np.all(d >= off))


@dataclass(frozen=True)
class WeightSet:
    """Weighting matrices for one coordinate direction."""

    n: int
    order1: np.ndarray
    order2: np.ndarray
    shape: SplineShape
    coords: np.ndarray


def assemble_first_order_system(n, shape):
    """Tridiagonal ``Psi`` and the dense right-hand sides ``Psi'``.

    Row ``p`` of the tridiagonal is ``[psi_p(x_{p-1}), psi_p(x_p), psi_p(x_{p+1})]``;
    ``rhs[p, i] = psi_p'(x_i)``. Indices in the docstring are 1-based, arrays
    are 0-based.
    """
    if n < 5:
        raise TooFewNodes(f"need at least 5 nodes per direction, got {n}")
    diag = np.empty(n)
    sub = np.empty(n - 1)
    sup = np.empty(n - 1)
    rhs = np.zeros((n, n))
    for p in range(1, n + 1):
        diag[p - 1] = modified_nodal_value(shape, p, p, 0, n)
        if p > 1:
            sub[p - 2] = modified_nodal_value(shape, p, p - 1, 0, n)
        if p < n:
            sup[p - 1] = modified_nodal_value(shape, p, p + 1, 0, n)
        for i in range(max(1, p - 2), min(n, p + 2) + 1):
            rhs[p - 1, i - 1] = modified_nodal_value(shape, p, i, 1, n)
    tri = Tridiagonal(sub=sub, diag=diag, sup=sup)
    if not tri.is_diagonally_dominant():
        raise NotDominant(
            f"collocation matrix is not strictly diagonally dominant "
            f"(p={shape.p}, h={shape.h}, theta={shape.theta})"
        )
    return tri, rhs


def thomas_solve(t, rhs):
    """Solve ``T X = rhs`` for all columns of `rhs` at once (Thomas algorithm).

    Raises NotDominant when a pivot falls below ``1e-12 * max|diag|``.
    """
    rhs = np.asarray(rhs, dtype=float)
    vector = rhs.ndim == 1
    d = rhs.reshape(t.n, -1).copy()
    b = np.asarray(t.diag, dtype=float).copy()
    a = np.asarray(t.sub, dtype=float)
    c = np.asarray(t.sup, dtype=float)
    tol = 1e-12 * np.max(np.abs(b))
    n = t.n

    if abs(b[0]) <= tol:
        raise NotDominant("zero pivot in row 0")
    for k in range(1, n):
        m = a[k - 1] / b[k - 1]
        b[k] -= m * c[k - 1]
        d[k] -= m * d[k - 1]
        if abs(b[k]) <= tol:
            raise NotDominant(f"pivot {b[k]:.3e} in row {k} after elimination")

    x = np.empty_like(d)
    x[-1] = d[-1] / b[-1]
    for k in range(n - 2, -1, -1):
        x[k] = (d[k] - c[k] * x[k + 1]) / b[k]
    return x.ravel() if vector else x


def first_order_weights(n, shape):
    tri, rhs = assemble_first_order_system(n, shape)
    return thomas_solve(tri, rhs).T.copy()


def first_order_residual(order1, shape):
    """Scaled defining residual ``max|Psi A^T - Psi'| / max|Psi'|``."""
    n = order1.shape[0]
    tri, rhs = assemble_first_order_system(n, shape)
    res = tri.to_dense() @ order1.T - rhs
    return float(np.max(np.abs(res)) / np.max(np.abs(rhs)))


def higher_order_weights(order1, lower, coords, r):
    """One step of Shu's recursion: weights of order `r` from order ``r-1``.

    Off-diagonal ``w_ij = r (a_ij w_ii - w_ij / (x_i - x_j))`` with `a` the
    first-order and `w` the order ``r-1`` weights; the diagonal is minus the
    sum of the row's off-diagonal entries.
    """
    coords = np.asarray(coords, dtype=float)
    dx = coords[:, None] - coords[None, :]
    off = ~np.eye(len(coords), dtype=bool)
    if np.any(np.abs(dx[off]) < 1e-14):
        raise CoincidentNodes("grid coordinates must be distinct")
    np.fill_diagonal(dx, 1.0)
    out = r * (order1 * np.diag(lower)[:, None] - lower / dx)
    np.fill_diagonal(out, 0.0)
    np.fill_diagonal(out, -out.sum(axis=1))
    return out


def second_order_weights(order1, coords):
    order1 = np.asarray(order1, dtype=float)
    if order1.ndim != 2 or order1.shape[0] != order1.shape[1]:
        raise ValueError("first-order weights must be a square matrix")
    if len(coords) != order1.shape[0]:
        raise ValueError("coordinate count does not match the weight matrix")
    return higher_order_weights(order1, order1, coords, 2)


def build_weights(n, p, coords=None):
    """WeightSet for `n` uniform nodes on [0, 1] with shape parameter `p`."""
    if n < 5:
        raise TooFewNodes(f"need at least 5 nodes per direction, got {n}")
    if coords is None:
        coords = np.linspace(0.0, 1.0, n)
    h = 1.0 / (n - 1)
    shape = make_shape(p, h)
    a1 = first_order_weights(n, shape)
    a2 = second_order_weights(a1, coords)
    return WeightSet(n=n, order1=a1, order2=a2, shape=shape, coords=np.asarray(coords))


def dump_csv(weights, path_prefix):
    """Write ``<prefix>_order1.csv`` and ``<prefix>_order2.csv`` (17 significant digits)."""
    paths = []
    for name, mat in (("order1", weights.order1), ("order2", weights.order2)):
        path = f"{path_prefix}_{name}.csv"
        np.savetxt(path, mat, delimiter=",", fmt="%.17g")
        paths.append(path)
    return paths
