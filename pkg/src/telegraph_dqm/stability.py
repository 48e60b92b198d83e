"""Linear stability of the semidiscrete system.

With homogeneous data the interior system is ``U' = V``,
``V' = B U - 2 alpha V`` where ``B = -beta**2 I + B_x + B_y``. Each eigenvalue
``lam_B`` of ``B`` gives two eigenvalues of the full operator through
``lam_A * (lam_A + 2 alpha) = lam_B``; the step is stable when every
``dt * lam_A`` lies in ``|R(z)| <= 1`` for the SSP-RK54 stability function.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .eigen import eigenpair_residual, eigenvalues
from .integrator import amplification
from .splines import SplineShape
from .weights import build_weights

STABLE = "STABLE"
UNSTABLE = "UNSTABLE"
REAL_TOL = 1e-6          # |Im lam_B| <= REAL_TOL * rho(B) counts as real
REGION_TOL = 1e-12       # |R| <= 1 + REGION_TOL counts as inside


@dataclass
class OperatorMatrices:
    """Interior operator, unknowns ordered ``k = i * (ny - 2) + j``."""

    B: np.ndarray
    Bx: np.ndarray
    By: np.ndarray
    A: Optional[np.ndarray] = None

    @property
    def m(self):
        return self.B.shape[0]


def assemble_B(weights_x, weights_y, beta, full=False, alpha=None):
    """Assemble ``B = -beta**2 I + B_x + B_y`` (and the block matrix A if `full`)."""
    a2 = weights_x.order2[1:-1, 1:-1]
    b2 = weights_y.order2[1:-1, 1:-1]
    mx, my = a2.shape[0], b2.shape[0]
    if mx < 1 or my < 1:
        raise ValueError("need at least one interior node per direction")
    bx = np.kron(a2, np.eye(my))
    by = np.kron(np.eye(mx), b2)
    m = mx * my
    b = bx + by - beta**2 * np.eye(m)
    a = None
    if full:
        if alpha is None:
            raise ValueError("the block matrix A needs alpha")
        a = np.block([[np.zeros((m, m)), np.eye(m)], [b, -2.0 * alpha * np.eye(m)]])
    return OperatorMatrices(B=b, Bx=bx, By=by, A=a)


def lambda_a_roots(lam_b, alpha):
    """Both roots of ``lam**2 + 2 alpha lam - lam_b = 0``, shape ``(..., 2)``."""
    lam_b = np.asarray(lam_b, dtype=complex)
    disc = np.sqrt(alpha**2 + lam_b)
    return np.stack([-alpha + disc, -alpha - disc], axis=-1)


def max_amplification(lam_a, dt):
    lam_a = np.asarray(lam_a, dtype=complex)
    if lam_a.size == 0:
        return 0.0
    return float(np.max(np.abs(amplification(dt * lam_a))))


def is_stable(lam_a, dt):
    return max_amplification(lam_a, dt) <= 1.0 + REGION_TOL


def max_stable_dt(lam_a, dt0=1e-3, doublings=80, bisections=60):
    """Largest dt (to bisection accuracy) with every ``|R(dt lam_A)| <= 1``.

    Searches outward from `dt0` by doubling or halving, then bisects.
    Returns inf when no tested step is unstable.
    """
    if is_stable(lam_a, dt0):
        lo, hi = dt0, None
        for _ in range(doublings):
            if not is_stable(lam_a, 2 * lo):
                hi = 2 * lo
                break
            lo *= 2
        if hi is None:
            return float("inf")
    else:
        hi, lo = dt0, None
        for _ in range(doublings):
            if is_stable(lam_a, hi / 2):
                lo = hi / 2
                break
            hi /= 2
        if lo is None:
            return 0.0
    for _ in range(bisections):
        mid = 0.5 * (lo + hi)
        if is_stable(lam_a, mid):
            lo = mid
        else:
            hi = mid
    return lo


def classify_roots(lam_a, alpha, rtol=1e-8):
    """Indices of roots breaking the dichotomy ``Im != 0 => Re = -alpha``,
    ``Im = 0 => (Re + alpha)**2 <= alpha**2``."""
    bad = []
    flat = np.asarray(lam_a).reshape(-1)
    for k, lam in enumerate(flat):
        scale = max(abs(lam), alpha, 1.0)
        x, y = lam.real, lam.imag
        if abs(y) > rtol * scale:
            ok = abs(x + alpha) <= rtol * scale
        else:
            ok = (x + alpha) ** 2 <= alpha**2 * (1 + rtol) + rtol * scale
        if not ok:
            bad.append(k)
    return bad


@dataclass
class StabilityReport:
    spectrum: np.ndarray                 # eigenvalues of B, sorted by descending real part
    rho: float
    max_re: float
    max_abs_im: float
    lambda_a: np.ndarray                 # (m, 2) roots per lam_B
    dt: float
    max_abs_r: float
    verdict: str
    dt_max: float
    root_residual: float
    nonreal: list = field(default_factory=list)
    case_violations: list = field(default_factory=list)
    halving_consistent: bool = True
    eigen_residual: float = 0.0
    method: str = "kronecker"

    @property
    def real_negative(self):
        """True when ``max Re(lam_B) <= REAL_TOL * rho`` and all entries count as real."""
        return self.max_re <= REAL_TOL * self.rho and not self.nonreal

    def summary(self):
        return {
            "max_re": self.max_re,
            "max_abs_im": self.max_abs_im,
            "rho": self.rho,
            "verdict": self.verdict,
            "dt": self.dt,
            "dt_max": self.dt_max,
            "max_abs_R": self.max_abs_r,
            "nonreal": len(self.nonreal),
            "case_violations": len(self.case_violations),
            "halving_consistent": self.halving_consistent,
            "method": self.method,
        }


def _shape_p(shape):
    if isinstance(shape, SplineShape):
        return shape.p
    return float(shape)


def spectrum_B(wx, wy, beta, method="kronecker"):
    """Eigenvalues of B and a residual check of one computed eigenpair.

    ``kronecker`` uses the sum structure of B (eigenvalues of the two 1-D
    interior blocks added pairwise); ``dense`` runs the QR solver on B itself.
    """
    if method == "kronecker":
        a2 = wx.order2[1:-1, 1:-1]
        b2 = wy.order2[1:-1, 1:-1]
        ex = eigenvalues(a2)
        ey = ex if (b2.shape == a2.shape and np.array_equal(a2, b2)) else eigenvalues(b2)
        spec = (ex[:, None] + ey[None, :]).reshape(-1) - beta**2
        k = int(np.argmax(ex.real))
        resid = eigenpair_residual(a2, ex[k])
    elif method == "dense":
        b = assemble_B(wx, wy, beta).B
        spec = eigenvalues(b)
        k = int(np.argmax(spec.real))
        resid = eigenpair_residual(b, spec[k])
    else:
        raise ValueError("method must be 'kronecker' or 'dense'")
    order = np.lexsort((spec.imag, -spec.real))
    return spec[order], resid


def analyze(spec, grid, shape, dt, method="kronecker", weights=None):
    """Stability report for `spec` on `grid` at step `dt`.

    Parameters
    ----------
    shape : SplineShape or float
        Shape parameter ``p`` (a SplineShape contributes its ``p``).
    weights : (WeightSet, WeightSet), optional
        Precomputed x and y weights.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    alpha, beta = float(spec.alpha), float(spec.beta)
    if weights is None:
        p = _shape_p(shape)
        wx = build_weights(grid.nx, p)
        wy = wx if grid.ny == grid.nx else build_weights(grid.ny, p)
    else:
        wx, wy = weights
    lam_b, resid = spectrum_B(wx, wy, beta, method)
    rho = float(np.max(np.abs(lam_b))) if lam_b.size else 0.0
    lam_a = lambda_a_roots(lam_b, alpha)
    root_res = float(np.max(
        np.abs(lam_a * (lam_a + 2 * alpha) - lam_b[:, None]) / np.maximum(np.abs(lam_b), 1.0)[:, None]
    ))
    nonreal = [int(k) for k in np.nonzero(np.abs(lam_b.imag) > REAL_TOL * max(rho, 1.0))[0]]
    real_idx = np.setdiff1d(np.arange(lam_b.size), nonreal)
    violations = [int(real_idx[k // 2]) for k in classify_roots(lam_a[real_idx], alpha)]
    r_max = max_amplification(lam_a, dt)
    stable = r_max <= 1.0 + REGION_TOL
    halving_ok = (not stable) or is_stable(lam_a, dt / 2)
    return StabilityReport(
        spectrum=lam_b,
        rho=rho,
        max_re=float(np.max(lam_b.real)),
        max_abs_im=float(np.max(np.abs(lam_b.imag))),
        lambda_a=lam_a,
        dt=float(dt),
        max_abs_r=r_max,
        verdict=STABLE if stable else UNSTABLE,
        dt_max=max_stable_dt(lam_a, dt0=dt),
        root_residual=root_res,
        nonreal=nonreal,
        case_violations=sorted(set(violations)),
        halving_consistent=halving_ok,
        eigen_residual=resid,
        method=method,
    )


def full_a_eigenvalues(wx, wy, alpha, beta):
    """Eigenvalues of the full ``2m x 2m`` block matrix (cross-check on small grids)."""
    return eigenvalues(assemble_B(wx, wy, beta, full=True, alpha=alpha).A)
