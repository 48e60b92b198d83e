"""Exponential cubic B-splines on a uniform grid.

The spline centred at node ``x_i`` is C2, supported on ``[x_{i-2}, x_{i+2}]``,
normalised to 1 at ``x_i`` and lives piecewise in ``span{1, x, e^{px}, e^{-px}}``.
It tends to the cubic B-spline (scaled to 1 at its centre) as ``p -> 0``.

Internally the spline is written with the truncated kernel

    S(d) = (sinh(p d) - p d) / p**3

as ``zeta(x) = [S+(d) - 2(1 + cosh(p h)) S+(d - h)] / (2 Dn)`` with
``d = 2h - |x - x_i|`` and ``Dn = (p h cosh(p h) - sinh(p h)) / p**3``, which
stays well conditioned when ``p h`` is small (every term is then a short
Taylor series).
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateShape, IndexOutOfRange

# Below this value of p*h the nodal stencils use the Taylor-series path.
SERIES_THRESHOLD = 1e-3

# Taylor coefficients (in powers of (p d)**2) of S/d**3, S'/d**2, S''/d and Dn/h**3.
_S0 = (1 / 6, 1 / 120, 1 / 5040, 1 / 362880)
_S1 = (1 / 2, 1 / 24, 1 / 720, 1 / 40320)
_S2 = (1.0, 1 / 6, 1 / 120, 1 / 5040)
_DN = (1 / 3, 1 / 30, 1 / 840, 1 / 45360)


def _series(coeffs, z2):
    out = 0.0
    for a in reversed(coeffs):
        out = out * z2 + a
    return out


# Taylor coefficients of (sinh z - z)/z**3 and (z cosh z - sinh z)/z**3 in z**2,
# enough terms for full double precision when |z| < 1.
_SM = tuple(1 / math.factorial(2 * k + 1) for k in range(1, 13))
_ZC = tuple(2 * k / math.factorial(2 * k + 1) for k in range(1, 13))


def _sinh_minus(z):
    """``sinh(z) - z`` without cancellation near 0."""
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < 1.0
    zs = np.where(small, z, 0.0)
    with np.errstate(over="ignore"):
        return np.where(small, zs**3 * _series(_SM, zs * zs), np.sinh(z) - z)


def _zcosh_minus_sinh(z):
    """``z cosh(z) - sinh(z)`` without cancellation near 0."""
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < 1.0
    zs = np.where(small, z, 0.0)
    with np.errstate(over="ignore", invalid="ignore"):
        return np.where(small, zs**3 * _series(_ZC, zs * zs), z * np.cosh(z) - np.sinh(z))


def _cosh_minus_one(z):
    return 2.0 * np.sinh(0.5 * np.asarray(z, dtype=float)) ** 2


@dataclass(frozen=True)
class SplineShape:
    """Free parameter, grid step and the derived constants of the spline.

    ``a1, b1, b2, c1, d1`` are the coefficients of the classical piecewise
    form; ``theta``, ``omega_prime``, ``d2_center`` and ``d2_neighbor`` are the
    nodal stencils actually consumed by the weight computation.
    """

    p: float
    h: float
    c: float
    s: float
    a1: float
    b1: float
    b2: float
    c1: float
    d1: float
    theta: float
    omega_prime: float
    d2_center: float
    d2_neighbor: float
    dn: float
    series: bool

    @property
    def d1_neighbor(self):
        """Nodal first derivative of zeta_i at x_{i-1} (positive)."""
        return -0.5 * self.omega_prime

    # truncated kernel and derivatives, d may be an array
    def _kernel(self, d, order):
        d = np.asarray(d, dtype=float)
        p = self.p
        if self.series:
            z2 = (p * d) ** 2
            if order == 0:
                return d**3 * _series(_S0, z2)
            if order == 1:
                return d**2 * _series(_S1, z2)
            return d * _series(_S2, z2)
        if order == 0:
            return _sinh_minus(p * d) / p**3
        if order == 1:
            return _cosh_minus_one(p * d) / p**2
        return np.sinh(p * d) / p


def make_shape(p, h, series_below=SERIES_THRESHOLD):
    """Build the spline constants for shape parameter `p` and step `h`.

    Parameters
    ----------
    p, h : float
        Positive shape parameter and grid step.
    series_below : float
        When ``p*h`` is below this value the nodal stencils come from a
        4-term Taylor expansion instead of the closed forms (both agree to
        rounding near the threshold). Pass 0 to force the closed forms.

    Raises
    ------
    DegenerateShape
        If the closed forms are requested but the common denominator
        ``p h cosh(p h) - sinh(p h)`` is lost in rounding (or overflows).
    """
    p = float(p)
    h = float(h)
    if not (p > 0 and h > 0):
        raise ValueError(f"p and h must be positive, got p={p}, h={h}")
    ph = p * h
    c = np.cosh(ph)
    s = np.sinh(ph)
    denom = float(_zcosh_minus_sinh(ph))
    series = ph < series_below
    if not series:
        guard = 1e3 * np.finfo(float).eps * max(1.0, abs(ph * c))
        if not np.isfinite(denom) or abs(denom) < guard:
            raise DegenerateShape(
                f"p*h={ph:.3e}: denominator p*h*cosh(p*h)-sinh(p*h)={denom:.3e} "
                "is below the rounding guard; use the series path"
            )

    # classical piece coefficients (exact formulas, inaccurate for tiny p*h);
    # the nodal stencils below use cancellation-free differences instead
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        a1 = ph * c / denom
        b1 = p / 2 * (s * s - c * (1 - c)) / (denom * (1 - c))
        b2 = p / (2 * denom)
        em, ep = np.exp(-ph), np.exp(ph)
        c1 = 0.25 * (em * (1 - c) + s * (em - 1)) / (denom * (1 - c))
        d1 = 0.25 * (ep * (c - 1) + s * (ep - 1)) / (denom * (1 - c))

    if series:
        z2 = ph * ph
        dn = h**3 * _series(_DN, z2)
        k0 = h**3 * _series(_S0, z2)
        k1 = h**2 * _series(_S1, z2)
        k2 = h * _series(_S2, z2)
        theta = k0 / (2 * dn)
        omega_prime = -k1 / dn
        d2_center = -k2 / dn
    else:
        dn = denom / p**3
        theta = float(_sinh_minus(ph)) / (2 * denom)
        omega_prime = -p * float(_cosh_minus_one(ph)) / denom
        d2_center = -p * p * s / denom

    return SplineShape(
        p=p, h=h, c=float(c), s=float(s),
        a1=float(a1), b1=float(b1), b2=float(b2), c1=float(c1), d1=float(d1),
        theta=float(theta), omega_prime=float(omega_prime),
        d2_center=float(d2_center), d2_neighbor=float(-d2_center / 2),
        dn=float(dn), series=bool(series),
    )


def eval_spline(shape, i, x, order=0, origin=0.0):
    """Value or derivative of the spline centred at ``origin + i*h``.

    `x` may be a scalar or an array; points outside the support give 0.
    """
    if order not in (0, 1, 2):
        raise ValueError(f"order must be 0, 1 or 2, got {order}")
    h = shape.h
    x = np.asarray(x, dtype=float)
    centre = origin + i * h
    r = x - centre
    # snap offsets that sit on a knot up to coordinate rounding, so nodal
    # evaluations reproduce the nodal stencils
    k = np.round(r / h)
    tol = 8 * np.finfo(float).eps * np.maximum(np.maximum(np.abs(x), abs(centre)), h)
    r = np.where(np.abs(r - k * h) <= tol, k * h, r)
    d = 2 * h - np.abs(r)
    outer = np.where(d > 0, shape._kernel(np.maximum(d, 0.0), order), 0.0)
    inner = np.where(d > h, shape._kernel(np.maximum(d - h, 0.0), order), 0.0)
    val = (outer - 2 * (1 + shape.c) * inner) / (2 * shape.dn)
    if order == 1:
        val = -np.sign(r) * val
    if val.ndim == 0:
        return float(val)
    return val


def zeta_nodal(shape, i, j, order=0):
    """Nodal table: zeta_i, zeta_i' or zeta_i'' at grid node x_j."""
    k = i - j
    if order == 0:
        return 1.0 if k == 0 else (shape.theta if abs(k) == 1 else 0.0)
    if order == 1:
        if k == 1:
            return shape.d1_neighbor
        if k == -1:
            return -shape.d1_neighbor
        return 0.0
    if order == 2:
        return shape.d2_center if k == 0 else (shape.d2_neighbor if abs(k) == 1 else 0.0)
    raise ValueError(f"order must be 0, 1 or 2, got {order}")


def modified_nodal_value(shape, p_index, j, order, n):
    """Modified basis function ``psi_{p_index}`` (or a derivative) at node ``x_j``.

    The boundary members absorb the ghost splines zeta_0 and zeta_{n+1}::

        psi_1 = zeta_1 + 2 zeta_0        psi_2 = zeta_2 - zeta_0
        psi_{n-1} = zeta_{n-1} - zeta_{n+1}
        psi_n = zeta_n + 2 zeta_{n+1}

    and ``psi_k = zeta_k`` otherwise. Indices are 1-based.
    """
    if n < 5:
        raise IndexOutOfRange(f"modified basis needs n >= 5, got {n}")
    if not (1 <= p_index <= n and 1 <= j <= n):
        raise IndexOutOfRange(f"indices ({p_index}, {j}) outside 1..{n}")
    z = lambda k: zeta_nodal(shape, k, j, order)  # noqa: E731
    if p_index == 1:
        return z(1) + 2 * z(0)
    if p_index == 2:
        return z(2) - z(0)
    if p_index == n - 1:
        return z(n - 1) - z(n + 1)
    if p_index == n:
        return z(n) + 2 * z(n + 1)
    return z(p_index)
