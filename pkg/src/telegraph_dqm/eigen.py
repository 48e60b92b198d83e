"""Dense nonsymmetric eigenvalues: balancing, Hessenberg reduction, Francis QR.

Eigenvalues only (no vectors). Follows the classical EISPACK ``balanc`` /
``orthes`` / ``hqr`` sequence with the inner row and column updates
vectorised over numpy slices.
"""

import math

import numpy as np

from .errors import NoConvergence

MAX_DIM = 4096


def balance(a):
    """Diagonal similarity scaling by powers of 2 so row and column norms match."""
    a = np.array(a, dtype=float)
    n = a.shape[0]
    radix, sqrdx = 2.0, 4.0
    done = False
    while not done:
        done = True
        for i in range(n):
            c = np.sum(np.abs(a[:, i])) - abs(a[i, i])
            r = np.sum(np.abs(a[i, :])) - abs(a[i, i])
            if c == 0.0 or r == 0.0:
                continue
            g = r / radix
            f = 1.0
            s = c + r
            while c < g:
                f *= radix
                c *= sqrdx
            g = r * radix
            while c > g:
                f /= radix
                c /= sqrdx
            if (c + r) / f < 0.95 * s:
                done = False
                a[i, :] /= f
                a[:, i] *= f
    return a


def hessenberg(a):
    """Upper Hessenberg matrix orthogonally similar to `a` (Householder)."""
    h = np.array(a, dtype=float)
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1:, k]
        norm = np.linalg.norm(x)
        if norm == 0.0:
            continue
        alpha = -math.copysign(norm, x[0])
        v = x.copy()
        v[0] -= alpha
        vn = np.linalg.norm(v)
        if vn == 0.0:
            continue
        v /= vn
        h[k + 1:, k:] -= 2.0 * np.outer(v, v @ h[k + 1:, k:])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ v, v)
        h[k + 2:, k] = 0.0
    return h


def hqr(h, max_sweeps=None):
    """Eigenvalues of an upper Hessenberg matrix by shifted double-step QR.

    Raises NoConvergence once the total number of QR sweeps exceeds
    `max_sweeps` (default ``30 * n``).
    """
    a = np.array(h, dtype=float)
    n = a.shape[0]
    if max_sweeps is None:
        max_sweeps = 30 * max(n, 1)
    wr = np.zeros(n)
    wi = np.zeros(n)
    eps = np.finfo(float).eps
    anorm = float(np.sum(np.abs(np.triu(a, -1)))) or 1.0
    sweeps = 0
    nn = n - 1
    t = 0.0
    while nn >= 0:
        its = 0
        while True:
            # locate a negligible subdiagonal element
            l = nn
            while l >= 1:
                s = abs(a[l - 1, l - 1]) + abs(a[l, l])
                if s == 0.0:
                    s = anorm
                if abs(a[l, l - 1]) <= eps * s:
                    a[l, l - 1] = 0.0
                    break
                l -= 1
            x = a[nn, nn]
            if l == nn:
                wr[nn] = x + t
                wi[nn] = 0.0
                nn -= 1
            else:
                y = a[nn - 1, nn - 1]
                w = a[nn, nn - 1] * a[nn - 1, nn]
                if l == nn - 1:
                    p = 0.5 * (y - x)
                    q = p * p + w
                    z = math.sqrt(abs(q))
                    x += t
                    if q >= 0.0:
                        z = p + math.copysign(z, p)
                        wr[nn - 1] = wr[nn] = x + z
                        if z:
                            wr[nn] = x - w / z
                        wi[nn - 1] = wi[nn] = 0.0
                    else:
                        wr[nn - 1] = wr[nn] = x + p
                        wi[nn - 1] = -z
                        wi[nn] = z
                    nn -= 2
                else:
                    if sweeps >= max_sweeps:
                        raise NoConvergence(
                            f"QR iteration did not converge within {max_sweeps} sweeps "
                            f"({nn + 1} eigenvalues outstanding)"
                        )
                    if its in (10, 20):
                        # exceptional shift
                        t += x
                        a[np.arange(nn + 1), np.arange(nn + 1)] -= x
                        s = abs(a[nn, nn - 1]) + abs(a[nn - 1, nn - 2])
                        x = y = 0.75 * s
                        w = -0.4375 * s * s
                    its += 1
                    sweeps += 1
                    _double_shift_sweep(a, l, nn, x, y, w)
            if not (l < nn - 1):
                break
    return wr + 1j * wi


def _double_shift_sweep(a, l, nn, x, y, w):
    # find two consecutive small subdiagonal elements
    m = nn - 2
    while m >= l:
        z = a[m, m]
        r = x - z
        s = y - z
        p = (r * s - w) / a[m + 1, m] + a[m, m + 1]
        q = a[m + 1, m + 1] - z - r - s
        r = a[m + 2, m + 1]
        s = abs(p) + abs(q) + abs(r)
        p /= s
        q /= s
        r /= s
        if m == l:
            break
        u = abs(a[m, m - 1]) * (abs(q) + abs(r))
        v = abs(p) * (abs(a[m - 1, m - 1]) + abs(z) + abs(a[m + 1, m + 1]))
        if u + v == v:
            break
        m -= 1
    for i in range(m + 2, nn + 1):
        a[i, i - 2] = 0.0
        if i != m + 2:
            a[i, i - 3] = 0.0

    for k in range(m, nn):
        if k != m:
            p = a[k, k - 1]
            q = a[k + 1, k - 1]
            r = a[k + 2, k - 1] if k != nn - 1 else 0.0
            x = abs(p) + abs(q) + abs(r)
            if x != 0.0:
                p /= x
                q /= x
                r /= x
        s = math.copysign(math.sqrt(p * p + q * q + r * r), p)
        if s == 0.0:
            continue
        if k == m:
            if l != m:
                a[k, k - 1] = -a[k, k - 1]
        else:
            a[k, k - 1] = -s * x
        p += s
        x = p / s
        y = q / s
        z = r / s
        q /= p
        r /= p
        # row modification
        cols = slice(k, nn + 1)
        pr = a[k, cols] + q * a[k + 1, cols]
        if k != nn - 1:
            pr += r * a[k + 2, cols]
            a[k + 2, cols] -= pr * z
        a[k + 1, cols] -= pr * y
        a[k, cols] -= pr * x
        # column modification
        rows = slice(l, min(nn, k + 3) + 1)
        pc = x * a[rows, k] + y * a[rows, k + 1]
        if k != nn - 1:
            pc += z * a[rows, k + 2]
            a[rows, k + 2] -= pc * r
        a[rows, k + 1] -= pc * q
        a[rows, k] -= pc


def eigenvalues(m, do_balance=True):
    """All eigenvalues of a real square matrix (complex array, unordered)."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("eigenvalues() needs a square matrix")
    if m.shape[0] > MAX_DIM:
        raise ValueError(f"dimension {m.shape[0]} exceeds the dense limit {MAX_DIM}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    if m.shape[0] == 0:
        return np.zeros(0, dtype=complex)
    a = balance(m) if do_balance else m
    return hqr(hessenberg(a))


def eigenpair_residual(m, lam, seed=0):
    """Relative residual ``|M x - lam x| / |M|`` of an inverse-iteration eigenvector."""
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    norm = np.linalg.norm(m, 2) or 1.0
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n) + 0j
    shift = lam + 1e-10 * norm * (1 + 1j)
    shifted = m - shift * np.eye(n)
    for _ in range(3):
        x = np.linalg.solve(shifted, x)
        x /= np.linalg.norm(x)
    return float(np.linalg.norm(m @ x - lam * x) / norm)
