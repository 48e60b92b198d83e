"""Problem data for the 2-D telegraph equation on the unit square.

    u_tt + 2 alpha u_t + beta**2 u = u_xx + u_yy + f(x, y, t)

with ``u(x, y, 0) = phi``, ``u_t(x, y, 0) = psi`` and one Dirichlet or Neumann
condition per face. Neumann data are the coordinate derivative (``u_x`` on the
x faces, ``u_y`` on the y faces), not the outward normal derivative.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .errors import TooFewNodes, UnknownProblem
from .expr import compile_expression

DIRICHLET = "dirichlet"
NEUMANN = "neumann"
FACES = ("x_min", "x_max", "y_min", "y_max")


@dataclass(frozen=True)
class FaceCondition:
    kind: str
    data: Callable  # data(s, t), s the coordinate running along the face

    def __post_init__(self):
        if self.kind not in (DIRICHLET, NEUMANN):
            raise ValueError(f"face kind must be {DIRICHLET!r} or {NEUMANN!r}, got {self.kind!r}")


@dataclass(frozen=True)
class TelegraphSpec:
    alpha: float
    beta: float
    forcing: Callable          # f(x, y, t)
    phi: Callable              # u(x, y, 0)
    psi: Callable              # u_t(x, y, 0)
    faces: dict
    exact: Optional[Callable] = None  # u(x, y, t)
    name: str = "custom"

    def face(self, name):
        return self.faces[name]


@dataclass(frozen=True)
class Grid:
    nx: int
    ny: int
    x: np.ndarray = field(init=False, repr=False, compare=False)
    y: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.nx < 5 or self.ny < 5:
            raise TooFewNodes(f"grid needs at least 5 nodes per direction, got {self.nx}x{self.ny}")
        object.__setattr__(self, "x", np.linspace(0.0, 1.0, self.nx))
        object.__setattr__(self, "y", np.linspace(0.0, 1.0, self.ny))

    @classmethod
    def from_h(cls, h, hy=None):
        return cls(nodes_for_step(h), nodes_for_step(hy if hy is not None else h))

    @property
    def hx(self):
        return 1.0 / (self.nx - 1)

    @property
    def hy(self):
        return 1.0 / (self.ny - 1)

    def mesh(self):
        return np.meshgrid(self.x, self.y, indexing="ij")


def nodes_for_step(h):
    """Node count on [0, 1] for step `h`; `h` must divide 1."""
    n = 1.0 / float(h)
    k = int(round(n))
    if k < 1 or abs(n - k) > 1e-9 * max(1.0, n):
        raise ValueError(f"step h={h} does not divide the unit interval")
    return k + 1


# ---------------------------------------------------------------------------
# built-in examples
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Exact:
    u: Callable
    ut: Callable
    ux: Callable
    uy: Callable


def _faces_from_exact(ex, kinds):
    """Face data generated from the exact solution according to each face kind."""
    fixed = {"x_min": ("x", 0.0), "x_max": ("x", 1.0), "y_min": ("y", 0.0), "y_max": ("y", 1.0)}
    faces = {}
    for name, kind in zip(FACES, kinds):
        axis, value = fixed[name]
        if kind == DIRICHLET:
            g = ex.u
        else:
            g = ex.ux if axis == "x" else ex.uy
        if axis == "x":
            data = (lambda g, v: lambda s, t: g(v, s, t))(g, value)
        else:
            data = (lambda g, v: lambda s, t: g(s, v, t))(g, value)
        faces[name] = FaceCondition(kind, data)
    return faces


D, N = DIRICHLET, NEUMANN
sin, cos, sinh, cosh, exp, log, pi = np.sin, np.cos, np.sinh, np.cosh, np.exp, np.log, np.pi


def _ex1(alpha, beta):
    ex = _Exact(
        u=lambda x, y, t: cos(t) * sin(x) * sin(y),
        ut=lambda x, y, t: -sin(t) * sin(x) * sin(y),
        ux=lambda x, y, t: cos(t) * cos(x) * sin(y),
        uy=lambda x, y, t: cos(t) * sin(x) * cos(y),
    )
    f = lambda x, y, t: ((1 + beta**2) * cos(t) - 2 * alpha * sin(t)) * sin(x) * sin(y)
    psi = lambda x, y: 0.0 * x * y
    return ex, f, psi, (D, D, D, D)


def _ex2(alpha, beta):
    ex = _Exact(
        u=lambda x, y, t: exp(-t) * sinh(x) * sinh(y),
        ut=lambda x, y, t: -exp(-t) * sinh(x) * sinh(y),
        ux=lambda x, y, t: exp(-t) * cosh(x) * sinh(y),
        uy=lambda x, y, t: exp(-t) * sinh(x) * cosh(y),
    )
    f = lambda x, y, t: (-2 * alpha + beta**2 - 1) * exp(-t) * sinh(x) * sinh(y)
    psi = lambda x, y: -sinh(x) * sinh(y)
    return ex, f, psi, (D, D, N, N)


def _ex4(alpha, beta):
    ex = _Exact(
        u=lambda x, y, t: cos(t) * sinh(x) * sinh(y),
        ut=lambda x, y, t: -sin(t) * sinh(x) * sinh(y),
        ux=lambda x, y, t: cos(t) * cosh(x) * sinh(y),
        uy=lambda x, y, t: cos(t) * sinh(x) * cosh(y),
    )
    f = lambda x, y, t: (-3 * cos(t) - 2 * alpha * sin(t) + beta**2 * cos(t)) * sinh(x) * sinh(y)
    psi = lambda x, y: 0.0 * x * y
    return ex, f, psi, (D, D, D, N)


def _ex5(alpha, beta):
    u = lambda x, y, t: exp(x + y - t)
    ex = _Exact(u=u, ut=lambda x, y, t: -u(x, y, t), ux=u, uy=u)
    f = lambda x, y, t: (beta**2 - 2 * alpha - 1) * exp(x + y - t)
    psi = lambda x, y: -exp(x + y)
    return ex, f, psi, (D, D, N, D)


def _ex6(alpha, beta):
    ex = _Exact(
        u=lambda x, y, t: exp(-t) * sin(pi * x) * sin(pi * y),
        ut=lambda x, y, t: -exp(-t) * sin(pi * x) * sin(pi * y),
        ux=lambda x, y, t: pi * exp(-t) * cos(pi * x) * sin(pi * y),
        uy=lambda x, y, t: pi * exp(-t) * sin(pi * x) * cos(pi * y),
    )
    f = lambda x, y, t: (1 - 2 * alpha + beta**2 + 2 * pi**2) * exp(-t) * sin(pi * x) * sin(pi * y)
    psi = lambda x, y: -sin(pi * x) * sin(pi * y)
    return ex, f, psi, (N, D, D, N)


def _ex7(alpha, beta):
    inv = lambda x, y, t: 1.0 / (1 + x + y + t)
    ex = _Exact(u=lambda x, y, t: log(1 + x + y + t), ut=inv, ux=inv, uy=inv)

    def f(x, y, t):
        s = 1 + x + y + t
        return 1 / s**2 + 2 * alpha / s + beta**2 * log(s)

    psi = lambda x, y: 1.0 / (1 + x + y)
    return ex, f, psi, (D, N, N, D)


# id -> (label, builder, default alpha, default beta); None means caller must supply
BUILTINS = {
    1: ("ex1", _ex1, 1.0, 1.0),
    2: ("ex2", _ex2, None, None),
    3: ("ex4", _ex4, None, None),
    4: ("ex5", _ex5, 1.0, 1.0),
    5: ("ex6", _ex6, 1.0, 1.0),
    6: ("ex7", _ex7, 1.0, 1.0),
}
_LABELS = {label: k for k, (label, *_rest) in BUILTINS.items()}


def resolve_builtin_id(key):
    """Accept ``1..6`` or the example labels ``ex1, ex2, ex4, ex5, ex6, ex7``."""
    if isinstance(key, str):
        k = key.strip().lower()
        if k in _LABELS:
            return _LABELS[k]
        if k.isdigit():
            key = int(k)
        else:
            raise UnknownProblem(f"unknown problem {key!r}")
    if key not in BUILTINS:
        raise UnknownProblem(f"unknown problem id {key!r}; valid ids are 1..6")
    return key


def _parse_kinds(kinds):
    if isinstance(kinds, str):
        if kinds.lower() in (DIRICHLET, NEUMANN):
            return (kinds.lower(),) * 4
        letters = {"d": DIRICHLET, "n": NEUMANN}
        if len(kinds) != 4 or any(c not in letters for c in kinds.lower()):
            raise ValueError(f"face kinds must be 4 letters from D/N, got {kinds!r}")
        return tuple(letters[c] for c in kinds.lower())
    kinds = tuple(kinds)
    if len(kinds) != 4:
        raise ValueError("need one face kind per face (x_min, x_max, y_min, y_max)")
    return kinds


def builtin(key, alpha=None, beta=None, kinds=None):
    """One of the six built-in examples with exact solution.

    Examples 2 and 3 (labels ex2, ex4) have no fixed coefficients, so `alpha`
    and `beta` must be given. `kinds` overrides the face types, either as
    four letters in face order (``"DDNN"``), a single kind for all faces, or
    a 4-tuple; face data are regenerated from the exact solution.
    """
    k = resolve_builtin_id(key)
    label, build, a0, b0 = BUILTINS[k]
    alpha = a0 if alpha is None else float(alpha)
    beta = b0 if beta is None else float(beta)
    if alpha is None or beta is None:
        raise ValueError(f"problem {k} ({label}) needs explicit alpha and beta")
    ex, f, psi, kinds0 = build(alpha, beta)
    kinds = kinds0 if kinds is None else _parse_kinds(kinds)
    return TelegraphSpec(
        alpha=alpha,
        beta=beta,
        forcing=f,
        phi=(lambda u: lambda x, y: u(x, y, 0.0))(ex.u),
        psi=psi,
        faces=_faces_from_exact(ex, kinds),
        exact=ex.u,
        name=label,
    )


def builtin_derivatives(key, alpha=1.0, beta=1.0):
    """Analytic ``(u_t, u_x, u_y)`` of a built-in exact solution."""
    k = resolve_builtin_id(key)
    ex, *_ = BUILTINS[k][1](alpha, beta)
    return ex.ut, ex.ux, ex.uy


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

def _face_points(grid, name):
    if name in ("x_min", "x_max"):
        return grid.y, (0.0 if name == "x_min" else 1.0), "x"
    return grid.x, (0.0 if name == "y_min" else 1.0), "y"


def validate(spec, grid, tol=1e-10):
    """Admissibility diagnostics; an empty list means the problem is admissible."""
    out = []
    if not spec.alpha > 0:
        out.append("alpha must be positive")
    if not np.isfinite(spec.beta):
        out.append("beta must be finite")
    X, Y = grid.mesh()
    with np.errstate(all="ignore"):
        for label, vals in (
            ("phi", spec.phi(X, Y)),
            ("psi", spec.psi(X, Y)),
            ("forcing at t=0", spec.forcing(X, Y, 0.0)),
        ):
            if not np.all(np.isfinite(vals)):
                out.append(f"{label} has non-finite samples")
        phi = spec.phi(X, Y)
        for name in FACES:
            fc = spec.faces.get(name)
            if fc is None:
                out.append(f"missing boundary condition on {name}")
                continue
            s, _, axis = _face_points(grid, name)
            data0 = np.asarray(fc.data(s, 0.0), dtype=float) * np.ones_like(s)
            if not np.all(np.isfinite(data0)):
                out.append(f"{name} data has non-finite samples")
                continue
            if fc.kind == DIRICHLET:
                edge = {"x_min": phi[0, :], "x_max": phi[-1, :],
                        "y_min": phi[:, 0], "y_max": phi[:, -1]}[name]
                gap = np.max(np.abs(data0 - edge))
                if gap > tol:
                    out.append(
                        f"compatibility violation on {name}: Dirichlet data differs from phi "
                        f"at t=0 by {gap:.3e}"
                    )
        # Dirichlet corners shared by two faces must agree
        corners = {
            ("x_min", "y_min"): (0.0, 0.0), ("x_min", "y_max"): (1.0, 0.0),
            ("x_max", "y_min"): (0.0, 1.0), ("x_max", "y_max"): (1.0, 1.0),
        }
        for (fx, fy), (sx, sy) in corners.items():
            cx, cy = spec.faces.get(fx), spec.faces.get(fy)
            if cx is None or cy is None or cx.kind != DIRICHLET or cy.kind != DIRICHLET:
                continue
            for t in (0.0, 0.5, 1.0):
                gap = abs(float(cx.data(sx, t)) - float(cy.data(sy, t)))
                if gap > tol:
                    out.append(f"corner violation at {fx}/{fy}, t={t}: faces differ by {gap:.3e}")
                    break
    return out


# ---------------------------------------------------------------------------
# configuration files
# ---------------------------------------------------------------------------

def parse_config(text):
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key.lower()] = value
    return out


def spec_from_config(cfg, name="custom"):
    """Build a TelegraphSpec from parsed configuration entries.

    Face entries read ``dirichlet: <expr>`` or ``neumann: <expr>``; the
    expression may use ``x, y, t`` with the fixed coordinate of the face
    substituted. ``phi`` and ``psi`` are evaluated at ``t = 0``.
    """
    try:
        alpha = float(cfg["alpha"])
        beta = float(cfg.get("beta", "0"))
        forcing = compile_expression(cfg.get("forcing", "0"))
        phi_e = compile_expression(cfg["phi"])
        psi_e = compile_expression(cfg.get("psi", "0"))
        exact = compile_expression(cfg["exact"]) if "exact" in cfg else None
    except KeyError as exc:
        raise ValueError(f"missing required key {exc.args[0]!r}") from None
    faces = {}
    for fname in FACES:
        if fname not in cfg:
            raise ValueError(f"missing boundary condition {fname!r}")
        kind, sep, body = cfg[fname].partition(":")
        kind = kind.strip().lower()
        if not sep or kind not in (DIRICHLET, NEUMANN):
            raise ValueError(f"{fname}: expected 'dirichlet: <expr>' or 'neumann: <expr>'")
        g = compile_expression(body)
        if fname.startswith("x"):
            v = 0.0 if fname == "x_min" else 1.0
            data = (lambda g, v: lambda s, t: g(v, s, t))(g, v)
        else:
            v = 0.0 if fname == "y_min" else 1.0
            data = (lambda g, v: lambda s, t: g(s, v, t))(g, v)
        faces[fname] = FaceCondition(kind, data)
    return TelegraphSpec(
        alpha=alpha,
        beta=beta,
        forcing=forcing,
        phi=(lambda g: lambda x, y: g(x, y, 0.0))(phi_e),
        psi=(lambda g: lambda x, y: g(x, y, 0.0))(psi_e),
        faces=faces,
        exact=exact,
        name=cfg.get("name", name),
    )


def load_spec_file(path):
    path = Path(path)
    return spec_from_config(parse_config(path.read_text()), name=path.stem)
