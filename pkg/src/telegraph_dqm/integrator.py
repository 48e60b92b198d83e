"""Five-stage, fourth-order SSP Runge-Kutta time stepping (Spiteri-Ruuth SSPRK(5,4)).

The scheme is stored in Shu-Osher form: stage ``i`` is

    y_i = sum_k alpha[i][k] y_k + dt * sum_k beta[i][k] L(y_k)

with ``y_0`` the state at ``t^m`` and the last stage the new state.
"""

import time
from dataclasses import dataclass

import numpy as np

from .errors import NonFinite
from .semidiscrete import Semidiscrete, State


@dataclass(frozen=True)
class SspRk54Tableau:
    alpha: tuple
    beta: tuple

    @property
    def stages(self):
        return len(self.alpha)

    def stage_times(self):
        """Effective time fraction of each state y_0..y_5 within the step."""
        c = [0.0]
        for arow, brow in zip(self.alpha, self.beta):
            c.append(sum(a * c[k] for k, a in enumerate(arow)) + sum(brow))
        return tuple(c)


TABLEAU = SspRk54Tableau(
    alpha=(
        (1.0,),
        (0.444370493651235, 0.555629506348765),
        (0.620101851488403, 0.0, 0.379898148511597),
        (0.178079954393132, 0.0, 0.0, 0.821920045606868),
        (0.0, 0.0, 0.517231671970585, 0.096059710526147, 0.386708617503269),
    ),
    beta=(
        (0.391752226571890,),
        (0.0, 0.368410593050371),
        (0.0, 0.0, 0.251891774271694),
        (0.0, 0.0, 0.0, 0.544974750228521),
        (0.0, 0.0, 0.0, 0.063692468666290, 0.226007483236906),
    ),
)
STAGE_TIMES = TABLEAU.stage_times()


def _check(y, t, stage, limit):
    if isinstance(y, np.ndarray):
        if not np.all(np.isfinite(y)):
            raise NonFinite(f"non-finite values in stage {stage} of the step from t={t:g}", t, stage)
        if limit is not None and np.max(np.abs(y)) > limit:
            raise NonFinite(
                f"solution exceeded {limit:.3g} in stage {stage} of the step from t={t:g} "
                "(unstable time step)", t, stage,
            )


def ssprk54_step(y, t, dt, f, closer=None, frozen_boundary=False, limit=None, tableau=TABLEAU):
    """Advance ``y' = f(y, t)`` by one step.

    `y` may be any object supporting ``+`` and scalar ``*`` (arrays, floats,
    numpy polynomials). `closer(y, t)`, if given, recovers algebraic boundary
    entries in place before each evaluation of `f` and on the result; with
    `frozen_boundary` it is always called at ``t`` instead of the stage time.
    """
    c = STAGE_TIMES if tableau is TABLEAU else tableau.stage_times()
    ys = [y]
    derivs = {}
    for i, (arow, brow) in enumerate(zip(tableau.alpha, tableau.beta), start=1):
        acc = None
        for k, a in enumerate(arow):
            if a:
                term = a * ys[k]
                acc = term if acc is None else acc + term
        for k, b in enumerate(brow):
            if not b:
                continue
            if k not in derivs:
                tk = t + c[k] * dt
                if closer is not None:
                    closer(ys[k], t if frozen_boundary else tk)
                derivs[k] = f(ys[k], tk)
            term = (b * dt) * derivs[k]
            acc = term if acc is None else acc + term
        _check(acc, t, i, limit)
        ys.append(acc)
    out = ys[-1]
    if closer is not None:
        closer(out, t + dt)
    return out


def amplification(z):
    """Stability function R(z): one step of the scheme on ``y' = z y`` from ``y = 1``."""
    z = np.asarray(z, dtype=complex)
    one = np.ones_like(z)
    r = ssprk54_step(one, 0.0, 1.0, lambda y, t: z * y)
    return complex(r) if r.ndim == 0 else r


def step(state, dt, rhs_evaluator, boundary_closer=None, frozen_boundary=False, limit=None):
    """Advance a (u, v) State by `dt`.

    ``rhs_evaluator(u, v, t) -> (du, dv)``; ``boundary_closer(u, v, t)``
    overwrites boundary entries in place.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    y = np.stack([state.u, state.v])
    f = lambda y, t: np.stack(rhs_evaluator(y[0], y[1], t))  # noqa: E731
    closer = None
    if boundary_closer is not None:
        closer = lambda y, t: boundary_closer(y[0], y[1], t)  # noqa: E731
    y = ssprk54_step(y, state.t, dt, f, closer, frozen_boundary, limit)
    return State(y[0].copy(), y[1].copy(), state.t + dt)


def _as_pair(weights):
    if isinstance(weights, (tuple, list)):
        return weights[0], weights[1]
    return weights, weights


def integrate(spec, grid, weights, dt, t_final, observer=None, observe_times=(),
              boundary_time="stage", corner_order="y-last", blowup=1e8):
    """Integrate from ``t = 0`` to `t_final` with a fixed step.

    Parameters
    ----------
    weights : WeightSet or (WeightSet, WeightSet)
        x and y weights; a single set is used for both directions.
    observer : callable, optional
        ``observer(state, wall_seconds)`` called at each of `observe_times`
        with a copy of the state.
    boundary_time : {"stage", "frozen"}
        Time at which face data are evaluated inside a step.
    blowup : float or None
        Values larger than ``blowup * max(1, max|U0|)`` are treated as an
        instability and raise NonFinite; None disables the check.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    if t_final < 0:
        raise ValueError("t_final must be non-negative")
    if boundary_time not in ("stage", "frozen"):
        raise ValueError("boundary_time must be 'stage' or 'frozen'")
    tol = 1e-12 * max(t_final, 1.0)
    nsteps = int(round(t_final / dt))
    if abs(nsteps * dt - t_final) > tol:
        raise ValueError(f"dt={dt} does not divide t_final={t_final}")
    obs_steps = {}
    for t_obs in observe_times:
        k = int(round(t_obs / dt))
        if abs(k * dt - t_obs) > tol or not (0 <= k <= nsteps):
            raise ValueError(f"observation time {t_obs} is not a multiple of dt in [0, t_final]")
        obs_steps[k] = t_obs

    wx, wy = _as_pair(weights)
    sd = Semidiscrete(spec, grid, wx, wy, corner_order)
    state = sd.init_state()
    sd.close_boundary(state.u, state.v, 0.0)
    y = np.stack([state.u, state.v])
    limit = None
    if blowup is not None:
        limit = blowup * max(1.0, float(np.max(np.abs(y))))

    def f(y, t):
        du, dv = sd.rhs(y[0], y[1], t)
        return np.stack([du, dv])

    def closer(y, t):
        sd.close_boundary(y[0], y[1], t)

    frozen = boundary_time == "frozen"
    t0 = time.perf_counter()
    if observer is not None and 0 in obs_steps:
        observer(State(y[0].copy(), y[1].copy(), 0.0), 0.0)
    for k in range(1, nsteps + 1):
        t = (k - 1) * dt
        y = ssprk54_step(y, t, dt, f, closer, frozen, limit)
        if observer is not None and k in obs_steps:
            observer(State(y[0].copy(), y[1].copy(), k * dt), time.perf_counter() - t0)
    return State(y[0].copy(), y[1].copy(), nsteps * dt)
