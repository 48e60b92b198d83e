import numpy as np
import pytest

from telegraph_dqm.integrator import amplification
from telegraph_dqm.problem import DIRICHLET, FaceCondition, Grid, builtin
from telegraph_dqm.semidiscrete import State, rhs
from telegraph_dqm.splines import make_shape
from telegraph_dqm.stability import (
    REAL_TOL,
    STABLE,
    UNSTABLE,
    analyze,
    assemble_B,
    classify_roots,
    full_a_eigenvalues,
    is_stable,
    lambda_a_roots,
    max_stable_dt,
    spectrum_B,
)
from telegraph_dqm.weights import build_weights


def _homogeneous(alpha=1.0, beta=1.0):
    zero = lambda *a: 0.0 * a[0]   # noqa: E731
    faces = {f: FaceCondition(DIRICHLET, lambda s, t: 0.0 * s) for f in ("x_min", "x_max", "y_min", "y_max")}
    return builtin(1).__class__(alpha, beta, zero, zero, zero, faces)


def test_block_structure_5x5():
    w = build_weights(5, 1.0)
    ops = assemble_B(w, w, 1.0)
    assert ops.B.shape == (9, 9) and ops.m == 9
    b2 = w.order2[1:-1, 1:-1]
    # B_y is block diagonal with copies of the interior y block
    assert np.array_equal(ops.By[:3, :3], b2)
    assert np.array_equal(ops.By[3:6, 3:6], b2)
    assert not ops.By[:3, 3:].any()
    beta2 = assemble_B(w, w, 2.0)
    beta0 = assemble_B(w, w, 0.0)
    assert np.allclose(np.diag(beta2.B) - np.diag(beta0.B), -4.0, atol=1e-13)
    with pytest.raises(ValueError):
        assemble_B(w, w, 1.0, full=True)


def test_matvec_matches_semidiscrete_rhs():
    n = 9
    spec = _homogeneous(0.7, 1.3)
    g = Grid(n, n)
    w = build_weights(n, 0.5)
    ops = assemble_B(w, w, spec.beta)
    rng = np.random.default_rng(4)
    u = np.zeros((n, n))
    u[1:-1, 1:-1] = rng.standard_normal((n - 2, n - 2))
    _, dv = rhs(State(u, np.zeros_like(u)), spec, g, w, w)
    got = (ops.B @ u[1:-1, 1:-1].reshape(-1)).reshape(n - 2, n - 2)
    assert np.max(np.abs(got - dv[1:-1, 1:-1])) <= 1e-12 * np.max(np.abs(ops.B))


def test_lambda_a_roots():
    r = lambda_a_roots(0.0, 1.0)
    assert np.allclose(sorted(r.real), [-2.0, 0.0]) and not r.imag.any()
    r = lambda_a_roots(np.array([-5.0, -0.5]), 1.0)
    assert r.shape == (2, 2)
    assert np.allclose(r[0], [-1 + 2j, -1 - 2j])
    assert np.allclose(r * (r + 2.0) - np.array([[-5.0], [-0.5]]), 0.0)
    assert classify_roots(r, 1.0) == []
    assert classify_roots(np.array([0.5 + 0j]), 1.0) == [0]
    assert classify_roots(np.array([-0.5 + 1j]), 1.0) == [0]


@pytest.mark.parametrize("n", [11, 17, 21])
def test_example_grid_is_stable(n):
    rep = analyze(builtin(1), Grid(n, n), 1.0, 0.001)
    assert rep.verdict == STABLE
    assert rep.real_negative
    assert rep.max_re <= REAL_TOL * rep.rho
    assert rep.root_residual <= 1e-10
    assert rep.case_violations == []
    assert rep.halving_consistent
    assert rep.eigen_residual <= 1e-8
    assert rep.dt_max >= 0.001
    assert rep.spectrum.shape == ((n - 2) ** 2,)
    summary = rep.summary()
    assert summary["verdict"] == STABLE and summary["method"] == "kronecker"


def test_kronecker_and_dense_agree():
    w = build_weights(9, 1.0)
    k, _ = spectrum_B(w, w, 1.0, "kronecker")
    d, res = spectrum_B(w, w, 1.0, "dense")
    rho = np.max(np.abs(k))
    assert np.allclose(np.sort_complex(k), np.sort_complex(d), atol=1e-9 * rho)
    assert res <= 1e-8
    with pytest.raises(ValueError):
        spectrum_B(w, w, 1.0, "power")


def test_full_block_matrix_matches_root_pairs():
    w = build_weights(7, 1.0)
    alpha, beta = 1.0, 1.0
    lam_b, _ = spectrum_B(w, w, beta)
    pairs = lambda_a_roots(lam_b, alpha).reshape(-1)
    full = full_a_eigenvalues(w, w, alpha, beta)
    assert full.shape == pairs.shape
    scale = np.max(np.abs(pairs))
    for lam in full:
        assert np.min(np.abs(pairs - lam)) <= 1e-7 * scale


def test_dt_max_bracket_and_unstable_step():
    rep = analyze(builtin(1), Grid(11, 11), make_shape(1.0, 0.1), 0.5)
    assert rep.verdict == UNSTABLE
    assert rep.max_abs_r > 1.0
    dtm = rep.dt_max
    assert 0 < dtm < 0.5
    assert is_stable(rep.lambda_a, dtm)
    assert not is_stable(rep.lambda_a, dtm * (1 + 1e-6))
    # the bound sits where the extreme root leaves the region
    z = dtm * rep.lambda_a.reshape(-1)
    assert np.max(np.abs(amplification(z))) == pytest.approx(1.0, abs=1e-9)


def test_max_stable_dt_extremes():
    assert max_stable_dt(np.array([0.0 + 0j]), 0.1) == float("inf")
    # growth mode: only steps inside the 1e-12 region tolerance pass
    assert max_stable_dt(np.array([1.0 + 0j]), 0.1) < 1e-11
    dt = max_stable_dt(np.array([-1.0 + 0j]), 0.1)
    assert abs(amplification(-dt)) == pytest.approx(1.0, abs=1e-9)
    assert dt == pytest.approx(5.33147, abs=1e-4)   # R(-x) = -1 root of the polynomial


def test_halving_consistency():
    rep = analyze(builtin(1), Grid(11, 11), 1.0, 0.01)
    assert rep.verdict == STABLE and is_stable(rep.lambda_a, 0.005)
    with pytest.raises(ValueError):
        analyze(builtin(1), Grid(11, 11), 1.0, 0.0)
