import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from telegraph_dqm.errors import CoincidentNodes, NotDominant, TooFewNodes
from telegraph_dqm.splines import make_shape
from telegraph_dqm.weights import (
    Tridiagonal,
    assemble_first_order_system,
    build_weights,
    dump_csv,
    first_order_residual,
    first_order_weights,
    higher_order_weights,
    second_order_weights,
    thomas_solve,
)


def _central(x):
    return (x >= 0.25 - 1e-12) & (x <= 0.75 + 1e-12)


def test_system_structure_n11():
    sh = make_shape(1.0, 0.1)
    tri, rhs = assemble_first_order_system(11, sh)
    assert tri.sub.shape == (10,) and tri.diag.shape == (11,) and tri.sup.shape == (10,)
    for k in range(2, 9):          # rows 3..N-2 (1-based) are plain [theta, 1, theta]
        assert tri.sub[k - 1] == pytest.approx(0.249875, abs=5e-7)
        assert tri.diag[k] == 1.0
        assert tri.sup[k] == tri.sub[k - 1]
    assert tri.diag[0] == pytest.approx(1 + 2 * sh.theta)
    assert tri.sub[0] == 0.0       # psi_2(x_1)
    assert tri.sup[-1] == 0.0      # psi_{N-1}(x_N)
    half = sh.omega_prime / 2
    for i in range(2, 9):          # interior rhs column: two symmetric nonzeros
        col = rhs[:, i]
        nz = np.flatnonzero(col)
        assert list(nz) == [i - 1, i + 1]
        assert col[i - 1] == pytest.approx(half, rel=1e-14)
        assert col[i + 1] == pytest.approx(-half, rel=1e-14)
    assert np.count_nonzero(rhs[:, 0]) == 2
    assert np.count_nonzero(rhs[:, -1]) == 2


def test_too_few_nodes():
    with pytest.raises(TooFewNodes):
        assemble_first_order_system(4, make_shape(1.0, 1 / 3))
    with pytest.raises(TooFewNodes):
        build_weights(4, 1.0)


def test_thomas_examples():
    t = Tridiagonal(sub=np.zeros(4), diag=np.ones(5), sup=np.zeros(4))
    rhs = np.arange(10.0).reshape(5, 2)
    assert np.array_equal(thomas_solve(t, rhs), rhs)
    t = Tridiagonal(sub=np.array([1.0, 1.0]), diag=np.array([2.0, 2.0, 2.0]), sup=np.array([1.0, 1.0]))
    x = thomas_solve(t, np.array([1.0, 0.0, 0.0]))
    assert x.shape == (3,)
    assert np.allclose(x, [0.75, -0.5, 0.25], atol=1e-15)


def test_thomas_zero_pivot():
    t = Tridiagonal(sub=np.array([1.0]), diag=np.array([1.0, 1.0]), sup=np.array([1.0]))
    with pytest.raises(NotDominant):
        thomas_solve(t, np.array([1.0, 2.0]))
    t = Tridiagonal(sub=np.array([1.0]), diag=np.array([0.0, 1.0]), sup=np.array([1.0]))
    with pytest.raises(NotDominant):
        thomas_solve(t, np.array([1.0, 2.0]))


@settings(max_examples=40, deadline=None)
@given(n=st.integers(2, 30), m=st.integers(1, 4), seed=st.integers(0, 2**31))
def test_thomas_matches_dense_solve(n, m, seed):
    rng = np.random.default_rng(seed)
    sub = rng.uniform(-1, 1, n - 1)
    sup = rng.uniform(-1, 1, n - 1)
    diag = 2.5 + rng.uniform(0, 1, n)
    t = Tridiagonal(sub, diag, sup)
    rhs = rng.standard_normal((n, m))
    x = thomas_solve(t, rhs)
    dense = t.to_dense()
    assert np.max(np.abs(dense @ x - rhs)) <= 1e-13 * np.linalg.cond(dense) * np.max(np.abs(rhs))


@pytest.mark.parametrize("n", [5, 11, 21, 41, 81])
@pytest.mark.parametrize("p", [0.15, 0.5, 1.0])
def test_defining_residual_and_dominance(n, p):
    sh = make_shape(p, 1 / (n - 1))
    tri, _ = assemble_first_order_system(n, sh)
    assert tri.is_diagonally_dominant(strict=True)
    a1 = first_order_weights(n, sh)
    assert first_order_residual(a1, sh) <= 1e-12


@pytest.mark.parametrize("n", [7, 11, 21])
def test_second_order_row_sums(n):
    w = build_weights(n, 1.0)
    a2 = w.order2
    assert np.max(np.abs(a2.sum(axis=1))) <= 1e-12 * np.max(np.abs(a2))


def test_first_order_sin_n21():
    w = build_weights(21, 1.0)
    x = w.coords
    err = np.abs(w.order1 @ np.sin(x) - np.cos(x))
    assert err[1:-1].max() < 1e-2


def test_second_order_sin_n21():
    w = build_weights(21, 1.0)
    x = w.coords
    err = np.abs(w.order2 @ np.sin(x) + np.sin(x))
    assert err[1:-1].max() < 1e-1


@pytest.mark.parametrize("f,df,d2f", [
    (np.sin, np.cos, lambda x: -np.sin(x)),
    (np.exp, np.exp, np.exp),
])
@pytest.mark.parametrize("p", [0.15, 1.0])
def test_refinement_in_the_central_region(f, df, d2f, p):
    errs1, errs2 = [], []
    for n in (11, 21, 41):
        w = build_weights(n, p)
        x = w.coords
        m = _central(x)
        errs1.append(np.abs(w.order1 @ f(x) - df(x))[m].max())
        errs2.append(np.abs(w.order2 @ f(x) - d2f(x))[m].max())
    for e in (errs1, errs2):
        assert e[0] / e[1] >= 3 and e[1] / e[2] >= 3


def test_boundary_rows_are_first_order_accurate():
    # the natural end condition of the modified basis limits the boundary rows
    # of A to O(h); the error still halves with h
    e = []
    for n in (11, 21, 41):
        w = build_weights(n, 1.0)
        x = w.coords
        e.append(abs(w.order1[-1] @ np.sin(x) - np.cos(1.0)))
    assert 1.8 < e[0] / e[1] < 2.2 and 1.8 < e[1] / e[2] < 2.2


def test_recursion_is_literal():
    w = build_weights(9, 0.5)
    a, x = w.order1, w.coords
    i, j = 3, 6
    expected = 2 * (a[i, j] * a[i, i] - a[i, j] / (x[i] - x[j]))
    assert w.order2[i, j] == pytest.approx(expected, rel=1e-14)
    # higher orders go through the same step
    a3 = higher_order_weights(a, w.order2, x, 3)
    assert np.max(np.abs(a3.sum(axis=1))) <= 1e-12 * np.max(np.abs(a3))


def test_coincident_nodes():
    w = build_weights(6, 1.0)
    coords = np.array([0.0, 0.2, 0.2, 0.6, 0.8, 1.0])
    with pytest.raises(CoincidentNodes):
        second_order_weights(w.order1, coords)


def test_dump_round_trip(tmp_path):
    w = build_weights(7, 0.3)
    paths = dump_csv(w, str(tmp_path / "w"))
    back1 = np.loadtxt(paths[0], delimiter=",")
    back2 = np.loadtxt(paths[1], delimiter=",")
    assert np.array_equal(back1, w.order1)
    assert np.array_equal(back2, w.order2)
