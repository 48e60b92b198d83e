import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from telegraph_dqm.errors import DegenerateShape, IndexOutOfRange
from telegraph_dqm.splines import (
    eval_spline,
    make_shape,
    modified_nodal_value,
    zeta_nodal,
)

mp.mp.dps = 40


def _mp_constants(p, h):
    p, h = mp.mpf(p), mp.mpf(h)
    c, s = mp.cosh(p * h), mp.sinh(p * h)
    den = p * c * h - s
    return {
        "theta": (s - p * h) / (2 * den),
        "omega_prime": p * (1 - c) / den,
        "d2_center": -p**2 * s / den,
    }


def _mp_spline(p, h, r, order):
    """Classical piecewise form of the exponential cubic B-spline centred at 0."""
    p, h, r = mp.mpf(p), mp.mpf(h), mp.mpf(r)
    c, s = mp.cosh(p * h), mp.sinh(p * h)
    den = p * c * h - s
    a1 = p * h * c / den
    b1 = p / 2 * (c * (c - 1) + s**2) / (den * (1 - c))
    b2 = p / (2 * den)
    c1 = (mp.exp(-p * h) * (1 - c) + s * (mp.exp(-p * h) - 1)) / (4 * den * (1 - c))
    d1 = (mp.exp(p * h) * (c - 1) + s * (mp.exp(p * h) - 1)) / (4 * den * (1 - c))

    def z(x):
        a = abs(x)
        if a >= 2 * h:
            return mp.mpf(0)
        if a >= h:
            d = 2 * h - a
            return b2 * (mp.sinh(p * d) / p - d)
        return a1 + b1 * a + c1 * mp.exp(p * a) + d1 * mp.exp(-p * a)

    return mp.diff(z, r, order) if order else z(r)


@pytest.mark.parametrize("p,h", [(1.0, 0.1), (0.15, 0.05), (0.5, 0.1), (3.0, 0.05), (20.0, 0.1)])
def test_constants_match_high_precision(p, h):
    sh = make_shape(p, h)
    ref = _mp_constants(p, h)
    for name, val in ref.items():
        assert getattr(sh, name) == pytest.approx(float(val), rel=1e-14)
    assert sh.d2_neighbor == -sh.d2_center / 2
    assert sh.c == pytest.approx(np.cosh(p * h), rel=1e-15)


def test_documented_values_at_p1_h01():
    sh = make_shape(1.0, 0.1)
    assert sh.theta == pytest.approx(0.249875, abs=5e-7)
    assert sh.d2_center == pytest.approx(-300.20, abs=5e-3)


def test_small_p_limit():
    assert abs(make_shape(1e-4, 0.1).theta - 0.25) <= 1e-6
    sh = make_shape(1e-2, 0.1)     # p*h = 1e-3
    assert abs(sh.h**2 * sh.d2_center + 3) <= 1e-5


def test_limit_law_is_monotone():
    h = 0.1
    phs = [0.45, 0.3, 0.2, 0.1, 0.05, 0.01, 2e-3, 5e-4, 1e-4]
    gaps_t, gaps_d = [], []
    for ph in phs:
        sh = make_shape(ph / h, h)
        gaps_t.append(abs(sh.theta - 0.25))
        gaps_d.append(abs(h**2 * sh.d2_center + 3))
    assert all(a > b for a, b in zip(gaps_t, gaps_t[1:]))
    assert all(a > b for a, b in zip(gaps_d, gaps_d[1:]))


@pytest.mark.parametrize("ph", [2e-4, 9e-4, 1.1e-3, 5e-3])
def test_series_and_closed_forms_agree(ph):
    h = 0.05
    a = make_shape(ph / h, h, series_below=1.0)
    b = make_shape(ph / h, h, series_below=0.0)
    assert a.series and not b.series
    for name in ("theta", "omega_prime", "d2_center", "dn"):
        assert getattr(a, name) == pytest.approx(getattr(b, name), rel=1e-13)


def test_degenerate_shape_when_closed_form_forced():
    with pytest.raises(DegenerateShape):
        make_shape(1e-8, 0.1, series_below=0.0)
    make_shape(1e-8, 0.1)   # series path is fine


@pytest.mark.parametrize("p,h", [(0.0, 0.1), (-1.0, 0.1), (1.0, 0.0)])
def test_rejects_non_positive(p, h):
    with pytest.raises(ValueError):
        make_shape(p, h)


def test_nodal_values():
    sh = make_shape(1.0, 0.1)
    h = sh.h
    assert eval_spline(sh, 3, 3 * h) == pytest.approx(1.0, abs=1e-15)
    assert eval_spline(sh, 3, 4 * h) == pytest.approx(sh.theta, rel=1e-15)
    for order in (0, 1, 2):
        assert eval_spline(sh, 3, 6 * h, order) == 0.0


@pytest.mark.parametrize("p", [0.15, 0.5, 1.0, 2.0])
@pytest.mark.parametrize("h", [0.1, 0.05, 0.025])
def test_nodal_table_within_4_ulps(p, h):
    sh = make_shape(p, h)
    n = 9
    for i in range(n):
        for j in range(n):
            for order in (0, 1, 2):
                v = eval_spline(sh, i, j * h, order)
                ref = zeta_nodal(sh, i, j, order)
                if ref == 0.0:
                    assert v == 0.0
                else:
                    assert abs(v - ref) <= 4 * np.spacing(abs(ref)), (i, j, order)


@pytest.mark.parametrize("p,h", [(1.0, 0.1), (0.15, 0.05), (4.0, 0.1)])
def test_matches_classical_piecewise_form(p, h):
    sh = make_shape(p, h)
    rng = np.random.default_rng(5)
    for r in rng.uniform(-2.2 * h, 2.2 * h, 25):
        for order in (0, 1, 2):
            ref = float(_mp_spline(p, h, r, order))
            scale = max(1.0, abs(sh.d2_center)) if order == 2 else max(1.0, abs(sh.omega_prime))
            assert eval_spline(sh, 0, r, order) == pytest.approx(ref, abs=1e-12 * scale)


@pytest.mark.parametrize("order", [0, 1, 2])
def test_continuity_at_knots(order):
    sh = make_shape(1.0, 0.1)
    h = sh.h
    slope = {0: abs(sh.omega_prime), 1: abs(sh.d2_center), 2: 1e4}[order]
    for k in (-2, -1, 0, 1, 2):
        lo = eval_spline(sh, 0, k * h * (1 - 1e-8) if k else -1e-9, order)
        hi = eval_spline(sh, 0, k * h * (1 + 1e-8) if k else 1e-9, order)
        if order == 1 and k == 0:
            assert lo == pytest.approx(-hi, abs=1e-6)   # odd function, zero at the centre
            assert abs(lo) < 1e-6
            continue
        assert abs(lo - hi) <= 10 * 1e-8 * h * slope + 1e-12


@settings(max_examples=60, deadline=None)
@given(
    p=st.floats(0.05, 5.0),
    off=st.floats(2.0, 10.0),
    sign=st.sampled_from([-1, 1]),
    order=st.sampled_from([0, 1, 2]),
)
def test_zero_outside_support(p, off, sign, order):
    sh = make_shape(p, 0.1)
    assert eval_spline(sh, 4, 0.4 + sign * off * 0.1, order) == 0.0


def test_eval_is_vectorised_and_symmetric():
    sh = make_shape(1.0, 0.1)
    x = np.linspace(-0.25, 0.25, 51)
    v = eval_spline(sh, 0, x)
    assert v.shape == x.shape
    assert np.allclose(v, v[::-1], atol=1e-15)
    d = eval_spline(sh, 0, x, 1)
    assert np.allclose(d, -d[::-1], atol=1e-13)
    with pytest.raises(ValueError):
        eval_spline(sh, 0, 0.0, 3)


def test_modified_basis_examples():
    sh = make_shape(1.0, 0.1)
    n = 11
    assert modified_nodal_value(sh, 5, 5, 0, n) == 1.0
    assert modified_nodal_value(sh, 2, 1, 0, n) == 0.0
    assert modified_nodal_value(sh, 1, 1, 1, n) == pytest.approx(sh.omega_prime, rel=1e-15)
    assert modified_nodal_value(sh, 1, 1, 0, n) == pytest.approx(1 + 2 * sh.theta)
    # mirror symmetry of the far end
    for j in range(1, n + 1):
        assert modified_nodal_value(sh, n, n + 1 - j, 0, n) == modified_nodal_value(sh, 1, j, 0, n)
        assert modified_nodal_value(sh, n - 1, n + 1 - j, 1, n) == pytest.approx(
            -modified_nodal_value(sh, 2, j, 1, n))


def test_modified_basis_has_natural_ends():
    # every basis member has zero second derivative at x_1 and x_N
    sh = make_shape(0.7, 0.1)
    n = 11
    for k in range(1, n + 1):
        assert modified_nodal_value(sh, k, 1, 2, n) == pytest.approx(0.0, abs=1e-10)
        assert modified_nodal_value(sh, k, n, 2, n) == pytest.approx(0.0, abs=1e-10)


@pytest.mark.parametrize("args", [(0, 1, 0, 11), (1, 12, 0, 11), (1, 1, 0, 4)])
def test_modified_basis_index_errors(args):
    sh = make_shape(1.0, 0.1)
    with pytest.raises(IndexOutOfRange):
        modified_nodal_value(sh, *args)
