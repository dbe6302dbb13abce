import math

import mpmath
import pytest
from hypothesis import given, strategies as st

from densint import bounds
from densint.errors import NotFound
from densint.estimators import delta_star

REL = 1e-9


def test_lower_bound_fc_examples():
    assert bounds.lower_bound_fc(1024, 8) == pytest.approx(math.sqrt(2) / 6 / 16, rel=REL)
    assert bounds.lower_bound_fc(1024, 8) == pytest.approx(0.014731, abs=5e-7)
    assert bounds.lower_bound_fc(10, 1e6) == pytest.approx(math.sqrt(2) / 6 * 3e6 / (1e6 + 19), rel=REL)
    assert bounds.lower_bound_fc(10, 1e6) == pytest.approx(0.70710, abs=1e-5)


def test_lower_bound_fc_branch_boundary():
    n, C = 10, 21.0  # 2n = C - 1
    first = math.sqrt(2) / 6 * math.sqrt(C / (2 * n))
    second = math.sqrt(2) / 6 * 3 * C / (C + 2 * n - 1)
    assert bounds.lower_bound_fc(n, C) == pytest.approx(first, rel=REL)
    assert bounds.evaluate("lower_bound_fc", n=n, C=C).regime == "2n>=C-1"
    assert bounds.evaluate("lower_bound_fc", n=n, C=C + 1).regime == "2n<C-1"
    assert bounds.lower_bound_fc(n, C + 1) == pytest.approx(math.sqrt(2) / 6 * 3 * 22 / 41, rel=REL)
    assert second >= first


def test_upper_bound_simple_examples():
    assert bounds.upper_bound_simple(1024, 8) == pytest.approx(0.25, rel=REL)
    assert bounds.upper_bound_simple(4, 8) == 2.0
    assert bounds.evaluate("upper_bound_simple", n=4, C=8).regime == "trivial"


@given(n=st.integers(1, 10**9), C=st.floats(1, 1e6))
def test_sandwich_ratio_is_constant(n, C):
    if 2 * n < C - 1 or 2 * C / n >= 1:
        return
    lo, hi = bounds.lower_bound_fc(n, C), bounds.upper_bound_simple(n, C)
    assert lo <= hi
    # 2 sqrt(2C/n) / (sqrt(C) / (6 sqrt n)) = 12 sqrt 2, independent of C and n
    assert hi / lo == pytest.approx(12 * math.sqrt(2), rel=1e-12)


def test_lower_bound_nonadaptive_examples():
    # 2^{-2.5} * 6 / sqrt(2!) / 16 = 6 / 128
    assert bounds.lower_bound_nonadaptive(256, 2, 6.0) == pytest.approx(6 / 128, rel=REL)
    assert bounds.lower_bound_nonadaptive(256, 2, 0.0) == 0.0
    vals = [bounds.lower_bound_nonadaptive(100, 3, a) for a in (0.5, 1, 2, 4, 8)]
    assert vals == sorted(vals)
    assert bounds.lower_bound_nonadaptive(100, 3, 2, vol_ratio=4) == pytest.approx(2 * bounds.lower_bound_nonadaptive(100, 3, 2))


def test_nonadaptive_validity_flag():
    assert bounds.nonadaptive_bound_valid(256, 2, 6.0)
    assert not bounds.nonadaptive_bound_valid(1, 3, 60.0)
    assert bounds.evaluate("lower_bound_nonadaptive", n=1, d=3, alpha=60.0).regime == "n-too-small"


def test_conductance_examples():
    d, delta = 2, 1 / math.sqrt(3)
    v = bounds.conductance_lb_metropolis(0.3, delta, 2.0, d, 0.0)
    assert v == pytest.approx(math.sqrt(math.pi / 2) * 0.09 / 48, rel=REL)
    assert v == pytest.approx(0.0023499640, rel=1e-8)
    assert v == pytest.approx(bounds.conductance_lb_ball(0.3, delta, 2.0, d), rel=REL)
    w = bounds.conductance_lb_unit_ball(3, 2.0, delta_star(3, 2.0))
    assert w == pytest.approx(math.sqrt(math.pi / 2) * (9 * 0.5 / 1600) * math.exp(-1) / 2, rel=REL)
    assert w == pytest.approx(0.000648, abs=5e-7)


def test_conductance_clamps():
    assert bounds.evaluate("conductance_lb_metropolis", l=1.0, delta=100.0, D=1.0, d=1).regime == "clamped"
    assert bounds.conductance_lb_metropolis(1.0, 100.0, 1.0, 1) == pytest.approx(1 / 8)


@given(l=st.floats(0.01, 1), delta=st.floats(0.01, 2), D=st.floats(0.5, 5), d=st.integers(1, 30),
       alpha=st.floats(0, 20), bump=st.floats(0.001, 2))
def test_conductance_monotonicity(l, delta, D, d, alpha, bump):
    f = bounds.conductance_lb_metropolis
    base = f(l, delta, D, d, alpha)
    assert f(l, delta, D, d, alpha + bump) <= base
    assert f(l, delta, D + bump, d, alpha) <= base
    assert f(min(1.0, l + bump), delta, D, d, alpha) >= base


def test_metropolis_constant_high_precision():
    mpmath.mp.dps = 40
    exact = 8 * mpmath.mpf(1600) ** 2 / (81 * mpmath.pi)
    assert bounds.METROPOLIS_CONST == pytest.approx(float(exact), rel=1e-14)
    v = bounds.error_const_metropolis(1, 1 / math.sqrt(2), 0.0)
    assert v == pytest.approx(float(4 * exact), rel=REL)
    assert v == pytest.approx(321925.26, abs=0.01)


def test_error_const_decreasing_then_minimal_near_delta_star():
    d, alpha = 3, 4.0
    grid = [k / 1000 for k in range(1, int(1000 / alpha) + 1)]
    vals = [bounds.error_const_metropolis(d, x, alpha) for x in grid]
    assert all(a >= b for a, b in zip(vals, vals[1:]))
    assert bounds.error_const_metropolis(d, 1 / alpha, alpha) <= bounds.error_const_metropolis(d, 1.5 / alpha, alpha)


@pytest.mark.parametrize("alpha", [0, 1, 10, 100])
def test_tract_ceiling_dominates(alpha):
    for d in range(1, 51):
        assert bounds.error_const_metropolis(d, delta_star(d, alpha), alpha) <= bounds.tract_ceiling(d, alpha)


def test_classic_f1_error():
    assert bounds.classic_f1_error(0) == 1.0
    assert bounds.classic_f1_error(100) == pytest.approx(1 / 11, rel=REL)
    assert bounds.classic_f1_error(10**4) == pytest.approx(1 / 101, rel=REL)


def test_small_helpers():
    assert bounds.cheeger_gap_lb(0.3) == pytest.approx(0.045)
    assert bounds.asymptotic_variance_factor(0.5) == pytest.approx(3.0)


def test_registry():
    assert set(bounds.NAMES) >= {"lower_bound_fc", "upper_bound_simple", "tract_ceiling"}
    assert bounds.parameters("lower_bound_fc") == ["n", "C"]
    res = bounds.evaluate("classic_f1_error", n=100)
    assert (res.name, res.regime, res.inputs) == ("classic_f1_error", "single", {"n": 100})
    with pytest.raises(NotFound):
        bounds.evaluate("nope")
    for name in bounds.NAMES:
        assert bounds.parameters(name)
