import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from densint.errors import DomainError, InvalidArgument, InvalidDimension, PackingFailure
from densint.geometry import (
    ConvexBody,
    ball_volume_ratio,
    gamma_half_ratio,
    membership,
    packing_on_ball,
    uniform_sample,
    vol_unit_ball,
)
from densint.rng import ChainBudget, RngStream


def test_vol_unit_ball_examples():
    assert vol_unit_ball(1) == pytest.approx(2.0, rel=1e-14)
    assert vol_unit_ball(2) == pytest.approx(math.pi, rel=1e-14)
    assert vol_unit_ball(3) == pytest.approx(4 * math.pi / 3, rel=1e-14)


@pytest.mark.parametrize("d", [*range(1, 31), 63, 64, 65, 66, 100])
def test_vol_unit_ball_against_mpmath(d):
    exact = mpmath.pi ** (mpmath.mpf(d) / 2) / mpmath.gamma(mpmath.mpf(d) / 2 + 1)
    assert vol_unit_ball(d) == pytest.approx(float(exact), rel=1e-12)


@pytest.mark.parametrize("z", [0.01, 0.5, 1.0, 2.5, 10.0, 33.3, 500.0])
def test_gamma_half_ratio_against_mpmath(z):
    mp = mpmath.mpf(z)
    exact = mpmath.gamma(mp + mpmath.mpf(1) / 2) / mpmath.gamma(mp)
    assert gamma_half_ratio(z) == pytest.approx(float(exact), rel=1e-12)


def test_gamma_half_ratio_examples():
    assert gamma_half_ratio(0.5) == pytest.approx(1 / math.sqrt(math.pi), rel=1e-13)
    assert gamma_half_ratio(1.0) == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-13)
    assert gamma_half_ratio(10.0) <= math.sqrt(10.0)


def test_domain_errors():
    with pytest.raises(InvalidDimension):
        vol_unit_ball(0)
    with pytest.raises(DomainError):
        gamma_half_ratio(0.0)
    with pytest.raises(DomainError):
        gamma_half_ratio(-1.5)


@pytest.mark.parametrize("d", range(1, 21))
def test_gamma_and_volume_inequalities(d):
    z = (d + 1) / 2
    assert gamma_half_ratio(z) <= math.sqrt(z)
    assert ball_volume_ratio(d) <= math.sqrt((d + 1) / (2 * math.pi))


def test_ball_volume_ratio_uses_unit_zero_ball():
    assert ball_volume_ratio(1) == pytest.approx(1 / 2)
    assert ball_volume_ratio(3) == pytest.approx(math.pi / (4 * math.pi / 3))


def test_body_invariants():
    for d in (1, 2, 5):
        ball = ConvexBody.ball(d)
        assert ball.diameter == 2.0
        assert ball.volume == pytest.approx(vol_unit_ball(d))
        assert membership(ball, ball.center)
        cube = ConvexBody.cube(d)
        assert cube.diameter == pytest.approx(math.sqrt(d))
        assert cube.volume == 1.0
        assert membership(cube, cube.center)
    iv = ConvexBody.interval()
    assert (iv.dim, iv.diameter, iv.volume) == (1, 1.0, 1.0)


def test_membership_examples():
    ball = ConvexBody.ball(2)
    assert membership(ball, [0.0, 0.0])
    assert not membership(ball, [1.5, 0.0])
    assert membership(ball, [1.0, 0.0])
    assert membership(ConvexBody.cube(3), [0.5, 0.5, 1.0])


def test_membership_counts_and_checks_dimension():
    budget = ChainBudget()
    ball = ConvexBody.ball(3)
    for _ in range(5):
        membership(ball, np.zeros(3), budget)
    assert budget.membership_calls == 5
    with pytest.raises(InvalidArgument):
        membership(ball, np.zeros(2), budget)


def test_oracle_body():
    disk = ConvexBody.from_oracle(2, lambda X: np.sum(X * X, axis=1) <= 0.25, diameter=1.0)
    assert membership(disk, [0.0, 0.0])
    assert not membership(disk, [0.6, 0.0])
    assert not disk.can_sample


@pytest.mark.parametrize("body", [ConvexBody.ball(3), ConvexBody.cube(2), ConvexBody.interval()])
def test_uniform_sample_lands_inside(body):
    rng = RngStream(1, 0)
    for _ in range(200):
        assert membership(body, uniform_sample(body, rng))


def test_interval_sample_mean():
    X = ConvexBody.interval().sample(RngStream(2, 0), 10**6)
    assert abs(X.mean() - 0.5) <= 3 * (1 / math.sqrt(12)) / 1e3


def test_disk_sample_radius_fraction():
    X = ConvexBody.ball(2).sample(RngStream(3, 0), 10**6)
    frac = np.mean(np.linalg.norm(X, axis=1) <= 1 / math.sqrt(2))
    assert abs(frac - 0.5) <= 0.0015


def test_ball_sample_radial_law():
    # |X|^d is uniform on [0, 1] for uniform X in B^d
    d = 5
    X = ConvexBody.ball(d).sample(RngStream(4, 0), 2 * 10**5)
    u = np.linalg.norm(X, axis=1) ** d
    assert abs(u.mean() - 0.5) <= 3 * math.sqrt(1 / 12 / len(u))


def test_mc_volume_disk():
    rng = RngStream(5, 0)
    n = 10**6
    U = 2 * rng.random((n, 2)) - 1
    p = np.mean(ConvexBody.ball(2).contains(U))
    assert abs(4 * p - math.pi) <= 3 * 4 * math.sqrt(p * (1 - p) / n)


def test_packing_examples():
    p = packing_on_ball(1, 2)
    assert p.radius == 0.5
    np.testing.assert_array_equal(p.centers, [[0.0, 0.0]])
    p = packing_on_ball(2, 1)
    assert p.radius == 0.25
    np.testing.assert_allclose(np.sort(p.centers[:, 0]), [-0.5, 0.5])
    p = packing_on_ball(4, 2)
    assert p.radius == pytest.approx(0.25)
    assert p.m == 4
    assert np.all(np.linalg.norm(p.centers, axis=1) <= 0.75 + 1e-12)
    gaps = np.linalg.norm(p.centers[:, None] - p.centers[None], axis=-1)
    assert gaps[~np.eye(4, dtype=bool)].min() >= 0.5 - 1e-12


def test_packing_failure_and_errors():
    with pytest.raises(PackingFailure):
        packing_on_ball(2, 4)
    with pytest.raises(InvalidArgument):
        packing_on_ball(0, 2)
    with pytest.raises(InvalidDimension):
        packing_on_ball(3, 0)


@settings(max_examples=150, deadline=None)
@given(m=st.integers(1, 80), d=st.integers(1, 4))
def test_packing_invariants(m, d):
    try:
        p = packing_on_ball(m, d)
    except PackingFailure:
        return
    assert p.m == m and p.dim == d
    assert p.radius == pytest.approx(0.5 * m ** (-1 / d))
    assert np.all(np.linalg.norm(p.centers, axis=1) <= 1 - p.radius + 1e-12)
    if m > 1:
        gaps = np.linalg.norm(p.centers[:, None] - p.centers[None], axis=-1)
        assert gaps[~np.eye(m, dtype=bool)].min() >= 2 * p.radius - 1e-12
    assert p.is_valid()
