import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from muckenhoupt import check_truncation_bounds, doubling_constant, generate, level_set, maximal, truncate, whitney_cover
from muckenhoupt.verify import random_space
from muckenhoupt.whitney import ThresholdTooLowError, whitney_radii


def test_two_point_cover_and_truncation(two_point):
    f = np.array([1.0, 0.0])
    res = truncate(two_point, f, 0.75)
    assert res.level_set.tolist() == [True, False]
    assert len(res.cover.balls) == 1
    ball = res.cover.balls[0]
    assert (ball.center, ball.radius, ball.members) == (0, 0.125, frozenset({0}))
    assert res.f_t.tolist() == [1.0, 0.0]


def test_threshold_too_low(two_point):
    with pytest.raises(ThresholdTooLowError):
        truncate(two_point, [1.0, 0.0], 0.25)


def test_empty_level_set_returns_f(two_point):
    res = truncate(two_point, [1.0, 0.0], 5.0)
    assert res.cover is None
    assert res.f_t.tolist() == [1.0, 0.0]


def test_rejects_negative_and_nonpositive_t(two_point):
    with pytest.raises(ValueError):
        truncate(two_point, [-1.0, 0.0], 0.75)
    with pytest.raises(ValueError):
        level_set(two_point, [1.0, 0.0], 0.0)


def test_cover_rejects_degenerate_omega(grid64):
    with pytest.raises(ValueError):
        whitney_cover(grid64, [])
    with pytest.raises(ValueError):
        whitney_cover(grid64, np.arange(64))


def test_radii(grid64):
    omega = np.arange(10, 20)
    r = whitney_radii(grid64, omega)
    assert r[10] == pytest.approx(1 / 8)
    assert r[15] == pytest.approx(5 / 8)
    assert r[0] == 0.0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_cover_structure(seed):
    rng = np.random.default_rng(seed)
    space = random_space(rng, 48)
    if space.n < 2:
        return
    omega = rng.random(space.n) < 0.6
    omega[0], omega[-1] = True, False
    cover = whitney_cover(space, omega)
    # covers omega exactly, balls stay inside omega
    assert np.array_equal(cover.membership.any(axis=0), omega)
    r = whitney_radii(space, omega)
    assert np.array_equal(cover.radii, r[cover.centers])
    # greedy balls have pairwise disjoint fifth-radius balls
    g = cover.centers[cover.greedy]
    fifth = space.dist[g] < (r[g] / 5)[:, None]
    assert fifth.sum(axis=0).max() <= 1
    assert cover.overlap_max == cover.overlap()[omega].max()


@pytest.mark.parametrize("space", [generate("grid1d", n=64), generate("grid2d", nx=8, ny=8)])
def test_truncation_bounds(space, rng):
    c_mu = doubling_constant(space)
    for _ in range(5):
        f = rng.random(space.n) * (rng.random(space.n) < 0.5)
        Mf = maximal(space, f)
        for q in (0.5, 0.7, 0.9):
            t = float(np.quantile(Mf, q))
            if (Mf > t).all() or t <= 0:
                continue
            res = truncate(space, f, t, Mf)
            chk = check_truncation_bounds(space, f, t, res, c_mu=c_mu)
            assert chk.ok
            assert chk.worst_on_level_ratio <= 1 + 1e-9


def test_truncation_zero_function_no_warning(grid64):
    f = np.zeros(64)
    f[5] = 1.0
    Mf = maximal(grid64, f)
    t = float(np.quantile(Mf, 0.9))
    res = truncate(grid64, f, t, Mf)
    with np.errstate(all="raise"):
        assert check_truncation_bounds(grid64, f, t, res).ok
