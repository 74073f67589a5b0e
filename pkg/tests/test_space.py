import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from muckenhoupt import (
    FiniteMetricMeasureSpace,
    InvalidSpaceError,
    critical_radii,
    doubling_constant,
    enumerate_distinct_balls,
    generate,
    validate_metric,
)
from muckenhoupt.oracle import doubling_oracle
from muckenhoupt.verify import standard_corpus


def test_validate_two_point_passes(two_point):
    assert validate_metric(two_point).ok


def test_validate_reports_asymmetry():
    report = validate_metric(np.array([[0.0, 1.0], [2.0, 0.0]]), [1.0, 1.0])
    assert not report.ok
    assert report.axiom == "symmetry"
    assert report.witness == (0, 1)


def test_validate_reports_triangle():
    dist = np.array([[0, 1, 5], [1, 0, 1], [5, 1, 0]], dtype=float)
    report = validate_metric(dist)
    assert report.axiom == "triangle"
    assert set(report.witness) == {0, 1, 2}


@pytest.mark.parametrize("dist, measure, axiom", [
    ([[0, 0], [0, 0]], [1, 1], "positivity"),
    ([[1, 1], [1, 0]], [1, 1], "identity"),
    ([[0, 1], [1, 0]], [1, 0], "measure"),
    ([[0.0]], [1.0], "size"),
])
def test_validate_other_axioms(dist, measure, axiom):
    assert validate_metric(np.array(dist, dtype=float), measure).axiom == axiom


def test_constructor_rejects_bad_input():
    with pytest.raises(InvalidSpaceError):
        FiniteMetricMeasureSpace([[0, 1, 5], [1, 0, 1], [5, 1, 0]], [1, 1, 1])


def test_critical_radii(two_point):
    assert critical_radii(two_point, 0).tolist() == [1.0, 2.0]
    grid = generate("grid1d", n=3)
    assert critical_radii(grid, 0).tolist() == [1.0, 2.0, 3.0]


@pytest.mark.parametrize("name, space", standard_corpus(max_n=64))
def test_critical_radii_balls_contain_center(name, space):
    for c in range(space.n):
        for r in critical_radii(space, c):
            assert c in space.ball(c, r)


def test_two_point_ball_family(two_point):
    fam = enumerate_distinct_balls(two_point)
    assert fam.dedup
    assert fam.member_sets() == {frozenset({0}), frozenset({1}), frozenset({0, 1})}


@pytest.mark.parametrize("n", [2, 5, 16])
def test_ball_family_matches_subset_oracle(n):
    space = generate("grid1d", n=n)
    brute = set()
    for c in range(n):
        for r in critical_radii(space, c):
            brute.add(frozenset(np.flatnonzero(space.dist[c] < r).tolist()))
    fam = enumerate_distinct_balls(space)
    assert fam.member_sets() == brute
    assert len(fam) == len(brute) <= n * n
    # intervals of a line: n singletons plus every longer interval reachable
    # as an open ball


@pytest.mark.parametrize("name, space", standard_corpus(max_n=64))
def test_ball_sets_exact_and_complete(name, space, rng):
    fam = enumerate_distinct_balls(space)
    sets = fam.member_sets()
    for b in fam:
        assert b.members == frozenset(np.flatnonzero(space.dist[b.center] < b.radius).tolist())
    maxd = space.dist.max()
    for _ in range(200):
        c = int(rng.integers(space.n))
        r = float(rng.uniform(0, 1.2 * maxd)) or 1e-9
        assert space.ball(c, r).members in sets


def test_doubling_two_point(two_point):
    assert doubling_constant(two_point) == 2.0


def test_doubling_dominant_mass():
    space = FiniteMetricMeasureSpace([[0, 1], [1, 0]], [1.0, 1e6])
    assert doubling_constant(space) == 1e6 + 1


@pytest.mark.parametrize("name, space", standard_corpus(max_n=64))
def test_doubling_matches_dense_oracle(name, space):
    exact = doubling_constant(space)
    sampled = doubling_oracle(space, 1000)
    assert exact >= 1.0
    assert sampled <= exact * (1 + 1e-12)
    assert doubling_oracle(space, 1000, include_breakpoints=True) == pytest.approx(exact, rel=1e-12)


@pytest.mark.parametrize("n", [4, 8, 16, 64, 256])
def test_uniform_grid_doubling_regression(n):
    # dense-radius oracle gives 3 for every n >= 4: B(x, 1) = {x} while
    # B(x, 2) adds both neighbours
    assert doubling_constant(generate("grid1d", n=n)) == 3.0


def test_generate_grid1d():
    space = generate("grid1d", n=3, a=0, b=2)
    assert space.coords[:, 0].tolist() == [0.0, 1.0, 2.0]
    assert space.measure.tolist() == [1.0, 1.0, 1.0]
    assert space.dist[0, 2] == 2.0


def test_generate_cell_centered():
    space = generate("grid1d", n=4, a=-1, b=1, cell_centered=True)
    assert space.coords[:, 0].tolist() == [-0.75, -0.25, 0.25, 0.75]


def test_generate_is_deterministic():
    a = generate("random_euclidean", n=16, dim=2, seed=7)
    b = generate("random_euclidean", n=16, dim=2, seed=7)
    assert np.array_equal(a.dist, b.dist) and np.array_equal(a.measure, b.measure)
    c = generate("random_euclidean", n=16, dim=2, seed=8)
    assert not np.array_equal(a.dist, c.dist)


def test_ultrametric_inequality():
    space = generate("ultrametric", branching=2, depth=3)
    d = space.dist
    assert space.n == 8
    for x, y, z in itertools.product(range(space.n), repeat=3):
        assert d[x, z] <= max(d[x, y], d[y, z])


@pytest.mark.parametrize("name, space", standard_corpus(max_n=128))
def test_generated_spaces_validate(name, space):
    assert validate_metric(space).ok


@pytest.mark.parametrize("kind, params", [
    ("grid1d", dict(n=1)),
    ("grid2d", dict(nx=1, ny=1)),
    ("ultrametric", dict(branching=1, depth=2)),
    ("nope", dict()),
    ("grid1d", dict(n=4, bogus=1)),
])
def test_generate_rejects_bad_params(kind, params):
    with pytest.raises(ValueError):
        generate(kind, **params)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-500, 500), min_size=2, max_size=12, unique=True),
       st.lists(st.floats(0.1, 10), min_size=12, max_size=12))
def test_doubling_at_least_one_and_matches_oracle(xs, masses):
    from muckenhoupt import from_points

    space = from_points(np.array(xs, dtype=float) / 10, measure=masses[: len(xs)])
    exact = doubling_constant(space)
    assert exact >= 1.0
    assert doubling_oracle(space, 200, include_breakpoints=True) == pytest.approx(exact, rel=1e-12)
