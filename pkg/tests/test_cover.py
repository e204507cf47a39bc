import itertools
import math

import pytest
from hypothesis import given
import hypothesis.strategies as st

from approxlis.core import normalize
from approxlis.cover import (
    Segment, build_family, cover_approx, cover_exact, depth, family_query, level_schedule,
)
from approxlis.errors import ContractViolation
from approxlis.oracle import lis_dp, validate_cover
from tests.helpers import points_of, random_permutation

small_perms = st.integers(min_value=0, max_value=22).flatmap(lambda n: st.permutations(list(range(n))))


@given(small_perms)
def test_exact_covers_are_valid_with_depth_at_most_k(perm):
    points = points_of(perm)
    for k in range(1, lis_dp(perm) + 2):
        segments = cover_exact(points, k)
        verdict = validate_cover(points, segments, k, k)
        assert verdict.ok, verdict.reason
        assert depth(segments) <= k


@given(small_perms)
def test_approximate_covers_are_valid_and_shallow(perm):
    points = points_of(perm)
    top = lis_dp(perm) + 1
    for k1, k2 in itertools.combinations(range(1, top + 1), 2):
        segments = cover_approx(points, k1, k2)
        verdict = validate_cover(points, segments, k1, k2)
        assert verdict.ok, verdict.reason
        assert depth(segments) <= max(1, math.ceil(k1 / (k2 - k1)))


def test_cover_one_is_every_point():
    points = points_of([2, 0, 1])
    assert [s.score for s in cover_exact(points, 1)] == [1, 1, 1]


def test_exact_cover_of_sorted_array():
    segments = cover_exact(points_of(range(4)), 2)
    assert [(s.begin, s.end) for s in segments] == [(0, 1), (1, 2), (2, 3)]
    assert depth(segments) == 2


def test_cover_without_long_chain_is_empty():
    assert cover_exact(points_of(range(5, 0, -1)), 2) == []


def test_bad_parameters():
    with pytest.raises(ContractViolation):
        cover_exact(points_of([0]), 0)
    with pytest.raises(ContractViolation):
        cover_approx(points_of([0, 1]), 2, 2)


def test_depth_counts_touching_intervals():
    segments = [Segment(0, 3, ()), Segment(3, 5, ()), Segment(4, 9, ()), Segment(10, 11, ())]
    assert depth(segments) == 2
    assert depth([]) == 0


def test_level_schedule_shape():
    schedule = level_schedule(1.5, 2, 4, limit=100, upper=100)
    assert schedule[:4] == [(1, 1.0), (2, 2.0), (3, 3.0), (4, 4.0)]
    k1s = [k1 for k1, _ in schedule]
    assert k1s == sorted(set(k1s))
    for k1, k2 in schedule[4:]:
        assert k1 < k2 <= 100


def test_exact_family_answers_every_interval(rng):
    perm = random_permutation(rng, 16)
    family = build_family(points_of(perm), 1.5, 0)
    assert len(family) == 16
    for i in range(16):
        for j in range(i, 16):
            assert family_query(family, i, j)[0] == lis_dp(perm[i:j + 1])


@pytest.mark.parametrize("gamma", [1.25, 1.5])
@pytest.mark.parametrize("r", [2, 3])
def test_approximate_family_within_gamma_power(rng, gamma, r):
    n = 256
    perm = random_permutation(rng, n)
    family = build_family(points_of(perm), gamma, r)
    assert any(not level.exact for level in family.levels)
    for _ in range(100):
        i = rng.randrange(n)
        j = rng.randrange(i, n)
        opt = lis_dp(perm[i:j + 1])
        score, segment = family_query(family, i, j)
        assert opt / gamma ** r - 1e-9 <= score <= opt
        assert segment is not None and segment.inside(i, j)


def test_family_of_sorted_input_uses_approximate_levels():
    family = build_family(normalize(list(range(60))), 1.5, 2)
    assert any(not level.exact for level in family.levels)
    score, _ = family.query(0, 59)
    assert 60 / 1.5 ** 2 <= score <= 60


def test_family_query_rejects_reversed_interval():
    family = build_family(points_of([0, 1]), 1.5, 0)
    with pytest.raises(ContractViolation):
        family_query(family, 1, 0)


def test_gamma_out_of_range():
    with pytest.raises(ContractViolation):
        build_family(points_of([0, 1]), 2.5, 2)


def test_query_score_shrinks_with_the_interval(rng):
    perm = random_permutation(rng, 30)
    family = build_family(points_of(perm), 1.25, 2)
    for i in range(30):
        scores = [family.query(i, j)[0] for j in range(i, 30)]
        assert scores == sorted(scores)
