import pytest
from hypothesis import given
import hypothesis.strategies as st

from approxlis.core import (
    IncrementalLIS, Point, decreasing_partition, incremental_lis, lis_static, normalize,
)
from approxlis.errors import ContractViolation
from approxlis.oracle import lis_dp
from tests.helpers import is_increasing_chain, points_of

values_with_ties = st.lists(st.integers(min_value=0, max_value=12), max_size=60)


def test_lis_static_small_example():
    length, chain = lis_static(normalize([3, 1, 4, 5, 9, 2, 6]))
    assert length == 4
    assert len(chain) == 4 and is_increasing_chain(chain)


def test_lis_static_sorted_and_reversed():
    assert lis_static(points_of(range(10)))[0] == 10
    assert lis_static(points_of(range(10, 0, -1)))[0] == 1
    assert lis_static([]) == (0, ())


@given(values_with_ties)
def test_lis_static_matches_dp(values):
    length, chain = lis_static(normalize(values))
    assert length == lis_dp(values)
    assert len(chain) == length
    assert all(values[a.x] < values[b.x] for a, b in zip(chain, chain[1:]))


@given(values_with_ties)
def test_normalize_keeps_strict_lis(values):
    points = normalize(values)
    assert sorted(p.y for p in points) == list(range(len(values)))
    assert lis_dp([p.y for p in points]) == lis_dp(values)


def test_normalize_equal_values_never_increase():
    points = normalize([2, 2, 2])
    assert [p.y for p in points] == [2, 1, 0]


def test_incremental_prefixes(rng):
    values = list(range(40))
    rng.shuffle(values)
    acc = incremental_lis()
    for i, p in enumerate(points_of(values)):
        assert acc.append(p) == lis_dp(values[:i + 1])
    assert is_increasing_chain(acc.chain())


def test_incremental_prepend_tracks_suffix(rng):
    values = list(range(30))
    rng.shuffle(values)
    points = points_of(values)
    acc = incremental_lis(prepend=True)
    for i in range(len(points) - 1, -1, -1):
        assert acc.prepend_point(points[i]) == lis_dp(values[i:])
    chain = acc.chain()
    assert len(chain) == lis_dp(values) and is_increasing_chain(chain)


def test_incremental_rejects_out_of_order_points():
    acc = IncrementalLIS()
    acc.append(Point(3, 0))
    with pytest.raises(ContractViolation):
        acc.append(Point(2, 1))
    with pytest.raises(ContractViolation):
        acc.prepend_point(Point(5, 1))


@given(st.permutations(list(range(25))))
def test_decreasing_partition_size_equals_lis(perm):
    parts = decreasing_partition(points_of(perm))
    assert len(parts) == lis_dp(perm)
    assert sorted(p.x for part in parts for p in part) == list(range(25))
    for part in parts:
        assert all(a.x < b.x and a.y > b.y for a, b in zip(part, part[1:]))
