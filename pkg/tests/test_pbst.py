import pytest
from hypothesis import given
import hypothesis.strategies as st

from approxlis.errors import ContractViolation
from approxlis.pbst import EMPTY, PersistentTree

operations = st.lists(st.tuples(st.booleans(), st.integers(min_value=0, max_value=60)), max_size=120)


def tree_of(keys):
    return PersistentTree.from_sorted((k, str(k)) for k in sorted(set(keys)))


@given(operations)
def test_matches_sorted_dict(ops):
    tree, model = EMPTY, {}
    for is_insert, key in ops:
        if is_insert:
            tree = tree.insert(key, key * 2)
            model[key] = key * 2
        else:
            tree = tree.delete(key)
            model.pop(key, None)
        tree.check_invariants()
    assert list(tree.items()) == sorted(model.items())
    assert len(tree) == len(model)


def test_old_versions_survive_updates():
    v1 = tree_of(range(10))
    v2 = v1.delete(4).insert(20, "20")
    assert list(v1.keys()) == list(range(10))
    assert 4 not in v2 and 20 in v2 and 4 in v1


def test_split_and_join():
    tree = tree_of(range(20))
    lo, hi = tree.split(7)
    assert list(lo.keys()) == list(range(7))
    assert list(hi.keys()) == list(range(7, 20))
    lo, hi = tree.split(7, inclusive=True)
    assert max(lo.keys()) == 7
    joined = lo.join(hi)
    joined.check_invariants()
    assert list(joined.keys()) == list(range(20))


def test_join_rejects_interleaved_trees():
    with pytest.raises(ContractViolation):
        tree_of([1, 5]).join(tree_of([3, 9]))


def test_from_sorted_rejects_unsorted_keys():
    with pytest.raises(ContractViolation):
        PersistentTree.from_sorted([(2, None), (1, None)])


def test_join_of_very_different_heights():
    small, big = tree_of([0]), tree_of(range(1, 500))
    joined = small.join(big)
    joined.check_invariants()
    assert len(joined) == 500
    joined = big.join(tree_of([1000]))
    joined.check_invariants()


def test_delete_interval():
    tree = tree_of(range(0, 30, 3)).delete_interval(6, 17)
    tree.check_invariants()
    assert list(tree.keys()) == [0, 3, 18, 21, 24, 27]


def test_neighbour_searches():
    tree = tree_of([10, 20, 30])
    assert tree.find(25) == (20, "20")
    assert tree.find(20) == (20, "20")
    assert tree.find(5) is None
    assert tree.predecessor(20) == (10, "10")
    assert tree.ceiling(20) == (20, "20")
    assert tree.ceiling(21) == (30, "30")
    assert tree.successor(20) == (30, "30")
    assert tree.successor(30) is None
    assert tree.min_item() == (10, "10") and tree.max_item() == (30, "30")


@given(st.sets(st.integers(min_value=-50, max_value=50), max_size=40))
def test_ranks(keys):
    tree = tree_of(keys)
    ordered = sorted(keys)
    for rank, key in enumerate(ordered):
        assert tree.find_rank(rank)[0] == key
        assert tree.rank_of(key) == rank
    assert tree.find_rank(len(ordered)) is None
    assert tree.find_rank(-1) is None


def test_from_sorted_is_balanced():
    tree = tree_of(range(1000))
    tree.check_invariants()
    assert tree.height <= 11
