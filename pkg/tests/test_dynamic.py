import pytest

from approxlis.config import StructureConfig
from approxlis.dynamic import DynamicLIS, height_bound
from approxlis.errors import ContractViolation
from approxlis.oracle import check_chain, lis_dp


def replay_random_ops(structure, model, rng, ops, epsilon, max_size=24, queries=2):
    for _ in range(ops):
        if model and (len(model) >= max_size or rng.random() < 0.45):
            position = rng.randrange(len(model))
            removed = structure.delete(position)
            assert removed.value == model.pop(position)
        else:
            position = rng.randint(0, len(model))
            value = rng.randrange(30)
            structure.insert(position, value)
            model.insert(position, value)
        assert structure.values() == model
        for _ in range(queries):
            if not model:
                assert structure.query() == 0
                continue
            i = rng.randrange(len(model))
            j = rng.randrange(i, len(model))
            score, chain = structure.query_chain(i, j)
            opt = lis_dp(model[i:j + 1])
            assert opt / (1 + epsilon) - 1e-9 <= score <= opt
            assert len(chain) >= score
            verdict = check_chain(model, chain, i, j)
            assert verdict.ok, verdict.reason


@pytest.mark.parametrize("epsilon", [1.0, 0.5])
def test_mixed_updates_keep_queries_within_bounds(rng, epsilon):
    model = [rng.randrange(30) for _ in range(12)]
    structure = DynamicLIS.from_values(model, epsilon)
    replay_random_ops(structure, model, rng, 40, epsilon)


def test_tree_backend(rng):
    config = StructureConfig(order_backend="tree", seed=5)
    structure = DynamicLIS(0.5, config)
    replay_random_ops(structure, [], rng, 30, 0.5)


def test_appending_a_sorted_run():
    structure = DynamicLIS(0.5)
    for i in range(24):
        structure.insert(i, i)
        assert structure.query() == i + 1


def test_equal_values_do_not_increase():
    structure = DynamicLIS(0.5)
    for position in (0, 1, 0, 2, 1):
        structure.insert(position, 5)
    assert structure.query() == 1
    structure.insert(5, 6)
    structure.insert(0, 4)
    assert structure.query() == 3


def test_empty_then_refill():
    structure = DynamicLIS(1.0)
    assert structure.query() == 0
    for i in range(5):
        structure.insert(0, i)
    while len(structure):
        structure.delete(len(structure) - 1)
    assert structure.query() == 0 and structure.root is None
    structure.insert(0, 3)
    structure.insert(1, 4)
    assert structure.query() == 2


def test_root_rebuild_purges_order_handles():
    structure = DynamicLIS.from_values(range(8), 0.5)
    rebuilds = structure.counters.primary_rebuilds
    structure.delete(0)
    structure.delete(0)
    assert structure.counters.primary_rebuilds > rebuilds
    assert structure.stats()["order_elements"] == len(structure) == 6
    assert not structure.dead


def test_audit_small_instances(rng):
    structure = DynamicLIS.from_values([rng.randrange(20) for _ in range(10)], 0.5)
    assert structure.audit() == []
    for _ in range(10):
        if rng.random() < 0.5 and len(structure):
            structure.delete(rng.randrange(len(structure)))
        else:
            structure.insert(rng.randint(0, len(structure)), rng.randrange(20))
        assert structure.audit() == []


def test_contract_violations():
    with pytest.raises(ContractViolation):
        DynamicLIS(0.0)
    structure = DynamicLIS.from_values([2, 1, 3], 0.5)
    with pytest.raises(ContractViolation):
        structure.insert(5, 0)
    with pytest.raises(ContractViolation):
        structure.delete(3)
    with pytest.raises(ContractViolation):
        structure.query(2, 0)


def test_stats_report_activity(rng):
    structure = DynamicLIS.from_values([rng.randrange(50) for _ in range(16)], 0.5)
    for i in range(6):
        structure.insert(i, rng.randrange(50))
    stats = structure.stats()
    assert stats["live"] == 22
    assert stats["merges"] > 0
    assert stats["max_cover_depth"] <= max(structure.depth_bound(primary.height)
                                           for primary, _ in structure._secondary_nodes())


@pytest.mark.slow
def test_longer_random_run(rng):
    model = [rng.randrange(30) for _ in range(32)]
    structure = DynamicLIS.from_values(model, 0.5)
    replay_random_ops(structure, model, rng, 150, 0.5, max_size=48, queries=1)
    for primary, node in structure._secondary_nodes():
        assert node.family.max_depth() <= structure.depth_bound(primary.height)


def test_audit_with_approximate_levels(rng):
    config = StructureConfig(epsilon_prime=0.3)
    model = list(range(0, 60, 2))
    structure = DynamicLIS.from_values(model, 0.5, config)
    assert any(not level.exact for level in structure.root.secondary.family.levels)
    assert structure.audit() == []
    for _ in range(20):
        if rng.random() < 0.4:
            position = rng.randrange(len(model))
            structure.delete(position)
            model.pop(position)
        else:
            position = rng.randint(0, len(model))
            value = rng.randrange(60)
            structure.insert(position, value)
            model.insert(position, value)
        assert structure.audit() == []
        score, chain = structure.query_chain()
        assert 0 < score <= lis_dp(model)
        verdict = check_chain(model, chain, 0, len(model) - 1)
        assert verdict.ok, verdict.reason


def test_height_bound_values():
    assert [height_bound(m) for m in (0, 1, 2, 3, 4)] == [0, 0, 3, 4, 5]
    for m in range(2, 200):
        assert height_bound((3 * m) // 4) <= height_bound(m) - 1


def test_rebuilt_children_stay_below_their_parent(rng):
    structure = DynamicLIS.from_values(range(32), 0.5)
    for i in range(48):
        # small values near the front keep hitting the same bottom subtree
        structure.insert(rng.randint(0, 4), -i)
        stack = [structure.root]
        while stack:
            node = stack.pop()
            if not node.leaf:
                for child in (node.bottom, node.top):
                    assert child.height <= node.height - 1
                    stack.append(child)
    opt = lis_dp(structure.values())
    assert opt / 1.5 - 1e-9 <= structure.query() <= opt
