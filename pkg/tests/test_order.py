import itertools

import pytest

from approxlis.errors import ContractViolation, StaleHandleError
from approxlis.order import ListOrder, TreeOrder, make_order

BACKENDS = ["list", "tree"]


def check_against_positions(order, model):
    assert order.handles() == model
    assert len(order) == len(model)
    for a, b in itertools.combinations(model, 2):
        assert a < b and not b < a
        assert b > a
    for h in model:
        assert order.head < h < order.tail


@pytest.mark.parametrize("backend", BACKENDS)
def test_random_inserts_and_deletes(backend, rng):
    order = make_order(backend, seed=3)
    model = []
    for step in range(300):
        if model and rng.random() < 0.3:
            victim = model.pop(rng.randrange(len(model)))
            order.delete(victim)
        else:
            position = rng.randrange(len(model) + 1)
            anchor = model[position - 1] if position else order.head
            model.insert(position, order.insert_after(anchor, payload=step))
    check_against_positions(order, model)


@pytest.mark.parametrize("backend", BACKENDS)
def test_inserting_after_the_same_anchor(backend):
    order = make_order(backend)
    model = []
    for step in range(200):
        model.insert(0, order.insert_after(order.head, payload=step))
    check_against_positions(order, model)


def test_list_labeling_relabels_under_pressure():
    order = ListOrder()
    anchor = order.head
    for _ in range(5000):
        order.insert_after(order.head)
    for _ in range(200):
        anchor = order.insert_after(anchor)
    handles = order.handles()
    assert all(a < b for a, b in zip(handles, handles[1:]))
    assert order.relabels > 0


@pytest.mark.parametrize("backend", BACKENDS)
def test_stale_handles_raise(backend):
    order = make_order(backend)
    a = order.insert_after(order.head)
    b = order.insert_after(a)
    order.delete(a)
    with pytest.raises(StaleHandleError):
        a < b
    with pytest.raises(StaleHandleError):
        order.delete(a)
    with pytest.raises(StaleHandleError):
        order.insert_after(a)


@pytest.mark.parametrize("backend", BACKENDS)
def test_guards(backend):
    order = make_order(backend)
    assert order.head < order.tail
    assert not order.tail < order.head
    with pytest.raises(ContractViolation):
        order.insert_after(order.tail)
    with pytest.raises(ContractViolation):
        order.delete(order.head)


def test_handles_from_another_list_are_rejected():
    first, second = ListOrder(), TreeOrder()
    a = first.insert_after(first.head)
    b = second.insert_after(second.head)
    with pytest.raises(ContractViolation):
        a < b


@pytest.mark.parametrize("backend", BACKENDS)
def test_purge_keeps_only_referenced_handles(backend):
    order = make_order(backend)
    handles, anchor = [], order.head
    for i in range(50):
        anchor = order.insert_after(anchor, payload=i)
        handles.append(anchor)
    keep = handles[::3]
    assert order.purge(keep) == 50 - len(keep)
    assert order.handles() == keep
    assert all(not h.alive for h in handles if h not in keep)


def test_unknown_backend():
    with pytest.raises(ContractViolation):
        make_order("skiplist")
