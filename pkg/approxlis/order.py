"""
Order maintenance: a list under insert-after and delete that answers "does a precede b".

Handles stand in for real-valued coordinates in the fully dynamic structure, so they
compare with `<`. Two backends:

  - ListOrder: two-level list labeling. Items carry a small label inside their group and
    groups carry a tag; comparing two handles compares (tag, label). Groups are split when
    they fill up, and tags are respread over the smallest sparse enough tag range.
  - TreeOrder: a treap with parent pointers and subtree sizes; order compares ranks.

Both keep a head guard (before everything, can be inserted after) and a tail guard
(after everything).
"""

import logging
import random
from typing import Iterable, Iterator, List, Optional

from approxlis.config import ORDER_BACKENDS
from approxlis.errors import ContractViolation, StaleHandleError

logger = logging.getLogger(__name__)

_HEAD, _ITEM, _TAIL = -1, 0, 1


class OrderHandle:
    """An element of an order-maintenance list."""

    __slots__ = ("owner", "kind", "alive", "payload",
                 "group", "label", "prev", "next",
                 "left", "right", "parent", "priority", "size")

    def __init__(self, owner, kind: int = _ITEM, payload=None):
        self.owner = owner
        self.kind = kind
        self.alive = True
        self.payload = payload
        self.group = None
        self.label = 0
        self.prev = self.next = None
        self.left = self.right = self.parent = None
        self.priority = 0.0
        self.size = 1

    def __lt__(self, other: "OrderHandle") -> bool:
        return self.owner.order(self, other)

    def __gt__(self, other: "OrderHandle") -> bool:
        return self.owner.order(other, self)

    def __repr__(self) -> str:
        if self.kind == _HEAD:
            return "OrderHandle(-inf)"
        if self.kind == _TAIL:
            return "OrderHandle(+inf)"
        return f"OrderHandle({self.payload!r}{'' if self.alive else ', deleted'})"


class OrderMaintenance:
    """Common surface of both backends."""

    def __init__(self):
        self.head = OrderHandle(self, _HEAD)
        self.tail = OrderHandle(self, _TAIL)
        self.count = 0

    def __len__(self) -> int:
        return self.count

    def _check(self, handle: OrderHandle) -> None:
        if handle.owner is not self:
            raise ContractViolation("handle belongs to another order structure")
        if not handle.alive:
            raise StaleHandleError(f"{handle!r} was deleted")

    def order(self, a: OrderHandle, b: OrderHandle) -> bool:
        """True when a precedes b."""
        self._check(a)
        self._check(b)
        if a is b:
            return False
        if a.kind != _ITEM or b.kind != _ITEM:
            if a.kind == b.kind:
                return False
            return a.kind == _HEAD or b.kind == _TAIL
        return self._order(a, b)

    def insert_after(self, anchor: OrderHandle, payload=None) -> OrderHandle:
        self._check(anchor)
        if anchor.kind == _TAIL:
            raise ContractViolation("cannot insert after the tail guard")
        handle = OrderHandle(self, _ITEM, payload)
        self._insert_after(anchor, handle)
        self.count += 1
        return handle

    def delete(self, handle: OrderHandle) -> None:
        self._check(handle)
        if handle.kind != _ITEM:
            raise ContractViolation("guards cannot be deleted")
        self._delete(handle)
        handle.alive = False
        self.count -= 1

    def purge(self, keep: Iterable[OrderHandle]) -> int:
        """Delete every element not in `keep`; returns how many were dropped."""
        keep_ids = {id(h) for h in keep}
        doomed = [h for h in self.handles() if id(h) not in keep_ids]
        for handle in doomed:
            self.delete(handle)
        if doomed:
            logger.debug("purged %d order handles, %d remain", len(doomed), self.count)
        return len(doomed)

    def handles(self) -> List[OrderHandle]:
        """Live elements in list order, guards excluded."""
        return list(self._iter())

    def _order(self, a: OrderHandle, b: OrderHandle) -> bool:
        raise NotImplementedError

    def _insert_after(self, anchor: OrderHandle, handle: OrderHandle) -> None:
        raise NotImplementedError

    def _delete(self, handle: OrderHandle) -> None:
        raise NotImplementedError

    def _iter(self) -> Iterator[OrderHandle]:
        raise NotImplementedError


class _Group:
    __slots__ = ("tag", "first", "size", "prev", "next")

    def __init__(self, tag: int):
        self.tag = tag
        self.first: Optional[OrderHandle] = None
        self.size = 0
        self.prev = self.next = None


class ListOrder(OrderMaintenance):
    """Two-level list labeling with amortized O(1) updates and O(1) comparisons."""

    GROUP_LIMIT = 64
    LABEL_BITS = 32
    TAG_BITS = 62
    DENSITY = 1.5

    def __init__(self):
        super().__init__()
        group = _Group(0)
        group.first = self.head
        group.size = 1
        self.head.group = group
        self.first_group = group
        self.relabels = 0

    def _order(self, a: OrderHandle, b: OrderHandle) -> bool:
        if a.group is b.group:
            return a.label < b.label
        return a.group.tag < b.group.tag

    def _iter(self) -> Iterator[OrderHandle]:
        handle = self.head.next
        while handle is not None:
            yield handle
            handle = handle.next

    def _insert_after(self, anchor: OrderHandle, handle: OrderHandle) -> None:
        group = anchor.group
        after = anchor.next
        handle.prev, handle.next = anchor, after
        anchor.next = handle
        if after is not None:
            after.prev = handle
        handle.group = group
        group.size += 1
        upper = after.label if after is not None and after.group is group else 1 << self.LABEL_BITS
        if upper - anchor.label >= 2:
            handle.label = (anchor.label + upper) // 2
        else:
            self._relabel_group(group)
        if group.size > self.GROUP_LIMIT:
            self._split(group)

    def _members(self, group: _Group) -> List[OrderHandle]:
        out, handle = [], group.first
        while handle is not None and handle.group is group:
            out.append(handle)
            handle = handle.next
        return out

    def _relabel_group(self, group: _Group) -> None:
        members = self._members(group)
        step = (1 << self.LABEL_BITS) // (len(members) + 1)
        for i, handle in enumerate(members):
            handle.label = (i + 1) * step
        if group.first is self.head:
            self.head.label = 0

    def _split(self, group: _Group) -> None:
        members = self._members(group)
        half = len(members) // 2
        fresh = _Group(0)
        fresh.first = members[half]
        fresh.size = len(members) - half
        group.size = half
        for handle in members[half:]:
            handle.group = fresh
        fresh.prev, fresh.next = group, group.next
        if group.next is not None:
            group.next.prev = fresh
        group.next = fresh
        self._relabel_group(group)
        self._relabel_group(fresh)
        self._place_tag(fresh)

    def _place_tag(self, group: _Group) -> None:
        low = group.prev.tag
        high = group.next.tag if group.next is not None else 1 << self.TAG_BITS
        if high - low >= 2:
            group.tag = (low + high) // 2
            return
        self._respread(group)

    def _respread(self, group: _Group) -> None:
        # smallest aligned range around the neighbour's tag with room to spare
        anchor = group.prev.tag
        for bits in range(1, self.TAG_BITS + 1):
            base = (anchor >> bits) << bits
            span = 1 << bits
            first = group.prev
            while first.prev is not None and first.prev.tag >= base:
                first = first.prev
            members, g = [], first
            while g is not None and (g is group or base <= g.tag < base + span):
                members.append(g)
                g = g.next
            if len(members) + 1 < (2 / self.DENSITY) ** bits or bits == self.TAG_BITS:
                step = span // (len(members) + 1)
                for i, g in enumerate(members):
                    g.tag = base + (i + 1) * step if g is not self.first_group else base
                self.relabels += 1
                return

    def _delete(self, handle: OrderHandle) -> None:
        group = handle.group
        if group.first is handle:
            group.first = handle.next if handle.next is not None and handle.next.group is group else None
        if handle.prev is not None:
            handle.prev.next = handle.next
        if handle.next is not None:
            handle.next.prev = handle.prev
        handle.prev = handle.next = None
        group.size -= 1
        if group.size == 0:
            group.prev.next = group.next
            if group.next is not None:
                group.next.prev = group.prev


class TreeOrder(OrderMaintenance):
    """Treap keyed implicitly by list position; O(log n) expected per operation."""

    def __init__(self, seed: int = 0):
        super().__init__()
        self.rng = random.Random(seed)
        self.head.priority = self.rng.random()
        self.root: Optional[OrderHandle] = self.head

    @staticmethod
    def _size(node: Optional[OrderHandle]) -> int:
        return node.size if node is not None else 0

    def _rank(self, node: OrderHandle) -> int:
        rank = self._size(node.left)
        while node.parent is not None:
            if node is node.parent.right:
                rank += self._size(node.parent.left) + 1
            node = node.parent
        return rank

    def _order(self, a: OrderHandle, b: OrderHandle) -> bool:
        return self._rank(a) < self._rank(b)

    def _iter(self) -> Iterator[OrderHandle]:
        stack, node = [], self.root
        while stack or node is not None:
            while node is not None:
                stack.append(node)
                node = node.left
            node = stack.pop()
            if node.kind == _ITEM:
                yield node
            node = node.right

    def _resize_up(self, node: Optional[OrderHandle]) -> None:
        while node is not None:
            node.size = 1 + self._size(node.left) + self._size(node.right)
            node = node.parent

    def _replace_child(self, parent, old, new) -> None:
        if parent is None:
            self.root = new
        elif parent.left is old:
            parent.left = new
        else:
            parent.right = new
        if new is not None:
            new.parent = parent

    def _rotate_up(self, node: OrderHandle) -> None:
        parent = node.parent
        grand = parent.parent
        if parent.left is node:
            parent.left = node.right
            if node.right is not None:
                node.right.parent = parent
            node.right = parent
        else:
            parent.right = node.left
            if node.left is not None:
                node.left.parent = parent
            node.left = parent
        parent.parent = node
        self._replace_child(grand, parent, node)
        parent.size = 1 + self._size(parent.left) + self._size(parent.right)
        node.size = 1 + self._size(node.left) + self._size(node.right)

    def _insert_after(self, anchor: OrderHandle, handle: OrderHandle) -> None:
        handle.priority = self.rng.random()
        if anchor.right is None:
            anchor.right = handle
            handle.parent = anchor
        else:
            node = anchor.right
            while node.left is not None:
                node = node.left
            node.left = handle
            handle.parent = node
        self._resize_up(handle.parent)
        while handle.parent is not None and handle.priority > handle.parent.priority:
            self._rotate_up(handle)
        self._resize_up(handle.parent)

    def _delete(self, handle: OrderHandle) -> None:
        while handle.left is not None or handle.right is not None:
            if handle.right is None or (handle.left is not None
                                        and handle.left.priority > handle.right.priority):
                child = handle.left
            else:
                child = handle.right
            self._rotate_up(child)
        parent = handle.parent
        self._replace_child(parent, handle, None)
        handle.parent = None
        self._resize_up(parent)


def make_order(backend: str = "list", seed: int = 0) -> OrderMaintenance:
    if backend not in ORDER_BACKENDS:
        raise ContractViolation(f"unknown order backend {backend!r}")
    return ListOrder() if backend == "list" else TreeOrder(seed)
