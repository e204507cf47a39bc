"""
Persistent order-statistic AVL tree.

Nodes are immutable tuples shared between versions (path copying), so every version
handed out stays valid after later operations. Keys only need `<`.
"""

from typing import Any, Iterator, NamedTuple, Optional, Tuple

from approxlis.errors import ContractViolation


class Node(NamedTuple):
    key: Any
    value: Any
    left: Optional["Node"]
    right: Optional["Node"]
    height: int
    size: int


def _height(node: Optional[Node]) -> int:
    return node.height if node is not None else 0


def _size(node: Optional[Node]) -> int:
    return node.size if node is not None else 0


def _make(key, value, left, right) -> Node:
    return Node(key, value, left, right,
                1 + max(_height(left), _height(right)),
                1 + _size(left) + _size(right))


def _rotate_left(key, value, left, right) -> Node:
    return _make(right.key, right.value, _make(key, value, left, right.left), right.right)


def _rotate_right(key, value, left, right) -> Node:
    return _make(left.key, left.value, left.left, _make(key, value, left.right, right))


def _balance(key, value, left, right) -> Node:
    hl, hr = _height(left), _height(right)
    if hl > hr + 1:
        if _height(left.left) < _height(left.right):
            left = _rotate_left(left.key, left.value, left.left, left.right)
        return _rotate_right(key, value, left, right)
    if hr > hl + 1:
        if _height(right.right) < _height(right.left):
            right = _rotate_right(right.key, right.value, right.left, right.right)
        return _rotate_left(key, value, left, right)
    return _make(key, value, left, right)


def _join3(left, key, value, right) -> Node:
    # every key of left < key < every key of right
    if _height(left) > _height(right) + 1:
        return _balance(left.key, left.value, left.left, _join3(left.right, key, value, right))
    if _height(right) > _height(left) + 1:
        return _balance(right.key, right.value, _join3(left, key, value, right.left), right.right)
    return _make(key, value, left, right)


def _split(node, key, inclusive: bool) -> Tuple[Optional[Node], Optional[Node]]:
    if node is None:
        return None, None
    goes_right = key < node.key or (not inclusive and not node.key < key)
    if goes_right:
        lo, hi = _split(node.left, key, inclusive)
        return lo, _join3(hi, node.key, node.value, node.right)
    lo, hi = _split(node.right, key, inclusive)
    return _join3(node.left, node.key, node.value, lo), hi


def _pop_min(node: Node) -> Tuple[Node, Optional[Node]]:
    if node.left is None:
        return node, node.right
    first, rest = _pop_min(node.left)
    return first, _balance(node.key, node.value, rest, node.right)


def _join2(left, right) -> Optional[Node]:
    if left is None:
        return right
    if right is None:
        return left
    first, rest = _pop_min(right)
    return _join3(left, first.key, first.value, rest)


def _insert(node, key, value) -> Node:
    if node is None:
        return _make(key, value, None, None)
    if key < node.key:
        return _balance(node.key, node.value, _insert(node.left, key, value), node.right)
    if node.key < key:
        return _balance(node.key, node.value, node.left, _insert(node.right, key, value))
    return Node(key, value, node.left, node.right, node.height, node.size)


def _from_sorted(items, lo: int, hi: int) -> Optional[Node]:
    if lo >= hi:
        return None
    mid = (lo + hi) // 2
    key, value = items[mid]
    return _make(key, value, _from_sorted(items, lo, mid), _from_sorted(items, mid + 1, hi))


class PersistentTree:
    """An immutable sorted map. Every mutating method returns a new tree."""

    __slots__ = ("root",)

    def __init__(self, root: Optional[Node] = None):
        self.root = root

    @classmethod
    def from_sorted(cls, items) -> "PersistentTree":
        """Build from (key, value) pairs with strictly increasing keys."""
        items = list(items)
        for (a, _), (b, _) in zip(items, items[1:]):
            if not a < b:
                raise ContractViolation("from_sorted needs strictly increasing keys")
        return cls(_from_sorted(items, 0, len(items)))

    def __len__(self) -> int:
        return _size(self.root)

    def __bool__(self) -> bool:
        return self.root is not None

    def __iter__(self) -> Iterator[Tuple[Any, Any]]:
        return self.items()

    @property
    def height(self) -> int:
        return _height(self.root)

    # -- updates ---------------------------------------------------------

    def insert(self, key, value=None) -> "PersistentTree":
        return PersistentTree(_insert(self.root, key, value))

    def delete(self, key) -> "PersistentTree":
        lo, hi = _split(self.root, key, inclusive=False)
        if hi is None:
            return self
        first, rest = _pop_min(hi)
        if first.key < key or key < first.key:
            return self
        return PersistentTree(_join2(lo, rest))

    def split(self, key, inclusive: bool = False) -> Tuple["PersistentTree", "PersistentTree"]:
        """Left part holds keys < key (<= key when inclusive), right part the rest."""
        lo, hi = _split(self.root, key, inclusive)
        return PersistentTree(lo), PersistentTree(hi)

    def join(self, other: "PersistentTree") -> "PersistentTree":
        if self.root is not None and other.root is not None:
            if not self.max_item()[0] < other.min_item()[0]:
                raise ContractViolation("join needs every key of the left tree below every key of the right tree")
        return PersistentTree(_join2(self.root, other.root))

    def delete_interval(self, lo_key, hi_key) -> "PersistentTree":
        """Drop every key k with lo_key <= k <= hi_key."""
        left, _ = _split(self.root, lo_key, inclusive=False)
        _, right = _split(self.root, hi_key, inclusive=True)
        return PersistentTree(_join2(left, right))

    # -- searches --------------------------------------------------------

    def get(self, key, default=None):
        node = self.root
        while node is not None:
            if key < node.key:
                node = node.left
            elif node.key < key:
                node = node.right
            else:
                return node.value
        return default

    def __contains__(self, key) -> bool:
        sentinel = object()
        return self.get(key, sentinel) is not sentinel

    def find(self, key) -> Optional[Tuple[Any, Any]]:
        """Item with the biggest key not greater than key."""
        node, best = self.root, None
        while node is not None:
            if key < node.key:
                node = node.left
            else:
                best = node
                node = node.right
        return (best.key, best.value) if best is not None else None

    def predecessor(self, key) -> Optional[Tuple[Any, Any]]:
        """Item with the biggest key strictly below key."""
        node, best = self.root, None
        while node is not None:
            if node.key < key:
                best = node
                node = node.right
            else:
                node = node.left
        return (best.key, best.value) if best is not None else None

    def ceiling(self, key) -> Optional[Tuple[Any, Any]]:
        """Item with the smallest key not below key."""
        node, best = self.root, None
        while node is not None:
            if node.key < key:
                node = node.right
            else:
                best = node
                node = node.left
        return (best.key, best.value) if best is not None else None

    def successor(self, key) -> Optional[Tuple[Any, Any]]:
        """Item with the smallest key strictly above key."""
        node, best = self.root, None
        while node is not None:
            if key < node.key:
                best = node
                node = node.left
            else:
                node = node.right
        return (best.key, best.value) if best is not None else None

    def find_rank(self, rank: int) -> Optional[Tuple[Any, Any]]:
        """Item whose key has the given 0-based rank."""
        if rank < 0 or rank >= len(self):
            return None
        node = self.root
        while True:
            left = _size(node.left)
            if rank < left:
                node = node.left
            elif rank == left:
                return node.key, node.value
            else:
                rank -= left + 1
                node = node.right

    def rank_of(self, key) -> int:
        """Number of keys strictly below key."""
        node, rank = self.root, 0
        while node is not None:
            if node.key < key:
                rank += _size(node.left) + 1
                node = node.right
            else:
                node = node.left
        return rank

    def min_item(self) -> Optional[Tuple[Any, Any]]:
        node = self.root
        if node is None:
            return None
        while node.left is not None:
            node = node.left
        return node.key, node.value

    def max_item(self) -> Optional[Tuple[Any, Any]]:
        node = self.root
        if node is None:
            return None
        while node.right is not None:
            node = node.right
        return node.key, node.value

    # -- traversal -------------------------------------------------------

    def items(self) -> Iterator[Tuple[Any, Any]]:
        stack, node = [], self.root
        while stack or node is not None:
            while node is not None:
                stack.append(node)
                node = node.left
            node = stack.pop()
            yield node.key, node.value
            node = node.right

    def keys(self) -> Iterator[Any]:
        return (k for k, _ in self.items())

    def values(self) -> Iterator[Any]:
        return (v for _, v in self.items())

    def check_invariants(self) -> None:
        """Raise AssertionError unless order, balance and sizes are consistent."""
        def walk(node, lo, hi):
            if node is None:
                return 0, 0
            assert lo is None or lo < node.key, "keys out of order"
            assert hi is None or node.key < hi, "keys out of order"
            hl, sl = walk(node.left, lo, node.key)
            hr, sr = walk(node.right, node.key, hi)
            assert abs(hl - hr) <= 1, "height imbalance"
            assert node.height == 1 + max(hl, hr), "stale height"
            assert node.size == 1 + sl + sr, "stale size"
            return node.height, node.size
        walk(self.root, None, None)


EMPTY = PersistentTree()
