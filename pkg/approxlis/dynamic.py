"""
Fully dynamic approximate LIS: insertions and deletions at arbitrary positions.

Points get order-maintenance handles as coordinates (x for the position, y for the
value), so inserting never renumbers anything. Rectangles come from a two-level range
tree: primary nodes split their points at the median y, and every primary node owns a
secondary tree splitting the same points at median x. A node keeps its split line for a
quarter of its size in updates and is then rebuilt from scratch together with everything
below it.

Each secondary node keeps a (lambda^2, 3h)-covering family, h being the height bound of
its primary node: the least h with (4/3)^h >= size. A child never holds more than three
quarters of its parent's size at build time, so h drops by at least one per level even
when children are rebuilt on their own. Its levels are maintained as in the decremental structure, except that
Merge reads the families of the primary node's bottom and top children and its output
is clipped to the secondary node's x window.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from approxlis.config import StructureConfig
from approxlis.core import Chain, Point
from approxlis.cover import EMPTY, Cover, CoveringFamily, Segment, build_family, depth
from approxlis.decremental import merge, merge_depth_bound, splice
from approxlis.errors import ContractViolation
from approxlis.order import OrderHandle, make_order
from approxlis.pbst import PersistentTree

logger = logging.getLogger(__name__)


class DynPoint(NamedTuple):
    x: OrderHandle
    y: OrderHandle
    value: int


class _YKey:
    """Value order; among equal values the earlier element is the larger one."""
    __slots__ = ("value", "x")

    def __init__(self, value, x: OrderHandle):
        self.value = value
        self.x = x

    def __lt__(self, other: "_YKey") -> bool:
        if self.value != other.value:
            return self.value < other.value
        return other.x < self.x


def height_bound(size: int) -> int:
    """Least h with (4/3)**h >= size."""
    h, power, scaled = 0, 1, size
    while power < scaled:
        h += 1
        power *= 4
        scaled *= 3
    return h


def _in_window(x, lo, hi) -> bool:
    return (lo is None or not x < lo) and (hi is None or x < hi)


def merge_dyn(family_b: Optional[CoveringFamily], family_t: Optional[CoveringFamily], m, k: int,
              apx: bool, lam: float, window: Tuple = (None, None), *,
              is_live: Optional[Callable] = None, sparsify: bool = True) -> List[Segment]:
    """Merge, keeping only segments whose chains stay inside the x window [lo, hi)."""
    lo, hi = window
    return [s for s in merge(family_b, family_t, m, k, apx, lam, is_live=is_live, sparsify=sparsify)
            if _in_window(s.chain[0].x, lo, hi) and _in_window(s.chain[-1].x, lo, hi)]


@dataclass
class SecondaryNode:
    points: PersistentTree
    family: CoveringFamily
    lo: Optional[OrderHandle] = None
    hi: Optional[OrderHandle] = None
    split: Optional[OrderHandle] = None
    left: Optional["SecondaryNode"] = None
    right: Optional["SecondaryNode"] = None
    size_at_build: int = 0
    budget: int = 1

    @property
    def leaf(self) -> bool:
        return self.split is None

    def child_for(self, point: DynPoint) -> "SecondaryNode":
        return self.left if point.x < self.split else self.right


@dataclass
class PrimaryNode:
    secondary: SecondaryNode
    height: int = 0
    split: Optional[OrderHandle] = None
    bottom: Optional["PrimaryNode"] = None
    top: Optional["PrimaryNode"] = None
    size_at_build: int = 0
    budget: int = 1

    @property
    def leaf(self) -> bool:
        return self.split is None

    @property
    def points(self) -> PersistentTree:
        return self.secondary.points

    def child_for(self, point: DynPoint) -> "PrimaryNode":
        return self.bottom if point.y < self.split else self.top


@dataclass
class DynamicStats:
    merges: int = 0
    primary_rebuilds: int = 0
    secondary_rebuilds: int = 0
    max_merge_output: int = 0

    def to_dict(self) -> dict:
        return {
            "merges": self.merges,
            "primary_rebuilds": self.primary_rebuilds,
            "secondary_rebuilds": self.secondary_rebuilds,
            "max_merge_output": self.max_merge_output,
        }


class DynamicLIS:
    """Approximate LIS of subarrays of an array under insertions and deletions.

    Positions are 0-based indices into the current array. Values only need to be
    comparable; equal values never form an increasing pair.
    """

    def __init__(self, epsilon: float, config: Optional[StructureConfig] = None):
        if not 0 < epsilon <= 1:
            raise ContractViolation(f"epsilon must lie in (0, 1], got {epsilon}")
        self.epsilon = epsilon
        self.config = config or StructureConfig()
        self.x_order = make_order(self.config.order_backend, self.config.seed)
        self.y_order = make_order(self.config.order_backend, self.config.seed + 1)
        self.by_x = PersistentTree()
        self.by_y = PersistentTree()
        self.root: Optional[PrimaryNode] = None
        self.dead: set = set()
        self.counters = DynamicStats()
        self._set_parameters(2)

    @classmethod
    def from_values(cls, values: Iterable, epsilon: float,
                    config: Optional[StructureConfig] = None) -> "DynamicLIS":
        """Load an initial array in one pass and build the range tree once."""
        structure = cls(epsilon, config)
        anchor = structure.x_order.head
        for value in values:
            x = structure.x_order.insert_after(anchor)
            anchor = x
            structure.by_x = structure.by_x.insert(x, DynPoint(x, None, value))
        keyed = sorted((_YKey(p.value, p.x), p) for p in structure.by_x.values())
        y_anchor = structure.y_order.head
        for key, point in keyed:
            y = structure.y_order.insert_after(y_anchor)
            y_anchor = y
            real = DynPoint(point.x, y, point.value)
            structure.by_x = structure.by_x.insert(point.x, real)
            structure.by_y = structure.by_y.insert(key, real)
        structure._rebuild_root()
        return structure

    def _set_parameters(self, reference: int) -> None:
        if self.config.epsilon_prime is not None:
            self.epsilon_prime = self.config.epsilon_prime
        else:
            self.epsilon_prime = self.epsilon / (12 * max(1, height_bound(reference)))
        self.lam = 1 + self.epsilon_prime
        self.gamma = self.lam ** 2
        self.exact_levels = math.ceil(3 / self.epsilon_prime)

    # -- construction ------------------------------------------------------

    def cap(self, k1: int, k2: float) -> int:
        if self.config.cap_override is not None:
            return self.config.cap_override
        if k1 == k2:
            return 1
        return max(1, math.floor(self.epsilon_prime * k1) - 1)

    def _family(self, points: Sequence[DynPoint], height: int) -> CoveringFamily:
        limit = (5 * len(points)) // 4 + 1
        return build_family(points, self.gamma, 3 * height, exact_levels=self.exact_levels,
                            limit=limit, lower_margin=self.lam, upper_margin=self.lam,
                            cap=self.cap)

    def _build_secondary(self, points: List[DynPoint], height: int, lo, hi) -> SecondaryNode:
        tree = PersistentTree.from_sorted((p.x, p) for p in points)
        node = SecondaryNode(tree, self._family(points, height), lo, hi,
                             size_at_build=len(points), budget=max(1, len(points) // 4))
        if len(points) >= 2:
            middle = len(points) // 2
            node.split = points[middle].x
            node.left = self._build_secondary(points[:middle], height, lo, node.split)
            node.right = self._build_secondary(points[middle:], height, node.split, hi)
        return node

    def _build_primary(self, points: List[DynPoint]) -> PrimaryNode:
        """Range tree over x-sorted points, split at exact medians."""
        node = PrimaryNode(secondary=None, height=height_bound(len(points)),
                           size_at_build=len(points), budget=max(1, len(points) // 4))
        if len(points) >= 2:
            by_y = sorted(points, key=lambda p: p.y)
            node.split = by_y[len(points) // 2].y
            node.bottom = self._build_primary([p for p in points if p.y < node.split])
            node.top = self._build_primary([p for p in points if not p.y < node.split])
        node.secondary = self._build_secondary(points, node.height, None, None)
        return node

    def _rebuild_root(self) -> None:
        points = list(self.by_x.values())
        self._set_parameters((5 * len(points)) // 4 + 1)
        self.root = self._build_primary(points) if points else None
        self.x_order.purge(p.x for p in points)
        self.y_order.purge(p.y for p in points)
        self.dead.clear()
        self.counters.primary_rebuilds += 1
        logger.info("rebuilt range tree over %d points (epsilon'=%.4g)", len(points), self.epsilon_prime)

    def rebuild_subtree(self, node: PrimaryNode) -> PrimaryNode:
        """A fresh primary subtree over the node's current points, medians recomputed."""
        self.counters.primary_rebuilds += 1
        return self._build_primary(list(node.points.values()))

    # -- updates -----------------------------------------------------------

    def __len__(self) -> int:
        return len(self.by_x)

    def is_live(self, point: DynPoint) -> bool:
        return point.x not in self.dead

    def insert(self, position: int, value) -> None:
        """Insert `value` so that it ends up at index `position`."""
        size = len(self.by_x)
        if not 0 <= position <= size:
            raise ContractViolation(f"insert position {position} outside 0..{size}")
        before = self.by_x.find_rank(position - 1) if position > 0 else None
        x = self.x_order.insert_after(before[0] if before else self.x_order.head)
        key = _YKey(value, x)
        below = self.by_y.predecessor(key)
        y = self.y_order.insert_after(below[1].y if below else self.y_order.head)
        point = DynPoint(x, y, value)
        self.by_x = self.by_x.insert(x, point)
        self.by_y = self.by_y.insert(key, point)
        self._update(point, inserting=True)

    def delete(self, position: int) -> DynPoint:
        """Delete the element at index `position` and return it."""
        size = len(self.by_x)
        if not 0 <= position < size:
            raise ContractViolation(f"delete position {position} outside 0..{size - 1}")
        x, point = self.by_x.find_rank(position)
        self.by_x = self.by_x.delete(x)
        self.by_y = self.by_y.delete(_YKey(point.value, x))
        self.dead.add(x)
        self._update(point, inserting=False)
        return point

    def _update(self, point: DynPoint, inserting: bool) -> None:
        if self.root is None:
            self._rebuild_root()
            return
        path: List[PrimaryNode] = []
        node = self.root
        while True:
            path.append(node)
            node.budget -= 1
            sec = node.secondary
            sec.points = sec.points.insert(point.x, point) if inserting else sec.points.delete(point.x)
            if node.leaf:
                break
            node = node.child_for(point)
        exhausted = next(i for i, n in enumerate(path) if n.budget <= 0 or n.leaf)
        if exhausted == 0:
            self._rebuild_root()
            return
        parent = path[exhausted - 1]
        fresh = self.rebuild_subtree(path[exhausted])
        if parent.bottom is path[exhausted]:
            parent.bottom = fresh
        else:
            parent.top = fresh
        for node in reversed(path[:exhausted]):
            self._update_secondary(node, point, inserting)

    def _update_secondary(self, owner: PrimaryNode, point: DynPoint, inserting: bool) -> None:
        path: List[SecondaryNode] = [owner.secondary]
        node = owner.secondary
        while not node.leaf:
            node = node.child_for(point)
            path.append(node)
            node.budget -= 1
            node.points = node.points.insert(point.x, point) if inserting else node.points.delete(point.x)
        exhausted = next(i for i, n in enumerate(path) if i > 0 and (n.budget <= 0 or n.leaf))
        stale = path[exhausted]
        parent = path[exhausted - 1]
        fresh = self._build_secondary(list(stale.points.values()), owner.height, stale.lo, stale.hi)
        self.counters.secondary_rebuilds += 1
        if parent.left is stale:
            parent.left = fresh
        else:
            parent.right = fresh
        for node in reversed(path[:exhausted]):
            self._update_levels(owner, node)

    def _update_levels(self, owner: PrimaryNode, node: SecondaryNode) -> None:
        levels = node.family.levels
        for index, level in enumerate(levels):
            level.counter += 1
            if level.counter >= level.cap:
                self._rebuild_level(owner, node, index)
            elif level.merge_output is not None:
                self._rejoin(node, index)
            if level.exact and not level.tree:
                # nothing of this length exists, so nothing longer does
                for higher in levels[index + 1:]:
                    higher.tree, higher.merge_output, higher.counter = EMPTY, [], 0
                break

    def merge_target(self, level: Cover, height: int) -> Tuple[int, bool]:
        if level.exact:
            return level.k1, False
        base = level.k2 / self.gamma ** (3 * height - 1)
        return math.floor(base * self.gamma + 1e-9), True

    def _rebuild_level(self, owner: PrimaryNode, node: SecondaryNode, index: int) -> None:
        level = node.family.levels[index]
        k, apx = self.merge_target(level, owner.height)
        output = merge_dyn(owner.bottom.secondary.family, owner.top.secondary.family, node.split,
                           k, apx, self.lam, (node.lo, node.hi), is_live=self.is_live,
                           sparsify=self.config.sparsify)
        level.merge_output = output
        level.counter = 0
        self.counters.merges += 1
        self.counters.max_merge_output = max(self.counters.max_merge_output, len(output))
        self._rejoin(node, index)

    @staticmethod
    def _level_tree(node: SecondaryNode, index: int) -> PersistentTree:
        levels = node.family.levels
        return levels[index].tree if index < len(levels) else EMPTY

    def _rejoin(self, node: SecondaryNode, index: int) -> None:
        joined = self._level_tree(node.left, index).join(self._level_tree(node.right, index))
        level = node.family.levels[index]
        level.tree = splice(joined, level.merge_output, node.split)

    # -- queries -----------------------------------------------------------

    def values(self) -> List:
        return [p.value for p in self.by_x.values()]

    def query(self, i: int = 0, j: Optional[int] = None) -> int:
        """Approximate LIS of the subarray i..j (inclusive); the whole array by default."""
        return self.query_chain(i, j)[0]

    def query_chain(self, i: int = 0, j: Optional[int] = None) -> Tuple[int, Chain]:
        """Score and a witness chain of (position, value) points inside i..j."""
        size = len(self.by_x)
        if j is None:
            j = size - 1
        if size == 0 and (i, j) == (0, -1):
            return 0, ()
        if not 0 <= i <= j < size:
            raise ContractViolation(f"query ({i}, {j}) outside 0..{size - 1} or reversed")
        lo, hi = self.by_x.find_rank(i)[0], self.by_x.find_rank(j)[0]
        score, segment = self.root.secondary.family.query(lo, hi)
        if segment is None:
            return 0, ()
        chain = tuple(Point(self.by_x.rank_of(p.x), p.value)
                      for p in segment.chain if self.is_live(p))
        return score, chain

    # -- diagnostics -------------------------------------------------------

    def _secondary_nodes(self) -> Iterable[Tuple[PrimaryNode, SecondaryNode]]:
        stack = [self.root] if self.root is not None else []
        while stack:
            primary = stack.pop()
            inner = [primary.secondary]
            while inner:
                node = inner.pop()
                yield primary, node
                if not node.leaf:
                    inner.extend((node.left, node.right))
            if not primary.leaf:
                stack.extend((primary.bottom, primary.top))

    def depth_bound(self, height: int) -> float:
        return 1 + max(height, 1) * (6 / self.epsilon_prime + 2)

    def max_cover_depth(self) -> int:
        return max((node.family.max_depth() for _, node in self._secondary_nodes()), default=0)

    def stats(self) -> dict:
        data = self.counters.to_dict()
        data.update(live=len(self), epsilon_prime=self.epsilon_prime,
                    max_cover_depth=self.max_cover_depth(),
                    order_elements=len(self.x_order))
        return data

    def balance_problems(self) -> List[str]:
        """Splits whose sides differ by more than a factor of two, and children as tall as their parent."""
        problems = []
        for primary, node in self._secondary_nodes():
            if not node.leaf:
                a, b = len(node.left.points), len(node.right.points)
                if max(a, b) > 2 * max(1, min(a, b)):
                    problems.append(f"secondary split {a}/{b}")
            if node is primary.secondary and not primary.leaf:
                a, b = len(primary.bottom.points), len(primary.top.points)
                if max(a, b) > 2 * max(1, min(a, b)):
                    problems.append(f"primary split {a}/{b}")
                for child in (primary.bottom, primary.top):
                    if child.height >= primary.height:
                        problems.append(f"child height {child.height} under parent height {primary.height}")
        return problems

    def audit(self) -> List[str]:
        """Validate every stored cover against the brute-force checker (small sizes only)."""
        from approxlis.oracle import validate_cover
        problems = []
        for primary, node in self._secondary_nodes():
            points = list(node.points.values())
            for level in node.family.levels:
                verdict = validate_cover(points, level.segments(), level.k1, level.k2,
                                         is_live=self.is_live)
                if not verdict.ok:
                    problems.append(f"level ({level.k1}, {level.k2:g}) over {len(points)} points: {verdict.reason}")
                if level.depth() > self.depth_bound(primary.height):
                    problems.append(f"level ({level.k1}, {level.k2:g}): depth {level.depth()}")
                if level.merge_output is not None and not primary.leaf:
                    bound = merge_depth_bound(*self.merge_target(level, primary.height), self.lam)
                    if depth(level.merge_output) > bound:
                        problems.append(f"level ({level.k1}, {level.k2:g}): "
                                        f"merge output depth {depth(level.merge_output)} over {bound}")
        return problems + self.balance_problems()
