"""
Deletion-only approximate LIS over dyadic rectangles.

Every nonempty dyadic rectangle of the (padded) n x n grid keeps the points inside it in a
persistent tree and a (lambda^2, 2h)-covering family of them, h being the rectangle's
height (log of its y-span). A level's cover is the join of the same level in the left and
right halves plus the segments crossing the middle column, which Merge rebuilds from the
bottom and top halves once the level's counter reaches its cap.
"""

import bisect
import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from approxlis.config import StructureConfig
from approxlis.core import Chain, Point, PointSet, lis_static, normalize
from approxlis.cover import (
    EMPTY, Cover, CoveringFamily, Segment, build_family, cover_approx, cover_exact, depth,
    segment_inside,
)
from approxlis.errors import ContractViolation
from approxlis.pbst import PersistentTree

logger = logging.getLogger(__name__)

RectKey = Tuple[int, int, int, int]  # (x level, x index, y level, y index)

_ZERO = Cover(0, 0.0)


# -- Merge -----------------------------------------------------------------

def _around(tree: PersistentTree, m) -> List[Segment]:
    """Segments crossing m, with the closest non-crossing segment on each side."""
    out: List[Segment] = []
    found = tree.predecessor(m)
    while found is not None:
        segment = found[1]
        out.append(segment)
        if segment.end < m:
            break
        found = tree.predecessor(segment.begin)
    out.reverse()
    after = tree.ceiling(m)
    if after is not None:
        out.append(after[1])
    return out


def _ending_before(tree: PersistentTree, x) -> Optional[Segment]:
    """The segment with the largest end strictly below x."""
    found = tree.predecessor(x)
    while found is not None:
        segment = found[1]
        if segment.end < x:
            return segment
        found = tree.predecessor(segment.begin)
    return None


def _concat(low: Optional[Segment], high: Optional[Segment], k: int,
            is_live: Optional[Callable]) -> Optional[Segment]:
    chain = (low.chain if low is not None else ()) + (high.chain if high is not None else ())
    if is_live is not None:
        chain = tuple(p for p in chain if is_live(p))
    chain = chain[:k]
    if not chain:
        return None
    return Segment(chain[0].x, chain[-1].x, chain)


def _partners(bottom: Sequence[Cover], top: Sequence[Cover], k: int,
              apx: bool) -> List[Tuple[Cover, Cover]]:
    """Level pairs whose scores add up to k (exactly, or at least k when apx)."""
    top_scores = [c.k1 for c in top]
    pairs = []
    for low in [_ZERO, *bottom]:
        need = k - low.k1
        if need <= 0:
            if apx or need == 0:
                if low is not _ZERO:
                    pairs.append((low, _ZERO))
            continue
        at = bisect.bisect_left(top_scores, need)
        if at == len(top):
            continue
        if not apx and top_scores[at] != need:
            continue
        pairs.append((low, top[at]))
    return pairs


def _sparsify(candidates: Sequence[Segment], m, k: int, apx: bool,
              lam: float) -> List[Segment]:
    unique = {}
    for s in candidates:
        for p in s.chain:
            unique[p.x] = p
    points = sorted(unique.values(), key=lambda p: p.x)
    low = math.ceil(k / lam - 1e-9)
    if apx and low < k:
        segments = cover_approx(points, low, k)
    else:
        segments = cover_exact(points, k)
    crossing = [s for s in segments if s.begin < m and not s.end < m]
    left = [s for s in segments if s.end < m]
    right = [s for s in segments if not s.begin < m]
    return left[-1:] + crossing + right[:1]


def _shortest_per_begin(candidates: Sequence[Segment]) -> List[Segment]:
    ordered = sorted(candidates, key=lambda s: (s.begin, s.end))
    out: List[Segment] = []
    for s in ordered:
        if out and not out[-1].begin < s.begin:
            continue
        out.append(s)
    return out


def merge_depth_bound(k: int, apx: bool, lam: float) -> int:
    """Largest depth of sparsified Merge output: that of the greedy cover it is cut from."""
    low = math.ceil(k / lam - 1e-9)
    if apx and low < k:
        return max(1, math.ceil(low / (k - low)))
    return k


def merge(family_b: Optional[CoveringFamily], family_t: Optional[CoveringFamily], m, k: int,
          apx: bool, lam: float, *, is_live: Optional[Callable] = None,
          sparsify: bool = True) -> List[Segment]:
    """Segments covering the intervals that cross m, built from the bottom and top families.

    Candidate chains concatenate a bottom segment with the first top segment after it (and
    a top segment with the last bottom segment before it) for every pairing of levels;
    deleted points are dropped and the result trimmed to k. The candidates' points are then
    re-covered greedily and only the crossing segments plus the closest non-crossing one on
    each side are returned, sorted by begin. With sparsify=False the raw candidates are
    returned instead, the shortest one per begin.
    """
    bottom = family_b.levels if family_b is not None else []
    top = family_t.levels if family_t is not None else []
    candidates: List[Segment] = []
    for low, high in _partners(bottom, top, k, apx):
        if low is not _ZERO:
            for u in _around(low.tree, m):
                if high is _ZERO:
                    partner = None
                else:
                    found = high.tree.successor(u.end)
                    if found is None:
                        continue
                    partner = found[1]
                joined = _concat(u, partner, k, is_live)
                if joined is not None:
                    candidates.append(joined)
        if high is not _ZERO:
            for u in _around(high.tree, m):
                if low is _ZERO:
                    partner = None
                else:
                    partner = _ending_before(low.tree, u.begin)
                    if partner is None:
                        continue
                joined = _concat(partner, u, k, is_live)
                if joined is not None:
                    candidates.append(joined)
    if not candidates:
        return []
    if not sparsify:
        return _shortest_per_begin(candidates)
    return _sparsify(candidates, m, k, apx, lam)


def _containing(tree: PersistentTree, segment: Segment) -> Optional[Tuple]:
    """Begin keys of the first and last stored segments containing `segment`."""
    found = tree.find(segment.begin)
    last = first = None
    while found is not None and not found[1].end < segment.end:
        if last is None:
            last = found[0]
        first = found[0]
        found = tree.predecessor(found[0])
    return (first, last) if first is not None else None


def splice(tree: PersistentTree, new_segments: Sequence[Segment], m) -> PersistentTree:
    """Insert Merge output into the joined left/right cover without breaking non-inclusion.

    A non-crossing new segment is discarded when a stored segment lies inside it, and
    otherwise evicts the stored segments containing it. A crossing one is discarded when a
    stored segment lies inside it; no stored segment can contain it.
    """
    survivors = []
    for s in new_segments:
        if segment_inside(tree, s.begin, s.end) is not None:
            continue
        if s.end < m or not s.begin < m:
            hit = _containing(tree, s)
            if hit is not None:
                tree = tree.delete_interval(*hit)
        survivors.append(s)
    for s in survivors:
        tree = tree.insert(s.begin, s)
    return tree


def _on_chain(segment: Segment, point) -> bool:
    return any(q.x == point.x for q in segment.chain)


def _touches(level: Cover, point) -> bool:
    """Whether the point lies on a chain of the level's cover or of its last Merge output."""
    found = level.tree.find(point.x)
    while found is not None and not found[1].end < point.x:
        if _on_chain(found[1], point):
            return True
        found = level.tree.predecessor(found[0])
    return any(not point.x < s.begin and not s.end < point.x and _on_chain(s, point)
               for s in level.merge_output or ())


# -- rectangles ------------------------------------------------------------

@dataclass
class RectangleNode:
    key: RectKey
    points: PersistentTree
    family: CoveringFamily

    @property
    def height(self) -> int:
        return self.key[2]

    def middle(self) -> int:
        xlev, xidx = self.key[0], self.key[1]
        return (2 * xidx + 1) << (xlev - 1)

    def children(self) -> Dict[str, RectKey]:
        xlev, xidx, ylev, yidx = self.key
        return {
            "l": (xlev - 1, 2 * xidx, ylev, yidx),
            "r": (xlev - 1, 2 * xidx + 1, ylev, yidx),
            "b": (xlev, xidx, ylev - 1, 2 * yidx),
            "t": (xlev, xidx, ylev - 1, 2 * yidx + 1),
        }

    def live_points(self) -> List[Point]:
        return list(self.points.values())


@dataclass
class Stats:
    merges: int = 0
    rejoins: int = 0
    skips: int = 0
    max_merge_output: int = 0

    def to_dict(self) -> dict:
        return {
            "merges": self.merges,
            "rejoins": self.rejoins,
            "skips": self.skips,
            "max_merge_output": self.max_merge_output,
        }


class DecrementalLIS:
    """Approximate LIS of subarrays under deletions.

    Queries report OPT/(1+epsilon) <= score <= OPT where OPT is the longest increasing
    subsequence of the queried subarray of the live array.
    """

    def __init__(self, n: int, epsilon: float, config: Optional[StructureConfig] = None):
        if not 0 < epsilon <= 1:
            raise ContractViolation(f"epsilon must lie in (0, 1], got {epsilon}")
        self.config = config or StructureConfig()
        self.n = n
        self.levels_log = max(1, math.ceil(math.log2(max(n, 2))))
        self.size = 1 << self.levels_log
        self.epsilon = epsilon
        self.epsilon_prime = self.config.epsilon_prime or epsilon / (8 * self.levels_log)
        self.lam = 1 + self.epsilon_prime
        self.gamma = self.lam ** 2
        self.exact_levels = math.ceil(3 / self.epsilon_prime)
        self.rects: Dict[RectKey, RectangleNode] = {}
        self.deleted = [False] * n
        self.stats_counters = Stats()

    @classmethod
    def build(cls, points: PointSet, epsilon: float,
              config: Optional[StructureConfig] = None) -> "DecrementalLIS":
        """Materialize every nonempty dyadic rectangle and its greedy covering family."""
        points = list(points)
        n = len(points)
        if sorted(p.x for p in points) != list(range(n)) or sorted(p.y for p in points) != list(range(n)):
            raise ContractViolation("points must use coordinates 0..n-1 on both axes")
        points.sort(key=lambda p: p.x)
        structure = cls(n, epsilon, config)
        top = structure.levels_log
        for ylev in range(top + 1):
            for xlev in range(top + 1):
                groups: Dict[Tuple[int, int], List[Point]] = {}
                for p in points:
                    groups.setdefault((p.x >> xlev, p.y >> ylev), []).append(p)
                for (xidx, yidx), group in groups.items():
                    key = (xlev, xidx, ylev, yidx)
                    structure.rects[key] = structure._fresh_rect(key, group)
        logger.info("built decremental structure: n=%d, %d rectangles, epsilon'=%.4g",
                    n, len(structure.rects), structure.epsilon_prime)
        return structure

    @classmethod
    def from_values(cls, values: Sequence, epsilon: float,
                    config: Optional[StructureConfig] = None) -> "DecrementalLIS":
        return cls.build(normalize(values), epsilon, config)

    # -- levels ------------------------------------------------------------

    def cap(self, k1: int, k2: float) -> int:
        if self.config.cap_override is not None:
            return self.config.cap_override
        if k1 == k2:
            return 1
        return max(1, math.floor(self.epsilon_prime * k1) - 1)

    def merge_target(self, level: Cover, height: int) -> Tuple[int, bool]:
        """Score asked from Merge for a level, and whether Merge may approximate."""
        if level.exact:
            return level.k1, False
        base = level.k2 / self.gamma ** (2 * height - 1)
        return math.floor(base * self.gamma + 1e-9), True

    def _fresh_rect(self, key: RectKey, points: List[Point]) -> RectangleNode:
        height = key[2]
        family = build_family(points, self.gamma, 2 * height, exact_levels=self.exact_levels,
                              limit=len(points), lower_margin=self.lam, cap=self.cap,
                              truncate_empty=True)
        tree = PersistentTree.from_sorted((p.x, p) for p in points)
        return RectangleNode(key, tree, family)

    def is_live(self, point) -> bool:
        return not self.deleted[point.x]

    # -- updates -----------------------------------------------------------

    def live_count(self) -> int:
        root = self.rects.get(self._root_key())
        return len(root.points) if root is not None else 0

    def __len__(self) -> int:
        return self.live_count()

    def _root_key(self) -> RectKey:
        return self.levels_log, 0, self.levels_log, 0

    def delete(self, index: int) -> Point:
        """Delete the element currently at `index`; returns its original point."""
        live = self.live_count()
        if not 0 <= index < live:
            raise ContractViolation(f"delete index {index} outside 0..{live - 1}")
        x, point = self.rects[self._root_key()].points.find_rank(index)
        self.deleted[x] = True
        top = self.levels_log
        # smallest y-span first, then smallest x-span
        for ylev in range(top + 1):
            for xlev in range(top + 1):
                key = (xlev, x >> xlev, ylev, point.y >> ylev)
                rect = self.rects[key]
                rect.points = rect.points.delete(x)
                if not rect.points:
                    del self.rects[key]
                else:
                    self._update_rect(rect, point)
        return point

    def _child_family(self, key: RectKey) -> Optional[CoveringFamily]:
        rect = self.rects.get(key)
        return rect.family if rect is not None else None

    def _child_tree(self, key: RectKey, index: int) -> PersistentTree:
        rect = self.rects.get(key)
        if rect is None or index >= len(rect.family.levels):
            return EMPTY
        return rect.family.levels[index].tree

    def _update_rect(self, rect: RectangleNode, point: Point) -> None:
        levels = rect.family.levels
        for index, level in enumerate(levels):
            if not _touches(level, point):
                # no stored chain lost a point
                self.stats_counters.skips += 1
                continue
            level.counter += 1
            if level.counter >= level.cap:
                self.rebuild_level(rect, index)
            elif level.merge_output is not None:
                self._rejoin(rect, index)
            if level.exact and not level.tree:
                # no chain of this length is left, nor of any longer one
                del levels[index:]
                break

    def rebuild_level(self, rect: RectangleNode, index: int) -> None:
        """Rerun Merge for one level of a rectangle and rejoin the level's cover."""
        level = rect.family.levels[index]
        children = rect.children()
        k, apx = self.merge_target(level, rect.height)
        output = merge(self._child_family(children["b"]), self._child_family(children["t"]),
                       rect.middle(), k, apx, self.lam, is_live=self.is_live,
                       sparsify=self.config.sparsify)
        level.merge_output = output
        level.counter = 0
        stats = self.stats_counters
        stats.merges += 1
        stats.max_merge_output = max(stats.max_merge_output, len(output))
        logger.debug("merge %s level %d (k=%d, apx=%s): %d segments",
                     rect.key, index, k, apx, len(output))
        self._rejoin(rect, index)

    def _rejoin(self, rect: RectangleNode, index: int) -> None:
        children = rect.children()
        joined = self._child_tree(children["l"], index).join(self._child_tree(children["r"], index))
        level = rect.family.levels[index]
        level.tree = splice(joined, level.merge_output, rect.middle())
        self.stats_counters.rejoins += 1

    # -- queries -----------------------------------------------------------

    def index_of(self, point: Point) -> int:
        """Current index of a live point."""
        if self.deleted[point.x]:
            raise ContractViolation(f"{point} was deleted")
        return self.rects[self._root_key()].points.rank_of(point.x)

    def live_points(self) -> List[Point]:
        root = self.rects.get(self._root_key())
        return root.live_points() if root is not None else []

    def _translate(self, i: int, j: Optional[int]) -> Optional[Tuple[int, int]]:
        live = self.live_count()
        if j is None:
            j = live - 1
        if live == 0 and (i, j) == (0, -1):
            return None
        if not 0 <= i <= j < live:
            raise ContractViolation(f"query ({i}, {j}) outside 0..{live - 1} or reversed")
        points = self.rects[self._root_key()].points
        return points.find_rank(i)[0], points.find_rank(j)[0]

    def query(self, i: int = 0, j: Optional[int] = None) -> int:
        """Approximate LIS of the live subarray i..j (current indices, inclusive).

        Without arguments the whole live array is queried; that query on an empty
        structure returns 0.
        """
        return self.query_chain(i, j)[0]

    def query_chain(self, i: int = 0, j: Optional[int] = None) -> Tuple[int, Chain]:
        span = self._translate(i, j)
        if span is None:
            return 0, ()
        score, segment = self.rects[self._root_key()].family.query(*span)
        if segment is None:
            return 0, ()
        return score, tuple(p for p in segment.chain if self.is_live(p))

    # -- diagnostics -------------------------------------------------------

    def depth_bound(self, height: int) -> float:
        return 1 + max(height, 1) * (6 / self.epsilon_prime + 2)

    def max_cover_depth(self) -> int:
        return max((rect.family.max_depth() for rect in self.rects.values()), default=0)

    def stats(self) -> dict:
        data = self.stats_counters.to_dict()
        data.update(rectangles=len(self.rects), live=self.live_count(),
                    max_cover_depth=self.max_cover_depth(),
                    epsilon_prime=self.epsilon_prime)
        return data

    def audit(self, keys: Optional[Sequence[RectKey]] = None) -> List[str]:
        """Check stored covers against the brute-force validator; returns the problems found.

        Scans whole rectangles, so it is meant for small instances in tests.
        """
        from approxlis.oracle import validate_cover
        problems = []
        for key in keys if keys is not None else list(self.rects):
            rect = self.rects[key]
            points = rect.live_points()
            for level in rect.family.levels:
                verdict = validate_cover(points, level.segments(), level.k1, level.k2,
                                         is_live=self.is_live)
                if not verdict.ok:
                    problems.append(f"{key} level ({level.k1}, {level.k2:g}): {verdict.reason}")
                level_depth = level.depth()
                if level_depth > self.depth_bound(rect.height):
                    problems.append(f"{key} level ({level.k1}, {level.k2:g}): depth {level_depth}")
                if level.merge_output is not None:
                    bound = merge_depth_bound(*self.merge_target(level, rect.height), self.lam)
                    output_depth = depth(level.merge_output)
                    if output_depth > bound:
                        problems.append(f"{key} level ({level.k1}, {level.k2:g}): "
                                        f"merge output depth {output_depth} over {bound}")
        return problems


class WholeArrayLIS:
    """Approximate LIS of the whole live array under deletions.

    Keeps one exact longest chain from the last recomputation and its length `bound`.
    Deletions never lengthen the LIS, so `bound` stays above it, and the live part of the
    stored chain is reported while it keeps at least bound / (1 + epsilon) points. Below
    that the chain is recomputed by patience sorting the live points.

    Exposes the part of the DecrementalLIS interface that peeling needs (whole-array
    queries, deletions by current index, index lookups).
    """

    def __init__(self, points: PointSet, epsilon: float, config: Optional[StructureConfig] = None):
        if not 0 < epsilon <= 1:
            raise ContractViolation(f"epsilon must lie in (0, 1], got {epsilon}")
        self.config = config or StructureConfig()
        self.epsilon = epsilon
        self.n = len(points)
        self.deleted = [False] * self.n
        self.points = PersistentTree.from_sorted((p.x, p) for p in points)
        self.bound = 0
        self.witness: Chain = ()
        self.witness_live = 0
        self._witness_x: set = set()
        self.recomputes = 0
        self._recompute()

    @classmethod
    def build(cls, points: PointSet, epsilon: float,
              config: Optional[StructureConfig] = None) -> "WholeArrayLIS":
        points = sorted(points, key=lambda p: p.x)
        n = len(points)
        if [p.x for p in points] != list(range(n)) or sorted(p.y for p in points) != list(range(n)):
            raise ContractViolation("points must use coordinates 0..n-1 on both axes")
        return cls(points, epsilon, config)

    @classmethod
    def from_values(cls, values: Sequence, epsilon: float,
                    config: Optional[StructureConfig] = None) -> "WholeArrayLIS":
        return cls.build(normalize(values), epsilon, config)

    def _recompute(self) -> None:
        self.bound, self.witness = lis_static(list(self.points.values()))
        self.witness_live = self.bound
        self._witness_x = {p.x for p in self.witness}
        self.recomputes += 1
        logger.debug("recomputed whole-array LIS over %d points: %d", len(self.points), self.bound)

    def __len__(self) -> int:
        return len(self.points)

    def live_count(self) -> int:
        return len(self.points)

    def is_live(self, point) -> bool:
        return not self.deleted[point.x]

    def delete(self, index: int) -> Point:
        """Delete the element currently at `index`; returns its original point."""
        live = len(self.points)
        if not 0 <= index < live:
            raise ContractViolation(f"delete index {index} outside 0..{live - 1}")
        x, point = self.points.find_rank(index)
        self.points = self.points.delete(x)
        self.deleted[x] = True
        if x in self._witness_x:
            self.witness_live -= 1
        return point

    def index_of(self, point: Point) -> int:
        if self.deleted[point.x]:
            raise ContractViolation(f"{point} was deleted")
        return self.points.rank_of(point.x)

    def live_points(self) -> List[Point]:
        return list(self.points.values())

    def query(self) -> int:
        return self.query_chain()[0]

    def query_chain(self) -> Tuple[int, Chain]:
        """Score and witness for the whole live array; OPT/(1+epsilon) <= score <= OPT."""
        if self.witness_live * (1 + self.epsilon) < self.bound:
            self._recompute()
        chain = tuple(p for p in self.witness if self.is_live(p))
        return len(chain), chain

    def stats(self) -> dict:
        return {"live": len(self.points), "bound": self.bound,
                "witness_live": self.witness_live, "recomputes": self.recomputes}
