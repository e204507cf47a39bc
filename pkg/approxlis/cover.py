"""
Covers and covering families.

A (k1, k2)-cover of a point set is a set of segments (begin, end, chain) such that every
x-interval holding a chain of length k2 contains a segment whose chain has length at
least k1, and no segment interval lies inside another. Covers are kept in persistent
trees keyed by `begin`; non-inclusion makes begins and ends co-sorted.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple

from approxlis.core import Chain, IncrementalLIS
from approxlis.errors import ContractViolation
from approxlis.pbst import EMPTY, PersistentTree


class Segment(NamedTuple):
    begin: object
    end: object
    chain: Chain

    @property
    def score(self) -> int:
        return len(self.chain)

    def inside(self, lo, hi) -> bool:
        return not self.begin < lo and not hi < self.end


def _shortest_prefix(points: Sequence, start: int, k: int) -> int:
    """Index of the last point of the shortest prefix of points[start:] with a k-chain, or -1."""
    acc = IncrementalLIS()
    for j in range(start, len(points)):
        if acc.append(points[j]) >= k:
            return j
    return -1


def _shortest_suffix(points: Sequence, start: int, stop: int, k: int) -> Tuple[int, Chain]:
    """First index of the shortest suffix of points[start:stop+1] with a k-chain, and the chain."""
    acc = IncrementalLIS(prepend=True)
    for q in range(stop, start - 1, -1):
        if acc.prepend_point(points[q]) >= k:
            return q, acc.chain()
    raise AssertionError("suffix search started outside a prefix holding the chain")


def cover_exact(points: Sequence, k: int) -> List[Segment]:
    """Greedy k-cover of x-sorted points; depth at most k."""
    if k < 1:
        raise ContractViolation("k must be positive")
    if k == 1:
        return [Segment(p.x, p.x, (p,)) for p in points]
    segments = []
    i = 0
    while i < len(points):
        j = _shortest_prefix(points, i, k)
        if j < 0:
            break
        q, chain = _shortest_suffix(points, i, j, k)
        segments.append(Segment(points[q].x, points[j].x, chain))
        i = q + 1
    return segments


def cover_approx(points: Sequence, k1: int, k2: int) -> List[Segment]:
    """Greedy (k1, k2)-cover of x-sorted points; depth at most max(1, ceil(k1 / (k2 - k1))).

    A segment spans the greedy suffix: it begins at its first chain point and ends at the
    last point of the prefix it was cut from.
    """
    if not 1 <= k1 < k2:
        raise ContractViolation("cover_approx needs 1 <= k1 < k2")
    segments = []
    i = 0
    while i < len(points):
        j = _shortest_prefix(points, i, k2)
        if j < 0:
            break
        q, chain = _shortest_suffix(points, i, j, k1)
        segments.append(Segment(points[q].x, points[j].x, chain))
        i = q
    return segments


def depth(segments) -> int:
    """Largest number of segment intervals sharing one x coordinate."""
    events = []
    for s in segments:
        events.append((s.begin, 0))
        events.append((s.end, 1))
    events.sort(key=_event_key)
    best = current = 0
    for _, kind in events:
        if kind == 0:
            current += 1
            best = max(best, current)
        else:
            current -= 1
    return best


class _EventKey:
    __slots__ = ("x", "kind")

    def __init__(self, event):
        self.x, self.kind = event

    def __lt__(self, other: "_EventKey") -> bool:
        if self.x < other.x:
            return True
        if other.x < self.x:
            return False
        return self.kind < other.kind


def _event_key(event) -> _EventKey:
    return _EventKey(event)


def cover_tree(segments: Sequence[Segment]) -> PersistentTree:
    return PersistentTree.from_sorted((s.begin, s) for s in segments)


def segment_inside(tree: PersistentTree, lo, hi) -> Optional[Segment]:
    """A stored segment lying inside [lo, hi], if any."""
    found = tree.ceiling(lo)
    if found is None:
        return None
    segment = found[1]
    return segment if not hi < segment.end else None


@dataclass
class Cover:
    """One level of a covering family.

    k2 may be fractional; the level covers every interval whose longest chain is >= k2.
    merge_output holds the segments of the last Merge (None until the first one).
    """
    k1: int
    k2: float
    tree: PersistentTree = EMPTY
    counter: int = 0
    cap: int = 1
    merge_output: Optional[List[Segment]] = None

    @property
    def exact(self) -> bool:
        return self.k1 == self.k2

    def segments(self) -> List[Segment]:
        return list(self.tree.values())

    def depth(self) -> int:
        return depth(self.tree.values())


def exact_threshold(gamma: float, n: int) -> int:
    return min(n, math.ceil(3 / (gamma - 1)))


def level_schedule(gamma: float, r: int, exact_levels: int, limit: float,
                   upper: Optional[float] = None) -> List[Tuple[int, float]]:
    """(k1, k2) pairs of a (gamma, r)-covering family.

    Levels 1..exact_levels are exact; level exact_levels + j is
    (ceil(K gamma^j), K gamma^(j+r-1)). Levels are produced while k1 <= limit and, when
    `upper` is given, while k2 <= upper.
    """
    schedule: List[Tuple[int, float]] = []
    for k in range(1, exact_levels + 1):
        if k > limit:
            return schedule
        schedule.append((k, float(k)))
    if r == 0 or exact_levels == 0:
        return schedule
    base = exact_levels
    j = 1
    while True:
        k1 = math.ceil(base * gamma ** j)
        k2 = base * gamma ** (j + r - 1)
        if k1 > limit or (upper is not None and k2 > upper):
            return schedule
        schedule.append((k1, k2))
        j += 1


def build_level(points: Sequence, k1: int, k2: float, lower_margin: float = 1.0,
                upper_margin: float = 1.0) -> List[Segment]:
    """Greedy cover for one level, with construction margins.

    Approximate levels are built as (ceil(k1 * lower_margin), ceil(k2 / upper_margin))
    covers so they stay valid while the point set drifts.
    """
    if k1 == k2:
        return cover_exact(points, k1)
    lo = math.ceil(k1 * lower_margin - 1e-9)
    hi = math.ceil(k2 / upper_margin - 1e-9)
    if lo < hi:
        return cover_approx(points, lo, hi)
    return cover_exact(points, max(hi, 1))


@dataclass
class CoveringFamily:
    """Levels ordered by increasing score."""
    levels: List[Cover] = field(default_factory=list)
    gamma: float = 0.0
    r: int = 0

    def __len__(self) -> int:
        return len(self.levels)

    def query(self, lo, hi) -> Tuple[int, Optional[Segment]]:
        """Binary search for the highest level holding a segment inside [lo, hi]."""
        best: Tuple[int, Optional[Segment]] = (0, None)
        a, b = 0, len(self.levels) - 1
        while a <= b:
            mid = (a + b) // 2
            found = segment_inside(self.levels[mid].tree, lo, hi)
            if found is not None:
                best = (self.levels[mid].k1, found)
                a = mid + 1
            else:
                b = mid - 1
        return best

    def max_depth(self) -> int:
        return max((c.depth() for c in self.levels), default=0)


def build_family(points: Sequence, gamma: float, r: int, *, exact_levels: Optional[int] = None,
                 limit: Optional[float] = None, lower_margin: float = 1.0,
                 upper_margin: float = 1.0,
                 cap: Optional[Callable[[int, float], int]] = None,
                 truncate_empty: bool = False) -> CoveringFamily:
    """Greedy (gamma, r)-covering family of x-sorted points.

    With r == 0 every level up to n is an exact cover. Structures pass their own
    exact-level count, level limit, construction margins and counter caps; with
    truncate_empty the levels above the first empty exact level are left out (a missing
    level answers like an empty one).
    """
    n = len(points)
    if r == 0:
        schedule = level_schedule(gamma, 0, n if exact_levels is None else exact_levels,
                                  n if limit is None else limit)
    else:
        if not 1 < gamma < 2:
            raise ContractViolation(f"gamma must lie in (1, 2), got {gamma}")
        if exact_levels is None:
            schedule = level_schedule(gamma, r, exact_threshold(gamma, n), n, upper=n)
        else:
            schedule = level_schedule(gamma, r, exact_levels, n if limit is None else limit)
    levels = []
    empty_from = None
    for k1, k2 in schedule:
        if empty_from is not None and k1 >= empty_from:
            segments: List[Segment] = []
        else:
            segments = build_level(points, k1, k2, lower_margin, upper_margin)
            if not segments and k1 == k2:
                # no k1-chain at all: every later level is empty too
                if truncate_empty:
                    break
                empty_from = k1
        levels.append(Cover(k1, k2, cover_tree(segments), cap=cap(k1, k2) if cap else 1))
    return CoveringFamily(levels, gamma, r)


def family_query(family: CoveringFamily, lo, hi) -> Tuple[int, Optional[Segment]]:
    if hi < lo:
        raise ContractViolation("query interval is reversed")
    return family.query(lo, hi)
