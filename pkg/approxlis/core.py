"""
Point sets, patience sorting and the decreasing partition.

An array a_0..a_{n-1} is handled as the set of points (i, rank(a_i)); an increasing
subsequence is then a chain, i.e. a sequence of points increasing in both coordinates.
"""

from bisect import bisect_left
from typing import Any, List, NamedTuple, Sequence, Tuple

from approxlis.errors import ContractViolation


class Point(NamedTuple):
    x: int
    y: int


# Points are expected in increasing x order wherever a PointSet is taken.
PointSet = Sequence[Point]
Chain = Tuple[Any, ...]


def normalize(values: Sequence) -> List[Point]:
    """Map values to points (i, rank_i) with ranks forming a permutation of range(n).

    Among equal values the earlier one receives the larger rank, so strictly increasing
    subsequences of the values and of the ranks coincide.
    """
    order = sorted(range(len(values)), key=lambda i: (values[i], -i))
    ranks = [0] * len(values)
    for rank, i in enumerate(order):
        ranks[i] = rank
    return [Point(i, r) for i, r in enumerate(ranks)]


class _Desc:
    """Inverts the order of a key."""
    __slots__ = ("key",)

    def __init__(self, key):
        self.key = key

    def __lt__(self, other: "_Desc") -> bool:
        return other.key < self.key


class IncrementalLIS:
    """Fredman's patience sorting, maintained under appends (or under prepends).

    With prepend=True points must arrive with strictly decreasing x and the structure
    tracks the longest chain of the suffix seen so far.
    """

    def __init__(self, prepend: bool = False):
        self.prepend = prepend
        self._tops: list = []
        self._top_points: list = []
        self._links: dict = {}
        self._last = None

    def __len__(self) -> int:
        return len(self._tops)

    @property
    def length(self) -> int:
        return len(self._tops)

    def append(self, point) -> int:
        if self.prepend:
            raise ContractViolation("accumulator was opened for prepending")
        return self._push(point)

    def prepend_point(self, point) -> int:
        if not self.prepend:
            raise ContractViolation("accumulator was opened for appending")
        return self._push(point)

    def _push(self, point) -> int:
        if self._last is not None:
            monotone = self._last.x < point.x if not self.prepend else point.x < self._last.x
            if not monotone:
                raise ContractViolation(f"x coordinates must be strictly {'decreasing' if self.prepend else 'increasing'}")
        self._last = point
        key = _Desc(point.y) if self.prepend else point.y
        pile = bisect_left(self._tops, key)
        self._links[id(point)] = (point, self._top_points[pile - 1] if pile else None)
        if pile == len(self._tops):
            self._tops.append(key)
            self._top_points.append(point)
        else:
            self._tops[pile] = key
            self._top_points[pile] = point
        return len(self._tops)

    def chain(self) -> Chain:
        """A chain of the current maximum length, in increasing x order."""
        if not self._tops:
            return ()
        out = []
        point = self._top_points[-1]
        while point is not None:
            out.append(point)
            point = self._links[id(point)][1]
        if not self.prepend:
            out.reverse()
        return tuple(out)


def incremental_lis(prepend: bool = False) -> IncrementalLIS:
    return IncrementalLIS(prepend=prepend)


def lis_static(points: PointSet) -> Tuple[int, Chain]:
    """Exact LIS of a point set given in x order, with a witness chain.

    Plain patience sorting over pile indices; x order is trusted, not checked.
    """
    tops: list = []
    top_index: list = []
    seen: list = []
    back: list = []
    for p in points:
        pile = bisect_left(tops, p.y)
        back.append(top_index[pile - 1] if pile else -1)
        if pile == len(tops):
            tops.append(p.y)
            top_index.append(len(seen))
        else:
            tops[pile] = p.y
            top_index[pile] = len(seen)
        seen.append(p)
    out = []
    at = top_index[-1] if top_index else -1
    while at >= 0:
        out.append(seen[at])
        at = back[at]
    out.reverse()
    return len(tops), tuple(out)


def decreasing_partition(points: PointSet) -> List[Chain]:
    """Split points into LIS(points) chains decreasing in y.

    Part l holds the points whose longest increasing chain ending there has length l+1.
    """
    tops: list = []
    parts: List[list] = []
    for p in points:
        pile = bisect_left(tops, p.y)
        if pile == len(tops):
            tops.append(p.y)
            parts.append([p])
        else:
            tops[pile] = p.y
            parts[pile].append(p)
    return [tuple(part) for part in parts]
