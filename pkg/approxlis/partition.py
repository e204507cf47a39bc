"""
Erdős–Szekeres partitioning: split a permutation into few monotone subsequences.

Long increasing subsequences are peeled off with a deletion-only structure while they
are long enough; the rest has a short LIS and is split into that many decreasing
subsequences by patience sorting.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Type, Union

from approxlis.config import StructureConfig
from approxlis.core import Chain, Point, decreasing_partition, normalize
from approxlis.decremental import DecrementalLIS, WholeArrayLIS
from approxlis.errors import ContractViolation

logger = logging.getLogger(__name__)

INCREASING = "increasing"
DECREASING = "decreasing"


@dataclass
class MonotonePartition:
    """Parts of a permutation, each labelled with its direction.

    Chains hold points (index, value) of the input permutation.
    """
    n: int
    parts: List[Tuple[str, Chain]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.parts)

    def count(self, direction: str) -> int:
        return sum(1 for d, _ in self.parts if d == direction)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "parts": [
                {"direction": d, "indices": [p.x for p in chain], "values": [p.y for p in chain]}
                for d, chain in self.parts
            ],
        }


def _check_permutation(perm: Sequence[int]) -> None:
    if len(set(perm)) != len(perm):
        raise ContractViolation("input is not a permutation: values repeat")
    if perm and (min(perm), max(perm)) not in ((0, len(perm) - 1), (1, len(perm))):
        raise ContractViolation(f"input is not a permutation of 0..{len(perm) - 1} or 1..{len(perm)}")


def _check_epsilon(epsilon: float) -> None:
    if not 0 < epsilon <= 1:
        raise ContractViolation(f"epsilon must lie in (0, 1], got {epsilon}")


Peeler = Union[Type[WholeArrayLIS], Type[DecrementalLIS]]


def _peel(perm: Sequence[int], epsilon: float, threshold, config: Optional[StructureConfig],
          structure_type: Peeler) -> MonotonePartition:
    _check_permutation(perm)
    n = len(perm)
    result = MonotonePartition(n)
    if n == 0:
        return result
    structure = structure_type.build(normalize(perm), epsilon, config)
    step = 0
    while len(structure):
        score, chain = structure.query_chain()
        if not chain or score < threshold(step):
            break
        # delete from the back so earlier indices stay put
        for point in reversed(chain):
            structure.delete(structure.index_of(point))
        result.parts.append((INCREASING, _original(chain, perm)))
        step += 1
        logger.debug("peeled increasing part %d of length %d (score %d)", step, len(chain), score)
    rest = decreasing_partition(structure.live_points())
    for part in rest:
        result.parts.append((DECREASING, _original(part, perm)))
    logger.info("partitioned %d elements into %d increasing and %d decreasing parts",
                n, step, len(rest))
    return result


def _original(chain: Chain, perm: Sequence[int]) -> Chain:
    return tuple(Point(p.x, perm[p.x]) for p in chain)


def es_partition(perm: Sequence[int], config: Optional[StructureConfig] = None,
                 structure_type: Peeler = WholeArrayLIS) -> MonotonePartition:
    """At most 3*sqrt(n) monotone parts, using a 2-approximation of LIS.

    Peeling only asks for whole-array answers, so WholeArrayLIS is the default;
    DecrementalLIS gives the same guarantee at a much higher cost per deletion.
    """
    root = math.sqrt(len(perm))
    return _peel(perm, 1.0, lambda step: root, config, structure_type)


def es_partition_tight(perm: Sequence[int], epsilon: float,
                       config: Optional[StructureConfig] = None,
                       structure_type: Peeler = WholeArrayLIS) -> MonotonePartition:
    """At most ceil((1+epsilon) * sqrt(2n)) monotone parts.

    Step i peels an increasing part only if the reported length is at least sqrt(2n) - i.
    """
    _check_epsilon(epsilon)
    s = math.sqrt(2 * len(perm))
    return _peel(perm, epsilon, lambda step: s - step, config, structure_type)


def part_bound(n: int, epsilon: Optional[float] = None) -> int:
    """Guaranteed number of parts: 3*sqrt(n), or ceil((1+epsilon)*sqrt(2n)) for the tight variant."""
    if epsilon is None:
        return math.floor(3 * math.sqrt(n))
    _check_epsilon(epsilon)
    return math.ceil((1 + epsilon) * math.sqrt(2 * n))
