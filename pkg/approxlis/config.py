"""
Tuning knobs for the decremental and fully dynamic structures.

Most callers only pick epsilon; the remaining fields exist for experiments and for the
fault-injection tests.
"""

import math
import os
from dataclasses import dataclass, field, replace
from typing import Optional

ORDER_BACKENDS = ("list", "tree")


def _default_backend() -> str:
    return os.environ.get("APPROXLIS_ORDER_BACKEND", "list").strip() or "list"


@dataclass(frozen=True)
class StructureConfig:
    """Structure settings.

    epsilon_prime: use this per-level slack instead of the one derived from epsilon.
    sparsify: run the second step of Merge (greedy re-covering of candidate points); when
        off, Merge returns its raw candidates, the shortest one per begin.
    cap_override: force every level's counter cap to this value.
    order_backend: "list" (two-level list labeling) or "tree" (balanced tree).
    seed: seed for randomized internals (tree backend priorities).
    """
    epsilon_prime: Optional[float] = None
    sparsify: bool = True
    cap_override: Optional[int] = None
    order_backend: str = field(default_factory=_default_backend)
    seed: int = 0

    def __post_init__(self):
        if self.order_backend not in ORDER_BACKENDS:
            raise ValueError(f"unknown order backend {self.order_backend!r}, expected one of {ORDER_BACKENDS}")
        if self.epsilon_prime is not None and not 0 < self.epsilon_prime < math.sqrt(2) - 1:
            # level ratios are (1 + epsilon_prime) ** 2 and must stay below 2
            raise ValueError("epsilon_prime must lie in (0, sqrt(2) - 1)")
        if self.cap_override is not None and self.cap_override < 1:
            raise ValueError("cap_override must be positive")

    def with_changes(self, **changes) -> "StructureConfig":
        return replace(self, **changes)
