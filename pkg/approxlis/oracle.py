"""
Brute-force references for the test suite and the fuzz command.

Nothing here imports the structures' algorithms: LIS is recomputed by quadratic dynamic
programming, covers are checked interval by interval, and scripts are replayed against a
plain Python list.
"""

import logging
import math
from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple

from approxlis.config import StructureConfig
from approxlis.core import Point
from approxlis.errors import ContractViolation
from approxlis.script import Command, UpdateScript

logger = logging.getLogger(__name__)


def lis_dp(values: Sequence) -> int:
    """Length of the longest strictly increasing subsequence, O(n^2)."""
    best = [1] * len(values)
    for j in range(len(values)):
        for i in range(j):
            if values[i] < values[j] and best[i] + 1 > best[j]:
                best[j] = best[i] + 1
    return max(best, default=0)


class Verdict(NamedTuple):
    ok: bool
    reason: str = ""
    interval: Optional[Tuple] = None


ACCEPT = Verdict(True)


def _chain_problem(chain: Sequence, lo, hi) -> Optional[str]:
    for a, b in zip(chain, chain[1:]):
        if not (a.x < b.x and a.y < b.y):
            return f"chain is not increasing at {a} -> {b}"
    for p in chain:
        if p.x < lo or hi < p.x:
            return f"chain point {p} lies outside its segment"
    return None


def validate_cover(points: Sequence, segments: Sequence, k1: int, k2: float,
                   is_live: Optional[Callable] = None) -> Verdict:
    """Check that `segments` form a (k1, k2)-cover of the x-sorted `points`.

    Every interval [points[i].x, points[j].x] holding a chain of length >= k2 must contain
    a segment with at least k1 live chain points; segment intervals must not nest, and
    every stored chain must increase inside its own interval.
    """
    live = is_live or (lambda p: True)
    ordered = sorted(segments, key=lambda s: _Cmp(s.begin))
    for s in ordered:
        if s.end < s.begin:
            return Verdict(False, f"segment ends before it begins: {s.begin} > {s.end}", (s.begin, s.end))
        problem = _chain_problem(s.chain, s.begin, s.end)
        if problem:
            return Verdict(False, problem, (s.begin, s.end))
        alive = sum(1 for p in s.chain if live(p))
        if alive < k1:
            return Verdict(False, f"segment holds {alive} live chain points, needs {k1}", (s.begin, s.end))
    for a, b in zip(ordered, ordered[1:]):
        if not (a.begin < b.begin and a.end < b.end):
            return Verdict(False, "segment intervals nest", (b.begin, b.end))
    need = math.ceil(k2 - 1e-9)
    for i in range(len(points)):
        tails: list = []
        for j in range(i, len(points)):
            pile = bisect_left(tails, _Cmp(points[j].y))
            if pile == len(tails):
                tails.append(_Cmp(points[j].y))
            else:
                tails[pile] = _Cmp(points[j].y)
            if len(tails) >= need:
                lo, hi = points[i].x, points[j].x
                if not any(not s.begin < lo and not hi < s.end for s in ordered):
                    return Verdict(False, f"interval holds a {need}-chain but no segment", (lo, hi))
                break
    return ACCEPT


class _Cmp:
    """Sort key for objects that only define `<`."""
    __slots__ = ("v",)

    def __init__(self, v):
        self.v = v

    def __lt__(self, other: "_Cmp") -> bool:
        return self.v < other.v


def check_chain(values: Sequence, chain: Sequence, i: int, j: int) -> Verdict:
    """A witness of (index, value) points must be an increasing subsequence of values[i..j]."""
    for p in chain:
        if not i <= p.x <= j:
            return Verdict(False, f"witness index {p.x} outside {i}..{j}", (i, j))
        if values[p.x] != p.y:
            return Verdict(False, f"witness claims values[{p.x}] == {p.y}, found {values[p.x]}", (i, j))
    for a, b in zip(chain, chain[1:]):
        if not (a.x < b.x and a.y < b.y):
            return Verdict(False, f"witness is not increasing at {tuple(a)} -> {tuple(b)}", (i, j))
    return ACCEPT


def check_partition(perm: Sequence, partition, bound: Optional[int] = None) -> Verdict:
    """Every index exactly once, every part monotone in its direction, at most `bound` parts."""
    seen = []
    for direction, chain in partition.parts:
        for p in chain:
            if perm[p.x] != p.y:
                return Verdict(False, f"part claims perm[{p.x}] == {p.y}")
            seen.append(p.x)
        for a, b in zip(chain, chain[1:]):
            rising = a.y < b.y if direction == "increasing" else b.y < a.y
            if not (a.x < b.x and rising):
                return Verdict(False, f"{direction} part breaks at {tuple(a)} -> {tuple(b)}")
    if sorted(seen) != list(range(len(perm))):
        return Verdict(False, "parts do not cover every index exactly once")
    if bound is not None and len(partition.parts) > bound:
        return Verdict(False, f"{len(partition.parts)} parts, bound is {bound}")
    return ACCEPT


class ReferenceModel:
    """The live array as a plain list."""

    def __init__(self, values: Sequence = ()):
        self.values = list(values)

    def apply(self, command: Command) -> None:
        if command.op == "I":
            position, value = command.args
            self.values.insert(position, value)
        elif command.op == "D":
            del self.values[command.args[0]]

    def span(self, command: Command) -> Tuple[int, int]:
        return command.args if command.args else (0, len(self.values) - 1)

    def lis(self, i: int, j: int) -> int:
        return lis_dp(self.values[i:j + 1])


@dataclass
class DifferentialReport:
    structure: str
    epsilon: float
    commands: int = 0
    queries: int = 0
    violations: List[str] = field(default_factory=list)
    max_cover_depth: int = 0
    stats: dict = field(default_factory=dict)
    repro: Optional[UpdateScript] = None

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "structure": self.structure,
            "epsilon": self.epsilon,
            "commands": self.commands,
            "queries": self.queries,
            "ok": self.ok,
            "violations": self.violations,
            "max_cover_depth": self.max_cover_depth,
            "stats": self.stats,
            "repro": self.repro.dumps() if self.repro is not None else None,
        }


class DifferentialFailure(AssertionError):
    def __init__(self, report: DifferentialReport):
        first = report.violations[0] if report.violations else "unknown violation"
        super().__init__(f"{first}\nminimized script:\n{report.repro.dumps() if report.repro else ''}")
        self.report = report


def _make_structure(script: UpdateScript, epsilon: float, config: StructureConfig):
    # imported here so the checkers above stay importable on their own
    if script.has_inserts:
        from approxlis.dynamic import DynamicLIS
        return "dynamic", DynamicLIS.from_values(script.preload, epsilon, config)
    from approxlis.decremental import DecrementalLIS
    return "decremental", DecrementalLIS.from_values(script.preload, epsilon, config)


def _replay(script: UpdateScript, epsilon: float, config: StructureConfig,
            audit_every: Optional[int] = None) -> DifferentialReport:
    """Run the script once, stopping at the first violation."""
    name, structure = _make_structure(script, epsilon, config)
    reference = ReferenceModel(script.preload)
    report = DifferentialReport(name, epsilon)
    for step, command in enumerate(script.commands, start=1):
        report.commands = step
        if command.op == "I":
            structure.insert(*command.args)
        elif command.op == "D":
            structure.delete(command.args[0])
        else:
            report.queries += 1
            score, chain = structure.query_chain(*command.args)
            if name == "decremental":
                chain = tuple(Point(structure.index_of(p), script.preload[p.x]) for p in chain)
            if not reference.values:
                if score:
                    report.violations.append(f"command {step} ({command}): {score} on an empty array")
                continue
            i, j = reference.span(command)
            opt = reference.lis(i, j)
            if score > opt or score * (1 + epsilon) < opt - 1e-9:
                report.violations.append(
                    f"command {step} ({command}): answer {score} outside [{opt}/(1+{epsilon}), {opt}]")
            elif len(chain) < score:
                report.violations.append(
                    f"command {step} ({command}): witness of length {len(chain)} for answer {score}")
            else:
                verdict = check_chain(reference.values, chain, i, j)
                if not verdict.ok:
                    report.violations.append(f"command {step} ({command}): {verdict.reason}")
        reference.apply(command)
        if audit_every and step % audit_every == 0 and not report.violations:
            report.violations.extend(f"command {step}: {p}" for p in structure.audit())
        if report.violations:
            break
    report.max_cover_depth = structure.max_cover_depth()
    report.stats = structure.stats()
    return report


def _fails(script: UpdateScript, epsilon: float, config: StructureConfig,
           audit_every: Optional[int]) -> bool:
    try:
        return not _replay(script, epsilon, config, audit_every).ok
    except ContractViolation:
        # a removal left a command with an invalid position
        return False


def shrink(script: UpdateScript, failing_at: int, epsilon: float, config: StructureConfig,
           audit_every: Optional[int] = None) -> UpdateScript:
    """Cut the script after the failing command, then drop single commands while it still fails."""
    current = script.replace_commands(script.commands[:failing_at])
    changed = True
    while changed:
        changed = False
        index = 0
        while index < len(current.commands):
            candidate = current.replace_commands(current.commands[:index] + current.commands[index + 1:])
            if _fails(candidate, epsilon, config, audit_every):
                current = candidate
                changed = True
            else:
                index += 1
    return current


def differential_run(script: UpdateScript, epsilon: float, config: Optional[StructureConfig] = None,
                     *, seed: Optional[int] = None, raise_on_violation: bool = False,
                     audit_every: Optional[int] = None) -> DifferentialReport:
    """Replay a script on the structure and on a plain list, comparing every query.

    Scripts without inserts run on the decremental structure. Each query must satisfy
    OPT/(1+epsilon) <= answer <= OPT and come with a valid witness of at least `answer`
    elements. On failure the report carries a shrunken script reproducing it.
    """
    config = config or StructureConfig()
    if seed is not None:
        config = config.with_changes(seed=seed)
    report = _replay(script, epsilon, config, audit_every)
    if not report.ok:
        logger.info("violation after %d commands, shrinking", report.commands)
        report.repro = shrink(script, report.commands, epsilon, config, audit_every)
        if raise_on_violation:
            raise DifferentialFailure(report)
    return report
