import pytest

from approxlis.config import StructureConfig
from approxlis.core import Point
from approxlis.cover import Segment, cover_exact
from approxlis.oracle import (
    DifferentialFailure, ReferenceModel, check_chain, differential_run, lis_dp, validate_cover,
)
from approxlis.script import Command, UpdateScript, random_script
from tests.helpers import points_of, random_permutation


def test_lis_dp_basics():
    assert lis_dp([]) == 0
    assert lis_dp(list(range(7))) == 7
    assert lis_dp(list(range(7, 0, -1))) == 1
    assert lis_dp([3, 1, 4, 1, 5, 9, 2, 6]) == 4
    assert lis_dp([2, 2, 2]) == 1


def test_empty_cover_of_chain_free_input_is_accepted():
    assert validate_cover(points_of([3, 2, 1, 0]), [], 2, 2).ok


def test_removing_a_segment_is_caught(rng):
    perm = random_permutation(rng, 20)
    points = points_of(perm)
    segments = cover_exact(points, 3)
    assert segments
    for drop in range(len(segments)):
        damaged = segments[:drop] + segments[drop + 1:]
        verdict = validate_cover(points, damaged, 3, 3)
        assert not verdict.ok
        lo, hi = verdict.interval
        assert lis_dp(perm[lo:hi + 1]) >= 3


def test_nested_segments_are_rejected():
    points = points_of([0, 1, 2, 3])
    chain_a = (Point(0, 0), Point(1, 1))
    chain_b = (Point(1, 1), Point(2, 2))
    verdict = validate_cover(points, [Segment(0, 3, chain_a), Segment(1, 2, chain_b)], 2, 2)
    assert not verdict.ok and "nest" in verdict.reason


def test_short_or_broken_chains_are_rejected():
    points = points_of([0, 1, 2])
    short = validate_cover(points, [Segment(0, 1, (Point(0, 0),))], 2, 3)
    assert not short.ok
    broken = validate_cover(points, [Segment(0, 2, (Point(0, 1), Point(2, 0)))], 2, 3)
    assert not broken.ok
    outside = validate_cover(points, [Segment(1, 2, (Point(0, 0), Point(2, 2)))], 2, 3)
    assert not outside.ok


def test_dead_points_do_not_count():
    points = points_of([0, 1])
    segment = Segment(0, 1, (Point(0, 0), Point(1, 1)))
    assert validate_cover(points, [segment], 2, 2).ok
    assert not validate_cover(points, [segment], 2, 2, is_live=lambda p: p.x != 0).ok


def test_check_chain():
    values = [5, 1, 6, 2, 7]
    assert check_chain(values, [Point(1, 1), Point(3, 2), Point(4, 7)], 0, 4).ok
    assert not check_chain(values, [Point(1, 1), Point(3, 9)], 0, 4).ok
    assert not check_chain(values, [Point(0, 5), Point(1, 1)], 0, 4).ok
    assert not check_chain(values, [Point(4, 7)], 0, 3).ok


def test_reference_model():
    model = ReferenceModel([3, 1, 2])
    model.apply(Command("I", (0, 0)))
    model.apply(Command("D", (2,)))
    assert model.values == [0, 3, 2]
    assert model.lis(0, 2) == 2
    assert model.span(Command("Q", ())) == (0, 2)


def test_clean_run_on_static_input(rng):
    preload = random_permutation(rng, 24)
    script = UpdateScript(preload, [Command("Q", (i, j)) for i in range(0, 24, 5) for j in range(i, 24, 4)])
    report = differential_run(script, 0.5)
    assert report.ok, report.violations
    assert report.structure == "decremental"
    assert report.queries == len(script)


def test_clean_decremental_run():
    script = random_script(11, 60, preload=20, insert_share=0.0)
    report = differential_run(script, 0.5)
    assert report.ok, report.violations
    assert report.stats["merges"] > 0


def test_clean_dynamic_run():
    script = random_script(5, 60, preload=12, max_size=20)
    report = differential_run(script, 1.0, seed=2)
    assert report.ok, report.violations
    assert report.structure == "dynamic"
    assert report.to_dict()["repro"] is None


def fault_script():
    return UpdateScript(list(range(8)), [Command("D", (3,)), Command("Q", ())])


def test_stale_covers_are_detected_and_shrunk():
    broken = StructureConfig(cap_override=10 ** 6)
    script = fault_script()
    script.commands = [Command("Q", ())] + script.commands + [Command("D", (0,))]
    report = differential_run(script, 0.5, broken)
    assert not report.ok
    assert [str(c) for c in report.repro] == ["D 3", "Q"]
    assert "answer 8" in report.violations[0]


def test_raise_on_violation():
    with pytest.raises(DifferentialFailure) as info:
        differential_run(fault_script(), 0.5, StructureConfig(cap_override=10 ** 6),
                         raise_on_violation=True)
    assert "D 3" in str(info.value)
    assert not info.value.report.ok


def test_runs_are_deterministic():
    script = random_script(3, 40, preload=10, max_size=16)
    first = differential_run(script, 0.5, seed=9).to_dict()
    second = differential_run(script, 0.5, seed=9).to_dict()
    assert first == second
