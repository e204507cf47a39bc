#!/usr/bin/env python3
"""
Approximate dynamic LIS from the command line.

    python dynlis.py lis sample_values.txt --witness
    python dynlis.py cover sample_values.txt 3
    python dynlis.py simulate sample_script.txt --eps 0.5
    python dynlis.py espartition perm.txt --tight --eps 0.5
    python dynlis.py fuzz --seed 7 --ops 400 --eps 0.5
    python dynlis.py bench --n 1024 4096 --eps 0.5 --csv bench.csv
"""

import argparse
import csv
import json
import logging
import random
import sys
import time
from typing import List, Optional

from approxlis.config import StructureConfig
from approxlis.core import lis_static, normalize
from approxlis.cover import cover_approx, cover_exact, depth
from approxlis.decremental import DecrementalLIS
from approxlis.dynamic import DynamicLIS
from approxlis.errors import ContractViolation, ScriptParseError
from approxlis.oracle import differential_run
from approxlis.partition import es_partition, es_partition_tight
from approxlis.script import UpdateScript, random_script, read_values

logger = logging.getLogger("dynlis")

BENCH_HEADER = ["n", "eps", "avg_update_us", "avg_query_us", "max_cover_depth"]


def _emit(data, as_json: bool, lines: List[str]):
    if as_json:
        print(json.dumps(data, indent=2))
    else:
        for line in lines:
            print(line)


def cmd_lis(args) -> int:
    values = read_values(args.input)
    length, chain = lis_static(normalize(values))
    witness = [values[p.x] for p in chain]
    lines = [str(length)]
    if args.witness:
        lines.append(" ".join(map(str, witness)))
    _emit({"length": length, "witness": witness}, args.json, lines)
    return 0


def cmd_cover(args) -> int:
    points = normalize(read_values(args.input))
    if args.k2 is None:
        segments = cover_exact(points, args.k1)
    else:
        segments = cover_approx(points, args.k1, args.k2)
    data = {
        "k1": args.k1,
        "k2": args.k2 if args.k2 is not None else args.k1,
        "depth": depth(segments),
        "segments": [
            {"begin": s.begin, "end": s.end, "score": s.score, "chain": [p.x for p in s.chain]}
            for s in segments
        ],
    }
    _emit(data, args.json, [f"{s.begin} {s.end} {s.score}" for s in segments])
    return 0


def _structure_for(script: UpdateScript, args):
    config = StructureConfig(seed=args.seed)
    if args.decremental:
        if script.has_inserts:
            raise ContractViolation("a decremental simulation cannot replay inserts")
        return DecrementalLIS.from_values(script.preload, args.eps, config)
    return DynamicLIS.from_values(script.preload, args.eps, config)


def cmd_simulate(args) -> int:
    script = UpdateScript.load(args.script)
    structure = _structure_for(script, args)
    results, lines = [], []
    for command in script:
        if command.op == "I":
            structure.insert(*command.args)
        elif command.op == "D":
            structure.delete(command.args[0])
        else:
            score, chain = structure.query_chain(*command.args)
            if args.decremental:
                witness = [script.preload[p.x] for p in chain]
            else:
                witness = [p.y for p in chain]
            entry = {"command": str(command), "score": score}
            if command.op == "QC":
                entry["witness"] = witness
                lines.append(f"{score}: {' '.join(map(str, witness))}")
            else:
                lines.append(str(score))
            results.append(entry)
    logger.info("final structure stats: %s", structure.stats())
    _emit(results, args.json, lines)
    return 0


def cmd_espartition(args) -> int:
    perm = read_values(args.input)
    if args.tight:
        partition = es_partition_tight(perm, args.eps)
    else:
        partition = es_partition(perm)
    lines = [("+ " if d == "increasing" else "- ") + " ".join(str(p.y) for p in chain)
             for d, chain in partition.parts]
    _emit(partition.to_dict(), args.json, lines)
    return 0


def cmd_fuzz(args) -> int:
    config = StructureConfig(seed=args.seed)
    worst = None
    for run in range(args.runs):
        script = random_script(args.seed + run, args.ops, preload=args.preload,
                               insert_share=0.0 if args.decremental else 0.5,
                               max_size=args.max_size)
        report = differential_run(script, args.eps, config)
        if not report.ok:
            worst = report
            break
        print(f"run {run}: {report.queries} queries ok, max cover depth {report.max_cover_depth}")
    if worst is None:
        return 0
    if args.json:
        print(json.dumps(worst.to_dict(), indent=2))
    else:
        print(f"Violation: {worst.violations[0]}")
        print("Minimized script:")
        print(worst.repro.dumps(), end="")
    return 1


def bench_row(n: int, eps: float, seed: int, ops: int) -> dict:
    """Time `ops` updates and as many queries on a random array of n values."""
    rng = random.Random(seed)
    structure = DynamicLIS.from_values([rng.randrange(4 * n) for _ in range(n)], eps,
                                       StructureConfig(seed=seed))
    update_time = query_time = 0.0
    for step in range(ops):
        size = len(structure)
        started = time.perf_counter()
        if step % 2 == 0:
            structure.insert(rng.randint(0, size), rng.randrange(4 * n))
        else:
            structure.delete(rng.randrange(size))
        update_time += time.perf_counter() - started
        size = len(structure)
        i = rng.randrange(size)
        j = rng.randrange(i, size)
        started = time.perf_counter()
        structure.query(i, j)
        query_time += time.perf_counter() - started
    return {
        "n": n,
        "eps": eps,
        "avg_update_us": round(update_time / max(ops, 1) * 1e6, 1),
        "avg_query_us": round(query_time / max(ops, 1) * 1e6, 1),
        "max_cover_depth": structure.max_cover_depth(),
    }


def cmd_bench(args) -> int:
    rows = []
    for n in args.n:
        for eps in args.eps:
            row = bench_row(n, eps, args.seed, args.ops)
            logger.info("bench n=%d eps=%g: %s", n, eps, row)
            rows.append(row)
    out = open(args.csv, "w", newline="", encoding="utf-8") if args.csv else sys.stdout
    try:
        writer = csv.DictWriter(out, fieldnames=BENCH_HEADER)
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if args.csv:
            out.close()
    if args.csv:
        print(f"Saved {len(rows)} rows to {args.csv}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Approximate longest increasing subsequence under updates")
    parser.add_argument("--verbose", "-v", action="store_true", help="Log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lis", help="Exact LIS of a file of integers")
    p.add_argument("input", help="File of whitespace-separated integers")
    p.add_argument("--witness", "-w", action="store_true", help="Also print one longest subsequence")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_lis)

    p = sub.add_parser("cover", help="Greedy k-cover or (k1, k2)-cover of a file of integers")
    p.add_argument("input")
    p.add_argument("k1", type=int)
    p.add_argument("k2", type=int, nargs="?")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_cover)

    p = sub.add_parser("simulate", help="Replay an update script")
    p.add_argument("script", help="Script of P/I/D/Q/QC lines")
    p.add_argument("--eps", "-e", type=float, default=0.5, help="Approximation slack in (0, 1]")
    p.add_argument("--decremental", action="store_true", help="Use the deletion-only structure")
    p.add_argument("--seed", "-s", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("espartition", help="Split a permutation into few monotone subsequences")
    p.add_argument("input")
    p.add_argument("--tight", action="store_true", help="Aim for (1+eps) sqrt(2n) parts")
    p.add_argument("--eps", "-e", type=float, default=0.5)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_espartition)

    p = sub.add_parser("fuzz", help="Differential test against a brute-force model")
    p.add_argument("--seed", "-s", type=int, default=0)
    p.add_argument("--ops", type=int, default=300, help="Commands per script")
    p.add_argument("--runs", type=int, default=1, help="Scripts to run, seeds seed..seed+runs-1")
    p.add_argument("--eps", "-e", type=float, default=0.5)
    p.add_argument("--preload", type=int, default=16)
    p.add_argument("--max-size", type=int, default=64)
    p.add_argument("--decremental", action="store_true", help="Deletion-only scripts")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("bench", help="Average update and query times as CSV")
    p.add_argument("--n", type=int, nargs="+", default=[1024])
    p.add_argument("--eps", "-e", type=float, nargs="+", default=[0.5])
    p.add_argument("--seed", "-s", type=int, default=0)
    p.add_argument("--ops", type=int, default=200, help="Updates (and queries) per row")
    p.add_argument("--csv", help="Write the table here instead of stdout")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.verbose:
        logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ScriptParseError, OSError) as e:
        print(f"Error: {e}")
        return 2
    except ContractViolation as e:
        print(f"Error: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
