#!/usr/bin/env python3
"""Run the committed-choice engine against the nondeterministic oracle on
seeded random programs and summarize subset/first-answer statistics."""
import argparse
import collections
import json
import time

from linweb.engine import Limits
from linweb.oracle import differential_check
from linweb.randprog import random_case


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("-n", "--cases", type=int, default=500)
    p.add_argument("--seed", type=int, default=1000, help="first seed")
    p.add_argument("--max-clauses", type=int, default=8)
    p.add_argument("--max-choices", type=int, default=2)
    p.add_argument("--max-steps", type=int, default=Limits().max_steps)
    p.add_argument("--show", action="store_true", help="print programs whose answer sets differ")
    p.add_argument("--json", metavar="FILE", help="write per-case results as JSON")
    args = p.parse_args(argv)

    counts = collections.Counter()
    rows = []
    t0 = time.perf_counter()
    for seed in range(args.seed, args.seed + args.cases):
        case = random_case(seed, max_clauses=args.max_clauses, max_choices=args.max_choices)
        report = differential_check(case.program, case.goal, Limits(max_steps=args.max_steps))
        row = {
            "seed": seed,
            "conclusive": report.conclusive,
            "engine": len(report.engine_answers),
            "oracle": len(report.oracle_answers),
            "subset": report.subset_holds,
            "first": report.first_answer_matched,
        }
        rows.append(row)
        if not report.conclusive:
            counts["inconclusive"] += 1
            continue
        counts["conclusive"] += 1
        counts["subset"] += bool(report.subset_holds)
        counts["pruned answers"] += row["oracle"] > row["engine"]
        if args.show and row["oracle"] != row["engine"]:
            print(f"% seed {seed}: engine {row['engine']} / oracle {row['oracle']}")
            print(case.program_text + "?- " + case.query_text + ".\n")
    secs = time.perf_counter() - t0

    print(f"cases:                  {args.cases}")
    print(f"conclusive:             {counts['conclusive']}")
    print(f"inconclusive:           {counts['inconclusive']}")
    print(f"subset holds:           {counts['subset']}/{counts['conclusive']}")
    print(f"engine found fewer:     {counts['pruned answers']}")
    print(f"time:                   {secs:.2f}s")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=1)
    return 0 if counts["subset"] == counts["conclusive"] else 1


if __name__ == "__main__":
    raise SystemExit(main())
