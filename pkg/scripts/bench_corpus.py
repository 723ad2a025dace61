#!/usr/bin/env python3
"""Time the bundled example queries and report answers and counters."""
import argparse
import statistics
import time

from linweb import corpus
from linweb.engine import format_answer, solve
from linweb.modules import ModuleRegistry
from linweb.syntax import parse_goal, parse_program

LISTS = "www.dau.com/lists"

QUERIES = [
    ("max.lw", "max(9,3,M)"),
    ("max.lw", "max(3,9,M)"),
    ("append.lw", "append(X,Y,[1,2])"),
    ("append_plain.lw", "append(X,Y,[1,2])"),
    ("lists.lw", "memb(a,[a,b,a])"),
    (None, f'"{LISTS}" => uni([a,b],[b,c],Z)'),
]


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("-r", "--repeat", type=int, default=50)
    args = p.parse_args(argv)

    print(f"{'program':16} {'query':38} {'ms(median)':>10}  inf/com/pru/hyp  answers")
    for name, query in QUERIES:
        prog = parse_program(corpus.text(name)).clauses if name else []
        goal = parse_goal(query)
        times = []
        for _ in range(args.repeat):
            # a fresh registry each run so module loading is included
            reg = ModuleRegistry([(LISTS, str(corpus.path("lists.lw")))], http=False, search_path=[])
            t0 = time.perf_counter()
            answers, st = solve(prog, goal, "all", registry=reg)
            times.append((time.perf_counter() - t0) * 1000)
        counters = f"{st.inferences}/{st.choice_commits}/{st.choice_prunes}/{st.hypotheses_pushed}"
        shown = "; ".join(format_answer(a) for a in answers)
        print(f"{name or '-':16} {query:38} {statistics.median(times):10.3f}  {counters:15}  {shown}")


if __name__ == "__main__":
    main()
