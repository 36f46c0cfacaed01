#!/usr/bin/env python3
"""Benchmark the planning-graph layer kernels and the two analysis methods.

The layer kernel dominates graph-based ordering analysis, so the first table
drives the compiled and the pure-Python kernel over identical layer
sequences until level-off and compares wall time. The second table compares
end-to-end agenda analysis with the graph method against direct analysis,
using whichever kernel backend is active in this process.

Usage:
    python benchmarks/bench_backends.py [--quick]
"""

import argparse
import sys
import time

from goalagenda import corpus, kernel
from goalagenda.agenda import compute_agenda
from goalagenda.graphplan import graph_nodes


def drive_to_leveloff(kernel_cls, problem, max_layers=200):
    nodes = [(sorted(n.pre), sorted(n.add), sorted(n.delete))
             for n in graph_nodes(problem)]
    kern = kernel_cls(len(problem.atoms), nodes)
    fact_mask = 0
    for i in problem.init:
        fact_mask |= 1 << i
    rows = [0] * len(problem.atoms)
    t0 = time.perf_counter()
    for layer in range(max_layers):
        _, next_mask, next_rows, _ = kern.step(fact_mask, rows, False)
        leveled = next_mask == fact_mask and next_rows == rows
        fact_mask, rows = next_mask, next_rows
        if leveled:
            return time.perf_counter() - t0, layer
    raise RuntimeError("graph did not level off")


def kernel_table(instances):
    backends = [("python", kernel.PyGraphKernel)]
    try:
        from goalagenda._speedups import GraphKernel as CKernel
        backends.insert(0, ("c", CKernel))
    except ImportError:
        print("compiled kernel not built; timing the pure backend only\n")

    print(f"{'instance':<14}{'actions':>8}{'facts':>7}{'layers':>7}", end="")
    for name, _ in backends:
        print(f"{name:>12}", end="")
    if len(backends) == 2:
        print(f"{'speedup':>9}", end="")
    print()
    for instance in instances:
        problem = corpus.load(instance)
        row = f"{instance:<14}{len(problem.actions):>8}{len(problem.atoms):>7}"
        times = []
        layers = None
        for _, cls in backends:
            elapsed, layers = drive_to_leveloff(cls, problem)
            times.append(elapsed)
        row = row + f"{layers:>7}"
        for elapsed in times:
            row += f"{elapsed:>11.3f}s"
        if len(times) == 2 and times[0] > 0:
            row += f"{times[1] / times[0]:>8.1f}x"
        print(row)


def method_table(instances):
    print(f"\n{'instance':<14}{'actions':>8}{'graph (e)':>12}"
          f"{'direct (h)':>12}{'entries':>9}   [{kernel.backend()} kernel]")
    for instance in instances:
        problem = corpus.load(instance)
        t0 = time.perf_counter()
        agenda_e = compute_agenda(problem, "e")
        te = time.perf_counter() - t0
        t0 = time.perf_counter()
        agenda_h = compute_agenda(problem, "h")
        th = time.perf_counter() - t0
        marker = "" if agenda_e.entries == agenda_h.entries else "  (differ)"
        print(f"{instance:<14}{len(problem.actions):>8}{te:>11.3f}s"
              f"{th:>11.3f}s{len(agenda_h.entries):>9}{marker}")


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true",
                        help="small instances only")
    args = parser.parse_args(argv)
    if args.quick:
        kernel_instances = ["blocks3", "gripper2", "hanoi_3", "stack_6"]
        method_instances = ["blocks3", "hanoi_3", "stack_8"]
    else:
        kernel_instances = ["blocks3", "gripper2", "hanoi_3", "hanoi_5",
                            "stack_8", "stack_12", "stack_16", "stack_20"]
        method_instances = ["hanoi_5", "tyreworld_3", "stack_12", "stack_20",
                            "stack_28"]
    kernel_table(kernel_instances)
    method_table(method_instances)
    return 0


if __name__ == "__main__":
    sys.exit(main())
