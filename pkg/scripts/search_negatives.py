"""Run the basis-aligned search on the sets that should defeat it, with and without pruning.

A 'not found' here certifies only that the basis-aligned projective family
up to the given number of rounds is exhausted.
"""
import argparse
import time

from locc_lab import catalog
from locc_lab.protocol import classify
from locc_lab.search import SearchSpec, search_protocols

CASES = [
    ("yu-3x3", "P2", 2),
    ("bennett9", "P2", 1),
    ("keep-rj-counterexample-5x5", "P2", 2),
    ("appd-5-2-mixed", "P2", 2),
    ("exstates-4x4", "P0", 2),
    ("appc-5dim-3states", "P2", 1),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-rounds", type=int, default=4)
    args = ap.parse_args()
    print(f"{'entry':<30}{'class':<6}{'r':>2}  {'pruned':<22}{'unpruned':<22}")
    for name, cls, r in CASES:
        ss = catalog.build(name).state_set
        cells = []
        for prune in (True, False):
            t = time.perf_counter()
            res = search_protocols(ss, SearchSpec(cls, r, args.max_rounds, prune=prune))
            dt = time.perf_counter() - t
            verdict = f"found {classify(res.protocol)}" if res.found else "exhausted"
            cells.append(f"{verdict} {res.nodes_explored}n {dt:.2f}s")
        print(f"{name:<30}{cls:<6}{r:>2}  {cells[0]:<22}{cells[1]:<22}")


if __name__ == "__main__":
    main()
