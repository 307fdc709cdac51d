"""Compare the domino orthogonality predicate with proportional-to-unitary on random operators."""
import argparse
from collections import Counter

from locc_lab.analysis import domino_preserves_orthogonality
from locc_lab.numerics import Tolerance, is_proportional_unitary
from locc_lab.sampling import operator_samples


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--tol-abs", type=float, default=1e-7)
    args = ap.parse_args()
    tol = Tolerance(abs=args.tol_abs)
    seen, agree, keeps = Counter(), Counter(), Counter()
    for kind, a in operator_samples(args.samples, args.seed):
        u = is_proportional_unitary(a, tol)
        for party in "AB":
            d = domino_preserves_orthogonality(a, party, tol)
            seen[kind] += 1
            agree[kind] += d == u
            keeps[kind] += d
    print(f"{'kind':<16}{'checks':>8}{'agree':>8}{'keep orth.':>12}")
    for kind in seen:
        print(f"{kind:<16}{seen[kind]:>8}{agree[kind]:>8}{keeps[kind]:>12}")
    bad = sum(seen.values()) - sum(agree.values())
    print(f"counterexamples: {bad}")
    raise SystemExit(1 if bad else 0)


if __name__ == "__main__":
    main()
