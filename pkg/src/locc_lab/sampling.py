"""Seeded random 3x3 operators for probing the domino predicate."""
from __future__ import annotations

import numpy as np

from .analysis import domino_preserves_orthogonality
from .numerics import DEFAULT_TOL, Tolerance, is_proportional_unitary, random_unitary


def _gaussian(rng):
    return rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))


def operator_samples(n: int, seed: int = 0):
    """Mix of generic, proportional-to-unitary and near-miss operators.

    Near misses sit well outside the tolerance band (relative defects of
    1e-3 or more) or well inside it (1e-13), never on the boundary.
    """
    rng = np.random.default_rng(seed)
    kinds = ("gaussian", "unitary", "tiny-defect", "scaled-column", "rank-deficient",
             "diagonal", "real")
    for i in range(n):
        kind = kinds[i % len(kinds)]
        c = float(np.exp(rng.uniform(-3, 3)))
        u = random_unitary(3, rng)
        if kind == "gaussian":
            a = _gaussian(rng)
        elif kind == "unitary":
            a = c * u
        elif kind == "tiny-defect":
            a = c * u @ np.diag([1 + 1e-13, 1, 1])
        elif kind == "scaled-column":
            a = c * u @ np.diag([1 + rng.choice([1e-3, 1e-2, 0.5, -0.5]), 1, 1])
        elif kind == "rank-deficient":
            a = c * u @ np.diag([1, 1, 0]) @ random_unitary(3, rng)
        elif kind == "diagonal":
            d = rng.choice([1.0, 1.0, 2.0, 0.0], size=3) * np.exp(1j * rng.uniform(0, 2 * np.pi, 3))
            a = c * np.diag(d)
        else:
            a = rng.standard_normal((3, 3))
        yield kind, a


def domino_counterexamples(n: int, seed: int = 0, tol: Tolerance = DEFAULT_TOL):
    """Samples where orthogonality preservation and unitarity disagree (either side)."""
    bad = []
    for kind, a in operator_samples(n, seed):
        for party in ("A", "B"):
            if domino_preserves_orthogonality(a, party, tol) != is_proportional_unitary(a, tol):
                bad.append((kind, party, a))
    return bad
